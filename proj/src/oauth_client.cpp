// Copyright 2026 The Puda Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "puda/oauth_client.hpp"

#include "puda/crypto.hpp"
#include "puda/http_util.hpp"
#include "puda/model.hpp"

namespace puda {

namespace {

const std::set<std::string> kSecretFields = {"password", "client_secret", "code_verifier",
                                             "access_token"};

Json redact(Json value) {
  if (value.is_object()) {
    for (auto& [key, v] : value.items()) {
      if (kSecretFields.count(key)) {
        v = "[redacted]";
      } else {
        v = redact(v);
      }
    }
  }
  return value;
}

Json parse_or_raw(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const std::exception&) {
    return Json{{"raw", text}};
  }
}

struct RawResult {
  int status;
  std::string body;
};

RawResult send(const std::string& method, const std::string& url, const httplib::Headers& headers,
               const std::string& body, const std::string& content_type,
               std::chrono::milliseconds timeout) {
  auto parsed = http::parse_url(url);
  if (!parsed) throw Error(Errc::InvalidArgument, "not an http(s) URL: " + url);
  auto client = http::make_client(*parsed, timeout);
  httplib::Result result;
  if (method == "GET") {
    result = client->Get(parsed->path, headers);
  } else if (method == "PUT") {
    result = client->Put(parsed->path, headers, body, content_type);
  } else {
    result = client->Post(parsed->path, headers, body, content_type);
  }
  if (!result) {
    throw Error(Errc::TransportError, method + " " + url + ": " + httplib::to_string(result.error()));
  }
  return {result->status, result->body};
}

std::string error_detail(const Json& body) {
  if (body.is_object()) {
    if (body.contains("error_description")) return body["error_description"].get<std::string>();
    if (body.contains("error")) return body["error"].get<std::string>();
  }
  return body.dump();
}

std::string server_error(const Json& body) {
  return body.is_object() ? body.value("error", "") : "";
}

std::pair<int, Json> step_request(Transcript& t, const std::string& step,
                                  const std::string& method, const std::string& url,
                                  const httplib::Headers& headers, const std::string& body,
                                  const std::string& content_type, const Json& logged_request,
                                  std::chrono::milliseconds timeout) {
  FlowStep entry{step, method, url, redact(logged_request), 0, Json()};
  RawResult raw;
  try {
    raw = send(method, url, headers, body, content_type, timeout);
  } catch (const Error& e) {
    entry.response = Json{{"transport_error", e.what()}};
    t.steps.push_back(entry);
    throw FlowStepError(step, 0, e.what());
  }
  entry.status = raw.status;
  Json parsed = parse_or_raw(raw.body);
  entry.response = redact(parsed);
  t.steps.push_back(std::move(entry));
  return {raw.status, parsed};
}

}  // namespace

Json Transcript::to_json() const {
  Json out = Json::array();
  for (const auto& s : steps) {
    out.push_back(Json{{"step", s.step},
                       {"method", s.method},
                       {"url", s.url},
                       {"request", s.request},
                       {"status", s.status},
                       {"response", s.response}});
  }
  return out;
}

std::string make_code_verifier() { return crypto::base64url_encode(crypto::random_bytes(32)); }

std::pair<int, Json> transcribed_request(Transcript& transcript, const std::string& step,
                                         const std::string& method, const std::string& url,
                                         const std::string& bearer, const std::optional<Json>& body,
                                         std::chrono::milliseconds timeout) {
  httplib::Headers headers;
  if (!bearer.empty()) headers.emplace("Authorization", "Bearer " + bearer);
  std::string text = body ? canonical_dump(*body) : std::string();
  Json logged = body ? *body : Json();
  if (!bearer.empty()) logged = Json{{"body", logged}, {"authorization", "Bearer [redacted]"}};
  return step_request(transcript, step, method, url, headers, text, "application/json", logged,
                      timeout);
}

OAuthFlowResult run_authorization_flow(const OAuthFlowOptions& o, Transcript& t) {
  OAuthFlowResult result;
  std::string issuer = o.issuer;
  while (!issuer.empty() && issuer.back() == '/') issuer.pop_back();

  // Discovery.
  auto [dstatus, discovery] =
      transcribed_request(t, "discovery", "GET", issuer + "/.well-known/openid-configuration",
                          {}, std::nullopt, o.timeout);
  if (dstatus != 200) throw FlowStepError("discovery", dstatus, error_detail(discovery));
  if (discovery.value("issuer", "") != issuer) {
    throw FlowStepError("discovery", dstatus, "issuer in document does not match");
  }
  result.discovery = discovery;
  auto endpoint = [&](const char* name) {
    if (!discovery.contains(name) || !discovery[name].is_string()) {
      throw FlowStepError("discovery", dstatus, std::string("document lacks ") + name);
    }
    return discovery[name].get<std::string>();
  };

  // Registration.
  Json metadata{{"client_name", o.client_name},
                {"redirect_uris", {o.redirect_uri}},
                {"token_endpoint_auth_method", o.public_client ? "none" : "client_secret_post"}};
  auto [rstatus, reg] = transcribed_request(t, "register_client", "POST",
                                            endpoint("registration_endpoint"), {}, metadata,
                                            o.timeout);
  if (rstatus != 201) {
    throw FlowStepError("register_client", rstatus, error_detail(reg), server_error(reg));
  }
  result.client_id = reg.at("client_id").get<std::string>();
  if (reg.contains("client_secret")) result.client_secret = reg["client_secret"].get<std::string>();

  // Authorization request.
  std::string verifier = make_code_verifier();
  std::string state = crypto::random_hex(8);
  std::map<std::string, std::string> params{{"response_type", "code"},
                                            {"client_id", result.client_id},
                                            {"redirect_uri", o.redirect_uri},
                                            {"scope", join_scopes(o.scopes)},
                                            {"state", state},
                                            {"code_challenge", crypto::pkce_challenge(verifier)},
                                            {"code_challenge_method", "S256"}};
  if (!o.resource.empty()) params["resource"] = o.resource;
  std::string authorize_url = http::with_query(endpoint("authorization_endpoint"), params);
  auto [astatus, pending] =
      transcribed_request(t, "authorize", "GET", authorize_url, {}, std::nullopt, o.timeout);
  if (astatus != 200) {
    throw FlowStepError("authorize", astatus, error_detail(pending), server_error(pending));
  }

  // Consent, as the user.
  Json decision{{"request_id", pending.at("request_id")},
                {"username", o.username},
                {"password", o.password},
                {"decision", o.approve ? "approve" : "deny"}};
  const auto& approved = o.approved_scopes.empty() ? o.scopes : o.approved_scopes;
  decision["approved_scopes"] = std::vector<std::string>(approved.begin(), approved.end());
  std::string consent_url = pending.value("consent_endpoint", issuer + "/consent");
  auto [cstatus, consent] =
      transcribed_request(t, "consent", "POST", consent_url, {}, decision, o.timeout);
  if (cstatus != 200) {
    throw FlowStepError("consent", cstatus, error_detail(consent), server_error(consent));
  }
  std::string redirect = consent.at("redirect_to").get<std::string>();
  auto q = redirect.find('?');
  auto query = http::form_decode(q == std::string::npos ? "" : redirect.substr(q + 1));
  if (query["state"] != state) throw FlowStepError("consent", cstatus, "state not echoed");
  if (query.count("error")) {
    throw FlowStepError("consent", cstatus, "authorization denied", query["error"]);
  }
  if (!query.count("code")) throw FlowStepError("consent", cstatus, "redirect carries no code");

  // Code exchange.
  std::map<std::string, std::string> form{{"grant_type", "authorization_code"},
                                          {"code", query["code"]},
                                          {"redirect_uri", o.redirect_uri},
                                          {"client_id", result.client_id},
                                          {"code_verifier", verifier}};
  if (result.client_secret) form["client_secret"] = *result.client_secret;
  Json logged(form);
  auto [tstatus, token] = step_request(t, "token", "POST", endpoint("token_endpoint"), {},
                                       http::form_encode(form),
                                       "application/x-www-form-urlencoded", logged, o.timeout);
  if (tstatus != 200) {
    throw FlowStepError("token", tstatus, error_detail(token), server_error(token));
  }
  result.access_token = token.at("access_token").get<std::string>();
  result.scopes = split_scopes(token.at("scope").get<std::string>());
  result.grant_id = token.value("grant_id", "");
  result.expires_in = token.value("expires_in", std::int64_t{0});
  return result;
}

}  // namespace puda
