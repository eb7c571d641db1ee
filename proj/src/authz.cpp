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

#include "puda/authz.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <tuple>

#include "puda/http_util.hpp"
#include "puda/model.hpp"
#include "puda/store.hpp"

namespace puda {

namespace {

constexpr std::string_view kRegistrationsFile = "registrations.json";
constexpr std::string_view kGrantsFile = "grants.json";

Timestamp whole_seconds(Timestamp ts) {
  return std::chrono::floor<std::chrono::seconds>(ts);
}

std::vector<std::string_view> split_dots(std::string_view token) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto dot = token.find('.', start);
    parts.push_back(token.substr(start, dot == std::string_view::npos ? dot : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return parts;
}

// Checks the JWS structure and signature, returning the claims. `key_for`
// maps a kid to its key or nullptr.
TokenClaims decode_signed(std::string_view token,
                          const std::function<const crypto::Ed25519Key*(const std::string&)>& key_for) {
  auto parts = split_dots(token);
  if (parts.size() != 3) throw Error(Errc::BadSignature, "not a compact JWS");
  auto header_text = crypto::base64url_decode(parts[0]);
  auto payload_text = crypto::base64url_decode(parts[1]);
  auto signature = crypto::base64url_decode(parts[2]);
  if (!header_text || !payload_text || !signature) {
    throw Error(Errc::BadSignature, "malformed token encoding");
  }
  Json header;
  try {
    header = Json::parse(*header_text);
  } catch (const std::exception&) {
    throw Error(Errc::BadSignature, "malformed token header");
  }
  if (!header.is_object() || header.value("alg", "") != "EdDSA") {
    throw Error(Errc::BadSignature, "unsupported algorithm");
  }
  const crypto::Ed25519Key* key = key_for(header.value("kid", ""));
  if (key == nullptr) throw Error(Errc::BadSignature, "unknown key id");
  std::string signing_input = std::string(parts[0]) + "." + std::string(parts[1]);
  if (!key->verify(signing_input, *signature)) {
    throw Error(Errc::BadSignature, "signature does not verify");
  }
  try {
    return claims_from_json(Json::parse(*payload_text));
  } catch (const std::exception& e) {
    throw Error(Errc::Unauthorized, std::string("malformed claims: ") + e.what());
  }
}

void check_claims(const TokenClaims& claims, std::string_view issuer, std::string_view audience,
                  Timestamp now) {
  if (claims.iss != issuer) throw Error(Errc::Unauthorized, "token from another issuer");
  if (now >= claims.exp) throw Error(Errc::Expired, "token expired at " + format_rfc3339(claims.exp));
  if (claims.aud != audience) {
    throw Error(Errc::AudienceMismatch, "token is for audience '" + claims.aud + "'");
  }
}

bool valid_redirect_uri(std::string_view uri) {
  return is_absolute_uri(uri) && uri.find('#') == std::string_view::npos;
}

// RFC 7636: 43 to 128 characters from the unreserved set.
bool valid_pkce_text(std::string_view text) {
  if (text.size() < 43 || text.size() > 128) return false;
  return std::all_of(text.begin(), text.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_' ||
           c == '~';
  });
}

Json scopes_json(const std::set<std::string>& scopes) {
  return Json(std::vector<std::string>(scopes.begin(), scopes.end()));
}

}  // namespace

// Tokens ---------------------------------------------------------------------

Json claims_to_json(const TokenClaims& c) {
  return Json{{"iss", c.iss},
              {"sub", c.sub},
              {"aud", c.aud},
              {"client_id", c.client_id},
              {"scope", join_scopes(c.scopes)},
              {"iat", to_unix_seconds(c.iat)},
              {"exp", to_unix_seconds(c.exp)},
              {"jti", c.jti},
              {"grant_id", c.grant_id}};
}

TokenClaims claims_from_json(const Json& j) {
  TokenClaims c;
  c.iss = j.at("iss").get<std::string>();
  c.sub = j.at("sub").get<std::string>();
  c.aud = j.at("aud").get<std::string>();
  c.client_id = j.at("client_id").get<std::string>();
  c.scopes = split_scopes(j.at("scope").get<std::string>());
  c.iat = from_unix_seconds(j.at("iat").get<std::int64_t>());
  c.exp = from_unix_seconds(j.at("exp").get<std::int64_t>());
  c.jti = j.at("jti").get<std::string>();
  c.grant_id = j.at("grant_id").get<std::string>();
  return c;
}

std::string sign_token(const crypto::Ed25519Key& key, const TokenClaims& claims) {
  Json header{{"alg", "EdDSA"}, {"kid", key.thumbprint()}, {"typ", "at+jwt"}};
  std::string input = crypto::base64url_encode(canonical_dump(header)) + "." +
                      crypto::base64url_encode(canonical_dump(claims_to_json(claims)));
  return input + "." + crypto::base64url_encode(key.sign(input));
}

Json public_jwk(const crypto::Ed25519Key& key) {
  return Json{{"kty", "OKP"},
              {"crv", "Ed25519"},
              {"x", crypto::base64url_encode(key.public_raw())},
              {"kid", key.thumbprint()},
              {"alg", "EdDSA"},
              {"use", "sig"}};
}

TokenVerifier::TokenVerifier(std::string issuer, std::string audience, Clock clock)
    : issuer_(std::move(issuer)), clock_(std::move(clock)), audience_(std::move(audience)) {}

void TokenVerifier::set_keys(const Json& jwks) {
  std::map<std::string, crypto::Ed25519Key> keys;
  try {
    for (const auto& jwk : jwks.at("keys")) {
      if (jwk.value("kty", "") != "OKP" || jwk.value("crv", "") != "Ed25519") continue;
      auto raw = crypto::base64url_decode(jwk.at("x").get<std::string>());
      if (!raw) throw Error(Errc::InvalidArgument, "bad key encoding");
      auto key = crypto::Ed25519Key::from_public_raw(*raw);
      // The kid is recomputed, never trusted from the document.
      auto kid = key.thumbprint();
      keys.emplace(std::move(kid), std::move(key));
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed key set: ") + e.what());
  }
  std::lock_guard lock(mutex_);
  keys_ = std::move(keys);
}

void TokenVerifier::add_revocations(const Json& list) {
  std::lock_guard lock(mutex_);
  for (const auto& entry : list.at("revoked")) {
    revoked_.insert(entry.at("grant_id").get<std::string>());
  }
}

void TokenVerifier::set_audience(std::string audience) {
  std::lock_guard lock(mutex_);
  audience_ = std::move(audience);
}

std::string TokenVerifier::audience() const {
  std::lock_guard lock(mutex_);
  return audience_;
}

TokenClaims TokenVerifier::verify(std::string_view token) const {
  std::lock_guard lock(mutex_);
  auto claims = decode_signed(token, [&](const std::string& kid) -> const crypto::Ed25519Key* {
    auto it = keys_.find(kid);
    return it == keys_.end() ? nullptr : &it->second;
  });
  check_claims(claims, issuer_, audience_, clock_());
  if (revoked_.count(claims.grant_id)) {
    throw Error(Errc::RevokedGrant, "grant " + claims.grant_id + " was revoked");
  }
  return claims;
}

// Serialization --------------------------------------------------------------

void to_json(Json& j, const ClientRegistration& c) {
  j = Json{{"client_id", c.client_id},
           {"redirect_uris", c.redirect_uris},
           {"client_name", c.client_name},
           {"registered_at", timestamp_json(c.registered_at)}};
  if (c.client_secret) j["client_secret"] = *c.client_secret;
}

void from_json(const Json& j, ClientRegistration& c) {
  c.client_id = j.at("client_id").get<std::string>();
  c.redirect_uris = j.at("redirect_uris").get<std::vector<std::string>>();
  c.client_name = j.at("client_name").get<std::string>();
  c.registered_at = timestamp_from_json(j.at("registered_at"));
  c.client_secret.reset();
  if (j.contains("client_secret")) c.client_secret = j.at("client_secret").get<std::string>();
}

void to_json(Json& j, const ResourceRegistration& r) {
  j = Json{{"resource_id", r.resource_id},
           {"endpoint_map", r.endpoint_map},
           {"registered_at", timestamp_json(r.registered_at)}};
}

void from_json(const Json& j, ResourceRegistration& r) {
  r.resource_id = j.at("resource_id").get<std::string>();
  r.endpoint_map = j.at("endpoint_map").get<std::map<std::string, std::string>>();
  r.registered_at = timestamp_from_json(j.at("registered_at"));
}

void to_json(Json& j, const AccessGrant& g) {
  j = Json{{"grant_id", g.grant_id},
           {"user_id", g.user_id},
           {"client_id", g.client_id},
           {"scopes", scopes_json(g.scopes)},
           {"audience", g.audience},
           {"issued_at", timestamp_json(g.issued_at)},
           {"expires_at", timestamp_json(g.expires_at)},
           {"status", g.status == GrantStatus::Active ? "active" : "revoked"}};
  if (g.revoked_at) j["revoked_at"] = timestamp_json(*g.revoked_at);
}

void from_json(const Json& j, AccessGrant& g) {
  g.grant_id = j.at("grant_id").get<std::string>();
  g.user_id = j.at("user_id").get<std::string>();
  g.client_id = j.at("client_id").get<std::string>();
  auto scopes = j.at("scopes").get<std::vector<std::string>>();
  g.scopes = std::set<std::string>(scopes.begin(), scopes.end());
  g.audience = j.at("audience").get<std::string>();
  g.issued_at = timestamp_from_json(j.at("issued_at"));
  g.expires_at = timestamp_from_json(j.at("expires_at"));
  g.status = j.at("status").get<std::string>() == "revoked" ? GrantStatus::Revoked
                                                           : GrantStatus::Active;
  g.revoked_at.reset();
  if (j.contains("revoked_at")) g.revoked_at = timestamp_from_json(j.at("revoked_at"));
}

Json PendingAuthorization::to_json() const {
  return Json{{"request_id", request_id},
              {"client_id", client_id},
              {"client_name", client_name},
              {"scopes", scopes_json(scopes)},
              {"redirect_uri", redirect_uri},
              {"state", state},
              {"audience", audience},
              {"expires_at", timestamp_json(expires_at)}};
}

Json TokenResponse::to_json() const {
  return Json{{"access_token", access_token},
              {"token_type", "Bearer"},
              {"expires_in", expires_in},
              {"scope", join_scopes(scopes)},
              {"grant_id", grant_id}};
}

// Server ---------------------------------------------------------------------

AuthorizationServer::AuthorizationServer(AuthorizationServerOptions options,
                                         crypto::Ed25519Key key)
    : options_(std::move(options)), key_(std::move(key)) {
  while (!options_.issuer.empty() && options_.issuer.back() == '/') options_.issuer.pop_back();
  if (!http::parse_url(options_.issuer)) {
    throw Error(Errc::InvalidArgument, "issuer must be an absolute http(s) URL");
  }
  if (!key_.has_private()) throw Error(Errc::InvalidArgument, "signing key has no private half");
  kid_ = key_.thumbprint();
  if (options_.store != nullptr) load_state();
}

Json AuthorizationServer::discovery() const {
  const auto& iss = options_.issuer;
  return Json{{"issuer", iss},
              {"authorization_endpoint", iss + "/authorize"},
              {"consent_endpoint", iss + "/consent"},
              {"token_endpoint", iss + "/token"},
              {"registration_endpoint", iss + "/register/client"},
              {"resource_registration_endpoint", iss + "/register/resource"},
              {"jwks_uri", iss + "/keys"},
              {"revocation_list_endpoint", iss + "/revocations"},
              {"scopes_supported", data_scopes()},
              {"response_types_supported", {"code"}},
              {"grant_types_supported", {"authorization_code"}},
              {"code_challenge_methods_supported", {"S256"}},
              {"token_endpoint_auth_methods_supported",
               {"none", "client_secret_post", "client_secret_basic"}},
              {"subject_types_supported", {"public"}},
              {"id_token_signing_alg_values_supported", {"EdDSA"}}};
}

Json AuthorizationServer::jwks() const { return Json{{"keys", {public_jwk(key_)}}}; }

void AuthorizationServer::authenticate_user(std::string_view username,
                                            std::string_view password) const {
  auto it = options_.users.find(std::string(username));
  // Compare against something even for unknown users.
  std::string_view expected = it == options_.users.end() ? std::string_view() : it->second;
  bool ok = crypto::equal_secrets(expected, password);
  if (it == options_.users.end() || !ok || password.empty()) {
    throw Error(Errc::Unauthorized, "invalid user credentials");
  }
}

ClientRegistration AuthorizationServer::register_client(const Json& metadata) {
  if (!metadata.is_object()) throw Error(Errc::InvalidRequest, "metadata must be an object");
  ClientRegistration reg;
  try {
    reg.redirect_uris = metadata.at("redirect_uris").get<std::vector<std::string>>();
    reg.client_name = metadata.value("client_name", "");
  } catch (const std::exception& e) {
    throw Error(Errc::InvalidRequest, std::string("bad client metadata: ") + e.what());
  }
  if (reg.redirect_uris.empty()) {
    throw Error(Errc::InvalidRedirectURI, "at least one redirect URI is required");
  }
  for (const auto& uri : reg.redirect_uris) {
    if (!valid_redirect_uri(uri)) {
      throw Error(Errc::InvalidRedirectURI,
                  "redirect URI must be absolute and carry no fragment: " + uri);
    }
  }
  std::string method = metadata.value("token_endpoint_auth_method", "client_secret_basic");
  if (method != "none") reg.client_secret = crypto::random_hex(32);
  reg.registered_at = options_.clock();

  std::lock_guard lock(mutex_);
  do {
    reg.client_id = crypto::random_hex(16);
  } while (clients_.count(reg.client_id));
  clients_.emplace(reg.client_id, reg);
  persist_registrations();
  return reg;
}

ResourceRegistration AuthorizationServer::register_resource(std::string_view bearer,
                                                            const Json& body) {
  if (bearer.empty()) throw Error(Errc::Unauthorized, "resource registration needs a token");
  auto claims = verify(bearer, options_.issuer);
  if (!claims.has_scope(kRegisterScope)) {
    throw Error(Errc::Unauthorized, "token lacks " + std::string(kRegisterScope));
  }
  ResourceRegistration reg;
  try {
    reg.endpoint_map = body.at("endpoint_map").get<std::map<std::string, std::string>>();
    reg.resource_id = body.value("resource_id", "");
  } catch (const std::exception& e) {
    throw Error(Errc::InvalidRequest, std::string("bad resource metadata: ") + e.what());
  }
  if (reg.endpoint_map.empty()) throw Error(Errc::InvalidRequest, "endpoint_map is empty");
  for (const auto& [scope, uri] : reg.endpoint_map) {
    if (!is_data_scope(scope)) throw Error(Errc::InvalidScopeString, "unknown scope: " + scope);
    if (!http::parse_url(uri)) throw Error(Errc::InvalidRequest, "endpoint is not absolute: " + uri);
  }
  if (reg.resource_id.empty()) reg.resource_id = crypto::random_hex(16);
  if (!is_valid_user_id(reg.resource_id)) {
    throw Error(Errc::InvalidRequest, "resource_id must be [A-Za-z0-9._-]{1,128}");
  }
  reg.registered_at = options_.clock();
  std::lock_guard lock(mutex_);
  resources_.insert_or_assign(reg.resource_id, reg);
  persist_registrations();
  return reg;
}

std::string AuthorizationServer::audience_for(const std::set<std::string>& scopes,
                                              const std::string& requested) const {
  if (scopes.count(std::string(kRegisterScope))) {
    if (scopes.size() != 1) {
      throw Error(Errc::InvalidScope, std::string(kRegisterScope) + " cannot be combined");
    }
    return options_.issuer;
  }
  auto serves_all = [&](const ResourceRegistration& r) {
    return std::all_of(scopes.begin(), scopes.end(),
                       [&](const std::string& s) { return r.endpoint_map.count(s) > 0; });
  };
  if (!requested.empty()) {
    auto it = resources_.find(requested);
    if (it == resources_.end() || !serves_all(it->second)) {
      throw Error(Errc::InvalidScope, "resource '" + requested + "' does not serve the scopes");
    }
    return requested;
  }
  for (const auto& [id, r] : resources_) {
    if (serves_all(r)) return id;
  }
  throw Error(Errc::InvalidScope, "no registered resource serves " + join_scopes(scopes));
}

PendingAuthorization AuthorizationServer::authorize(const AuthorizationRequest& request) {
  if (request.response_type != "code") {
    throw Error(Errc::InvalidRequest, "response_type must be 'code'");
  }
  std::lock_guard lock(mutex_);
  auto client = clients_.find(request.client_id);
  if (client == clients_.end()) {
    throw Error(Errc::UnknownClient, "unknown client_id '" + request.client_id + "'");
  }
  const auto& uris = client->second.redirect_uris;
  if (std::find(uris.begin(), uris.end(), request.redirect_uri) == uris.end()) {
    throw Error(Errc::RedirectMismatch, "redirect_uri is not registered for this client");
  }
  if (request.code_challenge_method != "S256" || !valid_pkce_text(request.code_challenge)) {
    throw Error(Errc::InvalidRequest, "a PKCE S256 code_challenge is required");
  }
  auto scopes = split_scopes(request.scope);
  if (scopes.empty()) throw Error(Errc::InvalidScope, "no scope requested");
  for (const auto& s : scopes) {
    if (!is_data_scope(s) && s != kRegisterScope) {
      throw Error(Errc::InvalidScope, "unsupported scope '" + s + "'");
    }
  }
  PendingAuthorization pending;
  pending.audience = audience_for(scopes, request.resource);
  pending.client_id = request.client_id;
  pending.client_name = client->second.client_name;
  pending.scopes = std::move(scopes);
  pending.redirect_uri = request.redirect_uri;
  pending.state = request.state;
  pending.code_challenge = request.code_challenge;
  auto now = options_.clock();
  pending.expires_at = now + options_.request_ttl;
  pending.request_id = crypto::random_hex(16);

  std::erase_if(pending_, [&](const auto& kv) { return kv.second.expires_at <= now; });
  pending_.emplace(pending.request_id, pending);
  return pending;
}

std::optional<PendingAuthorization> AuthorizationServer::pending(std::string_view request_id) const {
  std::lock_guard lock(mutex_);
  auto it = pending_.find(request_id);
  if (it == pending_.end()) return std::nullopt;
  return it->second;
}

std::string AuthorizationServer::consent(const ConsentDecision& decision) {
  authenticate_user(decision.username, decision.password);
  std::lock_guard lock(mutex_);
  auto it = pending_.find(decision.request_id);
  auto now = options_.clock();
  if (it == pending_.end() || it->second.expires_at <= now) {
    throw Error(Errc::InvalidRequest, "unknown or expired authorization request");
  }
  PendingAuthorization request = it->second;
  if (decision.approve) {
    if (decision.approved_scopes.empty()) {
      throw Error(Errc::InvalidScope, "approval must name at least one scope");
    }
    for (const auto& s : decision.approved_scopes) {
      if (!request.scopes.count(s)) {
        throw Error(Errc::InvalidScope, "scope '" + s + "' was not requested");
      }
    }
  }
  pending_.erase(it);

  std::map<std::string, std::string> params;
  if (!request.state.empty()) params["state"] = request.state;
  if (!decision.approve) {
    params["error"] = "access_denied";
    return http::with_query(request.redirect_uri, params);
  }

  AccessGrant grant;
  grant.grant_id = crypto::random_hex(16);
  grant.user_id = decision.username;
  grant.client_id = request.client_id;
  grant.scopes = decision.approved_scopes;
  grant.audience = request.audience;
  grant.issued_at = now;
  grant.expires_at = now + options_.token_ttl;
  grants_.emplace(grant.grant_id, grant);
  ++approvals_;
  persist_grant(grant, true);

  CodeRecord code{request.client_id, request.redirect_uri, request.code_challenge,
                  grant.grant_id, now + options_.code_ttl, false};
  std::string code_value = crypto::random_hex(32);
  codes_.emplace(code_value, std::move(code));
  params["code"] = code_value;
  return http::with_query(request.redirect_uri, params);
}

TokenResponse AuthorizationServer::exchange_code(const TokenRequest& request) {
  if (request.grant_type != "authorization_code") {
    throw Error(Errc::InvalidRequest, "unsupported grant_type '" + request.grant_type + "'");
  }
  std::lock_guard lock(mutex_);
  auto code_it = codes_.find(request.code);
  if (code_it == codes_.end()) throw Error(Errc::InvalidCode, "unknown authorization code");
  CodeRecord& code = code_it->second;
  if (code.consumed) {
    // A second redemption means the code leaked; kill what it produced.
    auto grant = grants_.find(code.grant_id);
    if (grant != grants_.end()) revoke_locked(grant->second);
    throw Error(Errc::CodeReplay, "authorization code already used; grant revoked");
  }
  auto client = clients_.find(request.client_id);
  if (client == clients_.end()) throw Error(Errc::ClientAuthFailed, "unknown client");
  if (client->second.client_secret &&
      (!request.client_secret ||
       !crypto::equal_secrets(*client->second.client_secret, *request.client_secret))) {
    throw Error(Errc::ClientAuthFailed, "client authentication failed");
  }
  auto now = options_.clock();
  if (code.client_id != request.client_id) {
    throw Error(Errc::InvalidCode, "code was issued to another client");
  }
  if (code.expires_at <= now) throw Error(Errc::InvalidCode, "authorization code expired");
  if (code.redirect_uri != request.redirect_uri) {
    throw Error(Errc::RedirectMismatch, "redirect_uri differs from the authorization request");
  }
  if (!valid_pkce_text(request.code_verifier) ||
      !crypto::equal_secrets(crypto::pkce_challenge(request.code_verifier), code.code_challenge)) {
    throw Error(Errc::PKCEMismatch, "code_verifier does not match code_challenge");
  }
  code.consumed = true;

  auto grant_it = grants_.find(code.grant_id);
  if (grant_it == grants_.end() || grant_it->second.status != GrantStatus::Active) {
    throw Error(Errc::InvalidCode, "grant behind this code is no longer active");
  }
  const AccessGrant& grant = grant_it->second;
  TokenClaims claims;
  claims.iss = options_.issuer;
  claims.sub = grant.user_id;
  claims.aud = grant.audience;
  claims.client_id = grant.client_id;
  claims.scopes = grant.scopes;
  claims.iat = whole_seconds(now);
  claims.exp = claims.iat + options_.token_ttl;
  claims.jti = crypto::random_hex(16);
  claims.grant_id = grant.grant_id;

  if (options_.store != nullptr) {
    options_.store->append(grant.user_id, EventKind::TokenIssued,
                           Json{{"jti", claims.jti},
                                {"grant_id", claims.grant_id},
                                {"client_id", claims.client_id},
                                {"scope", join_scopes(claims.scopes)},
                                {"expires_at", timestamp_json(claims.exp)}});
  }
  TokenResponse response;
  response.access_token = sign_token(key_, claims);
  response.expires_in = options_.token_ttl.count();
  response.scopes = claims.scopes;
  response.grant_id = claims.grant_id;
  return response;
}

TokenClaims AuthorizationServer::verify(std::string_view token, std::string_view audience) const {
  auto claims = decode_signed(token, [&](const std::string& kid) -> const crypto::Ed25519Key* {
    return kid == kid_ ? &key_ : nullptr;
  });
  check_claims(claims, options_.issuer, audience, options_.clock());
  std::lock_guard lock(mutex_);
  auto it = grants_.find(claims.grant_id);
  if (it == grants_.end()) throw Error(Errc::Unauthorized, "token refers to no known grant");
  if (it->second.status != GrantStatus::Active) {
    throw Error(Errc::RevokedGrant, "grant " + claims.grant_id + " was revoked");
  }
  return claims;
}

void AuthorizationServer::revoke_locked(AccessGrant& grant) {
  if (grant.status == GrantStatus::Revoked) return;
  grant.status = GrantStatus::Revoked;
  grant.revoked_at = options_.clock();
  persist_grant(grant, false);
}

AccessGrant AuthorizationServer::revoke_grant(std::string_view grant_id,
                                              std::string_view username,
                                              std::string_view password) {
  authenticate_user(username, password);
  std::lock_guard lock(mutex_);
  auto it = grants_.find(grant_id);
  if (it == grants_.end() || it->second.user_id != username) {
    throw Error(Errc::UnknownGrant, "no grant '" + std::string(grant_id) + "' for this user");
  }
  revoke_locked(it->second);
  return it->second;
}

std::vector<AccessGrant> AuthorizationServer::grants_for(std::string_view username,
                                                         std::string_view password) const {
  authenticate_user(username, password);
  std::lock_guard lock(mutex_);
  std::vector<AccessGrant> out;
  for (const auto& [_, g] : grants_) {
    if (g.user_id == username) out.push_back(g);
  }
  std::sort(out.begin(), out.end(), [](const AccessGrant& a, const AccessGrant& b) {
    return std::tie(a.issued_at, a.grant_id) < std::tie(b.issued_at, b.grant_id);
  });
  return out;
}

std::optional<AccessGrant> AuthorizationServer::grant(std::string_view grant_id) const {
  std::lock_guard lock(mutex_);
  auto it = grants_.find(grant_id);
  if (it == grants_.end()) return std::nullopt;
  return it->second;
}

Json AuthorizationServer::revocations(std::optional<Timestamp> since) const {
  std::lock_guard lock(mutex_);
  Json list = Json::array();
  for (const auto& [id, g] : grants_) {
    if (g.status != GrantStatus::Revoked || !g.revoked_at) continue;
    if (since && *g.revoked_at < *since) continue;
    list.push_back(Json{{"grant_id", id}, {"revoked_at", timestamp_json(*g.revoked_at)}});
  }
  return Json{{"revoked", list}, {"as_of", timestamp_json(options_.clock())}};
}

std::size_t AuthorizationServer::approval_count() const {
  std::lock_guard lock(mutex_);
  return approvals_;
}

// Persistence ----------------------------------------------------------------

void AuthorizationServer::persist_registrations() const {
  if (options_.store == nullptr) return;
  Json clients = Json::array();
  for (const auto& [_, c] : clients_) clients.push_back(c);
  Json resources = Json::array();
  for (const auto& [_, r] : resources_) resources.push_back(r);
  write_file_atomic(options_.store->data_dir() / std::string(kRegistrationsFile),
                    canonical_dump(Json{{"clients", clients}, {"resources", resources}}) + "\n");
}

void AuthorizationServer::persist_grant(const AccessGrant& grant, bool created) const {
  if (options_.store == nullptr) return;
  Json snapshot = Json::array();
  for (const auto& [_, g] : grants_) {
    if (g.user_id == grant.user_id) snapshot.push_back(g);
  }
  options_.store->put_snapshot(grant.user_id, kGrantsFile, snapshot);
  options_.store->append(grant.user_id,
                         created ? EventKind::GrantCreated : EventKind::GrantRevoked,
                         Json(grant));
}

void AuthorizationServer::load_state() {
  auto text = read_file(options_.store->data_dir() / std::string(kRegistrationsFile));
  try {
    if (text) {
      Json j = Json::parse(*text);
      for (const auto& c : j.at("clients")) {
        auto reg = c.get<ClientRegistration>();
        clients_.emplace(reg.client_id, std::move(reg));
      }
      for (const auto& r : j.at("resources")) {
        auto reg = r.get<ResourceRegistration>();
        resources_.emplace(reg.resource_id, std::move(reg));
      }
    }
    for (const auto& user : options_.store->users()) {
      auto grants = options_.store->get_snapshot(user, kGrantsFile);
      if (!grants) continue;
      for (const auto& g : *grants) {
        auto grant = g.get<AccessGrant>();
        grants_.emplace(grant.grant_id, std::move(grant));
      }
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::CorruptLog, std::string("authorization state unreadable: ") + e.what());
  }
}

// HTTP -----------------------------------------------------------------------

namespace {

Json parse_body(const httplib::Request& req) {
  try {
    return Json::parse(req.body);
  } catch (const std::exception&) {
    throw Error(Errc::InvalidRequest, "request body is not JSON");
  }
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      http::send_error(res, e);
    } catch (const std::exception& e) {
      http::send_error(res, Error(Errc::InvalidRequest, e.what()));
    }
  };
}

std::pair<std::string, std::string> user_credentials(const httplib::Request& req) {
  if (auto basic = http::basic_credentials(req)) return *basic;
  if (!req.body.empty()) {
    Json body = parse_body(req);
    return {body.value("username", ""), body.value("password", "")};
  }
  throw Error(Errc::Unauthorized, "user credentials required");
}

}  // namespace

void mount_authorization_routes(httplib::Server& server, AuthorizationServer& as,
                                std::string dashboard_origin) {
  if (!dashboard_origin.empty()) http::enable_cors(server, dashboard_origin);

  server.Get("/.well-known/openid-configuration",
             guarded([&as](const httplib::Request&, httplib::Response& res) {
               http::send_json(res, 200, as.discovery());
             }));

  server.Get("/keys", guarded([&as](const httplib::Request&, httplib::Response& res) {
               http::send_json(res, 200, as.jwks());
             }));

  server.Get("/authorize", guarded([&as](const httplib::Request& req, httplib::Response& res) {
               AuthorizationRequest ar;
               auto param = [&](const char* name, std::string& out) {
                 if (req.has_param(name)) out = req.get_param_value(name);
               };
               ar.response_type.clear();
               ar.code_challenge_method.clear();
               param("response_type", ar.response_type);
               param("client_id", ar.client_id);
               param("redirect_uri", ar.redirect_uri);
               param("scope", ar.scope);
               param("state", ar.state);
               param("code_challenge", ar.code_challenge);
               param("code_challenge_method", ar.code_challenge_method);
               param("resource", ar.resource);
               auto pending = as.authorize(ar);
               Json body = pending.to_json();
               body["consent_endpoint"] = as.issuer() + "/consent";
               http::send_json(res, 200, body);
             }));

  server.Post("/consent", guarded([&as](const httplib::Request& req, httplib::Response& res) {
                Json body = parse_body(req);
                ConsentDecision d;
                d.request_id = body.value("request_id", "");
                d.username = body.value("username", "");
                d.password = body.value("password", "");
                std::string decision = body.value("decision", "");
                if (decision != "approve" && decision != "deny") {
                  throw Error(Errc::InvalidRequest, "decision must be 'approve' or 'deny'");
                }
                d.approve = decision == "approve";
                if (body.contains("approved_scopes")) {
                  const auto& s = body.at("approved_scopes");
                  if (s.is_string()) {
                    d.approved_scopes = split_scopes(s.get<std::string>());
                  } else {
                    auto list = s.get<std::vector<std::string>>();
                    d.approved_scopes = std::set<std::string>(list.begin(), list.end());
                  }
                } else if (d.approve) {
                  // No list means everything that was asked for.
                  if (auto p = as.pending(d.request_id)) d.approved_scopes = p->scopes;
                }
                http::send_json(res, 200, Json{{"redirect_to", as.consent(d)}});
              }));

  server.Post("/token", guarded([&as](const httplib::Request& req, httplib::Response& res) {
                auto form = http::form_decode(req.body);
                TokenRequest tr;
                auto field = [&](const char* name) {
                  auto it = form.find(name);
                  return it == form.end() ? std::string() : it->second;
                };
                tr.grant_type = field("grant_type");
                tr.code = field("code");
                tr.redirect_uri = field("redirect_uri");
                tr.client_id = field("client_id");
                tr.code_verifier = field("code_verifier");
                if (form.count("client_secret")) tr.client_secret = field("client_secret");
                if (auto basic = http::basic_credentials(req)) {
                  if (!tr.client_id.empty() && tr.client_id != basic->first) {
                    throw Error(Errc::ClientAuthFailed, "conflicting client credentials");
                  }
                  tr.client_id = basic->first;
                  tr.client_secret = basic->second;
                }
                res.set_header("Cache-Control", "no-store");
                http::send_json(res, 200, as.exchange_code(tr).to_json());
              }));

  server.Post("/register/client",
              guarded([&as](const httplib::Request& req, httplib::Response& res) {
                http::send_json(res, 201, Json(as.register_client(parse_body(req))));
              }));

  server.Post("/register/resource",
              guarded([&as](const httplib::Request& req, httplib::Response& res) {
                auto token = http::bearer_token(req);
                http::send_json(res, 201, Json(as.register_resource(token, parse_body(req))));
              }));

  server.Get("/revocations", guarded([&as](const httplib::Request& req, httplib::Response& res) {
               std::optional<Timestamp> since;
               if (req.has_param("since")) {
                 since = parse_rfc3339(req.get_param_value("since"));
                 if (!since) throw Error(Errc::InvalidRequest, "since must be RFC 3339");
               }
               http::send_json(res, 200, as.revocations(since));
             }));

  server.Get("/grants", guarded([&as](const httplib::Request& req, httplib::Response& res) {
               auto [user, password] = user_credentials(req);
               Json list = Json::array();
               for (const auto& g : as.grants_for(user, password)) list.push_back(g);
               http::send_json(res, 200, Json{{"grants", list}});
             }));

  server.Post(R"(/grants/([0-9a-f]+)/revoke)",
              guarded([&as](const httplib::Request& req, httplib::Response& res) {
                auto [user, password] = user_credentials(req);
                http::send_json(res, 200, Json(as.revoke_grant(req.matches[1].str(), user, password)));
              }));
}

}  // namespace puda
