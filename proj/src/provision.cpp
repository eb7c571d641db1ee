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

#include "puda/provision.hpp"

#include "puda/crypto.hpp"
#include "puda/http_util.hpp"

namespace puda {

namespace {

std::string scope_description(const GranularityCondition& c) {
  using Kind = GranularityCondition::Kind;
  switch (c.kind()) {
    case Kind::ProfileOnly:
      return "Static profile: age, date of birth, gender, address, name";
    case Kind::Categories:
      return "Interest categories from the predefined taxonomy, tier " + std::to_string(c.tier());
    case Kind::Keywords:
      return "Keywords with sentiment, score >= " +
             std::string(threshold_code(c.threshold())).insert(1, ".");
    case Kind::History:
      return c.variant() == SummaryVariant::Long
                 ? "Browsing history with long page summaries"
                 : "Browsing history with short page summaries";
    default:
      return "";
  }
}

// Releases the per-user rebuild slot.
class RebuildSlot {
 public:
  RebuildSlot(std::mutex& mutex, std::set<std::string>& running, std::string user)
      : mutex_(mutex), running_(running), user_(std::move(user)) {
    std::lock_guard lock(mutex_);
    if (!running_.insert(user_).second) {
      throw Error(Errc::RebuildInProgress, "a rebuild for '" + user_ + "' is already running");
    }
  }
  ~RebuildSlot() {
    std::lock_guard lock(mutex_);
    running_.erase(user_);
  }

 private:
  std::mutex& mutex_;
  std::set<std::string>& running_;
  std::string user_;
};

Json fetch_json(const std::string& url, std::chrono::milliseconds timeout) {
  auto parsed = http::parse_url(url);
  if (!parsed) throw Error(Errc::TransportError, "bad URL " + url);
  auto client = http::make_client(*parsed, timeout);
  auto res = client->Get(parsed->path);
  if (!res) {
    throw Error(Errc::TransportError, "GET " + url + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(Errc::TransportError, "GET " + url + ": HTTP " + std::to_string(res->status));
  }
  try {
    return Json::parse(res->body);
  } catch (const std::exception& e) {
    throw Error(Errc::MalformedResponse, "GET " + url + ": " + e.what());
  }
}

ProvisionOptions normalized(ProvisionOptions o) {
  while (!o.issuer.empty() && o.issuer.back() == '/') o.issuer.pop_back();
  while (!o.public_url.empty() && o.public_url.back() == '/') o.public_url.pop_back();
  return o;
}

}  // namespace

std::string scope_endpoint_path(std::string_view scope) {
  auto condition = scope_condition(scope);
  if (!condition) throw Error(Errc::InvalidScopeString, "not a data scope: " + std::string(scope));
  using Kind = GranularityCondition::Kind;
  switch (condition->kind()) {
    case Kind::Categories: return "/data/categories/" + std::to_string(condition->tier());
    case Kind::Keywords: return "/data/keywords/" + std::string(threshold_code(condition->threshold()));
    case Kind::History: return "/data/history/" + std::string(variant_name(condition->variant()));
    default: return "/data/profile";
  }
}

Json RebuildReport::to_json() const {
  Json failed = Json::array();
  for (const auto& f : failures) {
    failed.push_back(Json{{"url", f.ref.url},
                          {"captured_at", timestamp_json(f.ref.captured_at)},
                          {"error", errc_name(f.code)},
                          {"message", f.message}});
  }
  return Json{{"user_id", user_id},
              {"pages_processed", pages_processed},
              {"pages_failed", pages_failed},
              {"failures", failed},
              {"dataset_version", dataset_version}};
}

ProvisionService::ProvisionService(Store& store, const CategoryTaxonomy& taxonomy,
                                   BackendSet backends, ProvisionOptions options)
    : store_(store),
      taxonomy_(taxonomy),
      backends_(std::move(backends)),
      options_(normalized(std::move(options))),
      verifier_(options_.issuer, options_.resource_id, options_.clock) {}

ProvisionService::~ProvisionService() { stop_revocation_poller(); }

void ProvisionService::set_public_url(std::string url) {
  while (!url.empty() && url.back() == '/') url.pop_back();
  options_.public_url = std::move(url);
}

std::map<std::string, std::string> ProvisionService::endpoint_map() const {
  std::map<std::string, std::string> out;
  for (const auto& scope : data_scopes()) {
    out[scope] = options_.public_url + scope_endpoint_path(scope);
  }
  return out;
}

Json ProvisionService::capability_card() const {
  Json endpoints = Json::object();
  for (const auto& scope : data_scopes()) {
    endpoints[scope] = Json{{"path", scope_endpoint_path(scope)},
                            {"description", scope_description(*scope_condition(scope))}};
  }
  return Json{{"agent_name", "puda-dataset-agent"},
              {"version", kPipelineVersion},
              {"url", options_.public_url},
              {"resource_id", options_.resource_id},
              {"authorization_server", options_.issuer},
              {"provision_endpoints", endpoints}};
}

Store::CaptureAppend ProvisionService::ingest(const PageCapture& capture) {
  validate_capture(capture, options_.clock());
  return store_.append_capture(capture);
}

void ProvisionService::put_profile(const std::string& user_id, const Profile& profile) {
  store_.put_profile(user_id, profile);
}

RebuildReport ProvisionService::rebuild(const std::string& user_id) {
  if (!is_valid_user_id(user_id)) throw Error(Errc::InvalidUserId, "invalid user id");
  RebuildSlot slot(mutex_, rebuilding_, user_id);
  auto profile = store_.get_profile(user_id);
  if (!profile) throw Error(Errc::MissingProfile, "no profile stored for '" + user_id + "'");
  auto captures = store_.load_captures(user_id);
  auto outcome = process_pages(captures, backends_, options_.parallelism);
  auto dataset = build_dataset(user_id, *profile, outcome.records, taxonomy_, backends_,
                               options_.clock());
  store_.put_dataset(user_id, dataset);

  RebuildReport report;
  report.user_id = user_id;
  report.pages_processed = outcome.records.size();
  report.pages_failed = outcome.failures.size();
  report.failures = std::move(outcome.failures);
  report.dataset_version = dataset_version(dataset);
  auto shared = std::make_shared<const UserDataset>(std::move(dataset));
  std::lock_guard lock(mutex_);
  datasets_[user_id] = std::move(shared);
  return report;
}

std::shared_ptr<const UserDataset> ProvisionService::dataset(const std::string& user_id) {
  {
    std::lock_guard lock(mutex_);
    auto it = datasets_.find(user_id);
    if (it != datasets_.end()) return it->second;
  }
  auto stored = store_.get_dataset(user_id);
  if (!stored) return nullptr;
  auto shared = std::make_shared<const UserDataset>(std::move(*stored));
  std::lock_guard lock(mutex_);
  // A concurrent rebuild may have published a newer snapshot meanwhile.
  auto [it, _] = datasets_.try_emplace(user_id, std::move(shared));
  return it->second;
}

std::string ProvisionService::get_data(std::string_view bearer, std::string_view scope) {
  if (bearer.empty()) throw Error(Errc::Unauthorized, "bearer token required");
  auto claims = verifier_.verify(bearer);
  if (!claims.has_scope(scope)) {
    throw Error(Errc::InsufficientScope, "requires scope " + std::string(scope));
  }
  auto ds = is_valid_user_id(claims.sub) ? dataset(claims.sub) : nullptr;
  if (!ds) throw Error(Errc::NoDatasetBuilt, "no dataset built for this user");
  return canonical_dump(scope_fragment(*ds, scope));
}

void ProvisionService::connect_authorization_server(std::chrono::milliseconds timeout) {
  Json discovery = fetch_json(options_.issuer + "/.well-known/openid-configuration", timeout);
  if (discovery.value("issuer", "") != options_.issuer) {
    throw Error(Errc::Unauthorized, "discovery document names another issuer");
  }
  verifier_.set_keys(fetch_json(discovery.at("jwks_uri").get<std::string>(), timeout));
  std::lock_guard lock(poll_mutex_);
  discovery_ = std::move(discovery);
}

void ProvisionService::refresh_revocations() {
  std::string url;
  {
    std::lock_guard lock(poll_mutex_);
    url = discovery_.value("revocation_list_endpoint", options_.issuer + "/revocations");
    if (!revocations_since_.empty()) url = http::with_query(url, {{"since", revocations_since_}});
  }
  Json list = fetch_json(url, std::chrono::milliseconds(5000));
  verifier_.add_revocations(list);
  std::lock_guard lock(poll_mutex_);
  revocations_since_ = list.value("as_of", "");
}

void ProvisionService::start_revocation_poller() {
  if (poller_.joinable()) return;
  poller_ = std::jthread([this](std::stop_token stop) {
    std::mutex wait_mutex;
    while (!stop.stop_requested()) {
      try {
        bool connected;
        {
          std::lock_guard lock(poll_mutex_);
          connected = !discovery_.is_null();
        }
        if (!connected) connect_authorization_server();
        refresh_revocations();
      } catch (const std::exception&) {
        // Unreachable issuer: keep serving with what we have, retry next tick.
      }
      std::unique_lock lock(wait_mutex);
      poll_cv_.wait_for(lock, stop, options_.revocation_poll, [] { return false; });
    }
  });
}

void ProvisionService::stop_revocation_poller() {
  if (poller_.joinable()) {
    poller_.request_stop();
    poller_.join();
  }
}

ResourceRegistration ProvisionService::register_with_authorization_server(
    const std::string& username, const std::string& password, Transcript* transcript) {
  Transcript local;
  Transcript& t = transcript ? *transcript : local;
  OAuthFlowOptions flow;
  flow.issuer = options_.issuer;
  flow.client_name = "puda-dataset-agent";
  flow.scopes = {std::string(kRegisterScope)};
  flow.username = username;
  flow.password = password;
  auto token = run_authorization_flow(flow, t);

  Json body{{"resource_id", options_.resource_id}, {"endpoint_map", endpoint_map()}};
  auto url = token.discovery.at("resource_registration_endpoint").get<std::string>();
  auto [status, reply] = transcribed_request(t, "register_resource", "POST", url,
                                             token.access_token, body);
  if (status != 201) {
    throw FlowStepError("register_resource", status, reply.dump(),
                        reply.is_object() ? reply.value("error", "") : "");
  }
  return reply.get<ResourceRegistration>();
}

// HTTP -----------------------------------------------------------------------

namespace {

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const InvalidCaptureError& e) {
      http::send_error(res, e);
      Json body = Json::parse(res.body);
      body["field"] = e.field();
      http::send_json(res, 400, body);
    } catch (const Error& e) {
      http::send_error(res, e);
    } catch (const std::exception& e) {
      http::send_error(res, Error(Errc::InvalidRequest, e.what()));
    }
  };
}

void require_recorder(const httplib::Request& req, const ProvisionService& service) {
  const auto& secret = service.options().recorder_secret;
  auto presented = http::bearer_token(req);
  if (secret.empty() || presented.empty() || !crypto::equal_secrets(secret, presented)) {
    throw Error(Errc::Unauthorized, "recorder credential missing or wrong");
  }
}

Json parse_body(const httplib::Request& req) {
  try {
    return Json::parse(req.body);
  } catch (const std::exception&) {
    throw Error(Errc::InvalidRequest, "request body is not JSON");
  }
}

void send_canonical(httplib::Response& res, const std::string& body) {
  res.status = 200;
  res.set_content(body, "application/json; charset=utf-8");
}

}  // namespace

void mount_provision_routes(httplib::Server& server, ProvisionService& service) {
  if (!service.options().dashboard_origin.empty()) {
    http::enable_cors(server, service.options().dashboard_origin);
  }

  server.Post("/ingest/page", guarded([&service](const httplib::Request& req,
                                                 httplib::Response& res) {
                require_recorder(req, service);
                Json body = parse_body(req);
                if (!body.is_object()) throw InvalidCaptureError("body", "must be a JSON object");
                auto result = service.ingest(body.get<PageCapture>());
                http::send_json(res, 200,
                                Json{{"offset", result.offset}, {"duplicate", result.duplicate}});
              }));

  server.Put(R"(/ingest/profile/([A-Za-z0-9._-]+))",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               require_recorder(req, service);
               Profile profile;
               try {
                 profile = parse_body(req).get<Profile>();
               } catch (const Error&) {
                 throw;
               } catch (const std::exception& e) {
                 throw Error(Errc::InvalidRequest, std::string("bad profile: ") + e.what());
               }
               service.put_profile(req.matches[1].str(), profile);
               http::send_json(res, 200, Json{{"user_id", req.matches[1].str()}});
             }));

  server.Post(R"(/rebuild/([A-Za-z0-9._-]+))",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                require_recorder(req, service);
                http::send_json(res, 200, service.rebuild(req.matches[1].str()).to_json());
              }));

  server.Get("/.well-known/puda-agent",
             guarded([&service](const httplib::Request&, httplib::Response& res) {
               send_canonical(res, canonical_dump(service.capability_card()));
             }));

  auto data_route = [&service](const std::string& scope_prefix) {
    return guarded([&service, scope_prefix](const httplib::Request& req, httplib::Response& res) {
      std::string scope = scope_prefix;
      if (req.matches.size() > 1) scope += ":" + req.matches[1].str();
      if (!is_data_scope(scope)) throw Error(Errc::NoDatasetBuilt, "no such endpoint");
      send_canonical(res, service.get_data(http::bearer_token(req), scope));
    });
  };
  server.Get("/data/profile", data_route(std::string(kProfileScope)));
  server.Get(R"(/data/categories/([123]))", data_route("puda:categories"));
  server.Get(R"(/data/keywords/(090|085|080|075))", data_route("puda:keywords"));
  server.Get(R"(/data/history/(short|long))", data_route("puda:history"));
}

}  // namespace puda
