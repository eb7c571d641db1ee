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

// The dataset agent's network face: recorder ingestion, explicit rebuilds,
// a public capability card and one scope-bound data endpoint per scope.
//
// Tokens are verified locally against the authorization server's published
// keys; revocations arrive by polling its revocation list.

#pragma once

#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "puda/authz.hpp"
#include "puda/backend.hpp"
#include "puda/oauth_client.hpp"
#include "puda/pipeline.hpp"
#include "puda/store.hpp"
#include "puda/taxonomy.hpp"

namespace httplib {
class Server;
}

namespace puda {

inline constexpr std::string_view kDefaultResourceId = "puda-dataset";

/// "/data/profile", "/data/categories/3", "/data/keywords/085",
/// "/data/history/long". Throws InvalidScopeString for non-data scopes.
std::string scope_endpoint_path(std::string_view scope);

struct ProvisionOptions {
  std::string issuer;          // authorization server
  std::string public_url;      // this service's origin, as advertised
  std::string resource_id{kDefaultResourceId};
  std::string recorder_secret;
  std::string dashboard_origin;
  std::chrono::milliseconds revocation_poll{30000};
  unsigned parallelism = 4;
  Clock clock = system_clock();
};

struct RebuildReport {
  std::string user_id;
  std::size_t pages_processed = 0;
  std::size_t pages_failed = 0;
  std::vector<PageFailure> failures;
  std::string dataset_version;

  Json to_json() const;
};

class ProvisionService {
 public:
  ProvisionService(Store& store, const CategoryTaxonomy& taxonomy, BackendSet backends,
                   ProvisionOptions options);
  ~ProvisionService();
  ProvisionService(const ProvisionService&) = delete;
  ProvisionService& operator=(const ProvisionService&) = delete;

  const ProvisionOptions& options() const noexcept { return options_; }
  void set_public_url(std::string url);

  Json capability_card() const;
  /// scope -> absolute endpoint URL, as registered with the authorization
  /// server.
  std::map<std::string, std::string> endpoint_map() const;

  /// Validates then appends; duplicates of (url, captured_at) are
  /// acknowledged with the original offset.
  Store::CaptureAppend ingest(const PageCapture& capture);
  void put_profile(const std::string& user_id, const Profile& profile);

  /// Rebuilds from every logged capture and swaps the served snapshot.
  /// Throws RebuildInProgress, MissingProfile.
  RebuildReport rebuild(const std::string& user_id);

  /// Canonical JSON of the scope's fragment for the token's subject.
  /// Throws the verifier's errors, InsufficientScope or NoDatasetBuilt.
  std::string get_data(std::string_view bearer, std::string_view scope);

  std::shared_ptr<const UserDataset> dataset(const std::string& user_id);

  TokenVerifier& verifier() noexcept { return verifier_; }

  /// Fetches discovery and the key set over HTTP.
  void connect_authorization_server(std::chrono::milliseconds timeout =
                                        std::chrono::milliseconds(5000));
  /// One revocation poll.
  void refresh_revocations();
  void start_revocation_poller();
  void stop_revocation_poller();

  /// Obtains a puda:register token through the code flow with the user's
  /// credentials and registers this service's endpoint map.
  ResourceRegistration register_with_authorization_server(const std::string& username,
                                                          const std::string& password,
                                                          Transcript* transcript = nullptr);

 private:
  Store& store_;
  const CategoryTaxonomy& taxonomy_;
  BackendSet backends_;
  ProvisionOptions options_;
  TokenVerifier verifier_;
  Json discovery_;

  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const UserDataset>> datasets_;
  std::set<std::string> rebuilding_;

  std::mutex poll_mutex_;
  std::string revocations_since_;
  std::jthread poller_;
  std::condition_variable_any poll_cv_;
};

/// Mounts:
///   POST /ingest/page              (recorder secret)
///   PUT  /ingest/profile/<user>    (recorder secret)
///   POST /rebuild/<user>           (recorder secret)
///   GET  /.well-known/puda-agent
///   GET  /data/profile | /data/categories/<k> | /data/keywords/<t> |
///        /data/history/<v>         (bearer token)
void mount_provision_routes(httplib::Server& server, ProvisionService& service);

}  // namespace puda
