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

// Both services in one process, talking to each other over loopback HTTP
// exactly as separately deployed services would.

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "puda/authz.hpp"
#include "puda/http_util.hpp"
#include "puda/provision.hpp"
#include "puda/store.hpp"
#include "puda/taxonomy.hpp"

namespace puda {

/// A directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(std::string_view prefix = "puda");
  ~ScratchDir();
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

struct DeploymentOptions {
  std::filesystem::path data_dir;
  std::string host = "127.0.0.1";
  int auth_port = 0;  // 0: any free port
  int data_port = 0;
  std::map<std::string, std::string> users;
  /// The user whose consent registers the dataset agent; first user when
  /// empty.
  std::string bootstrap_user;
  std::string recorder_secret;
  std::string dashboard_origin;
  /// Generated per run when unset.
  std::optional<std::filesystem::path> signing_key_file;
  std::chrono::milliseconds revocation_poll{30000};
  Clock auth_clock = system_clock();
  Clock data_clock = system_clock();
  unsigned parallelism = 4;
};

class LocalDeployment {
 public:
  /// Starts the authorization server and the dataset agent, connects the
  /// agent to the server, registers it through the code flow and starts
  /// revocation polling. Throws ServerSpawnFailure or FlowStepFailed.
  LocalDeployment(DeploymentOptions options, const CategoryTaxonomy& taxonomy,
                  BackendSet backends);
  ~LocalDeployment();

  Store& store() noexcept { return *store_; }
  AuthorizationServer& auth() noexcept { return *auth_; }
  ProvisionService& provision() noexcept { return *provision_; }
  const std::string& issuer() const noexcept { return issuer_; }
  const std::string& dataset_url() const noexcept { return dataset_url_; }
  const Transcript& bootstrap_transcript() const noexcept { return bootstrap_; }

 private:
  DeploymentOptions options_;
  std::unique_ptr<Store> store_;
  std::unique_ptr<AuthorizationServer> auth_;
  std::unique_ptr<ProvisionService> provision_;
  http::ServiceHost auth_host_;
  http::ServiceHost data_host_;
  std::string issuer_;
  std::string dataset_url_;
  Transcript bootstrap_;
};

}  // namespace puda
