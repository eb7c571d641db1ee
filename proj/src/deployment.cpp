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

#include "puda/deployment.hpp"

#include "puda/crypto.hpp"

namespace puda {

ScratchDir::ScratchDir(std::string_view prefix) {
  path_ = std::filesystem::temp_directory_path() /
          (std::string(prefix) + "-" + crypto::random_hex(8));
  std::filesystem::create_directories(path_);
}

ScratchDir::~ScratchDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

LocalDeployment::LocalDeployment(DeploymentOptions options, const CategoryTaxonomy& taxonomy,
                                 BackendSet backends)
    : options_(std::move(options)) {
  if (options_.users.empty()) throw Error(Errc::InvalidArgument, "deployment needs a user");
  std::string bootstrap_user =
      options_.bootstrap_user.empty() ? options_.users.begin()->first : options_.bootstrap_user;
  if (!options_.users.count(bootstrap_user)) {
    throw Error(Errc::InvalidArgument, "bootstrap user is not configured");
  }

  store_ = std::make_unique<Store>(options_.data_dir, options_.data_clock);

  int auth_port = auth_host_.bind(options_.host, options_.auth_port);
  issuer_ = "http://" + options_.host + ":" + std::to_string(auth_port);
  AuthorizationServerOptions as_options;
  as_options.issuer = issuer_;
  as_options.users = options_.users;
  as_options.clock = options_.auth_clock;
  as_options.store = store_.get();
  auto key = options_.signing_key_file
                 ? crypto::Ed25519Key::load_or_create(*options_.signing_key_file)
                 : crypto::Ed25519Key::generate();
  auth_ = std::make_unique<AuthorizationServer>(std::move(as_options), std::move(key));
  mount_authorization_routes(auth_host_.server(), *auth_, options_.dashboard_origin);
  auth_host_.run();

  int data_port = data_host_.bind(options_.host, options_.data_port);
  dataset_url_ = "http://" + options_.host + ":" + std::to_string(data_port);
  ProvisionOptions p;
  p.issuer = issuer_;
  p.public_url = dataset_url_;
  p.recorder_secret = options_.recorder_secret;
  p.dashboard_origin = options_.dashboard_origin;
  p.revocation_poll = options_.revocation_poll;
  p.parallelism = options_.parallelism;
  p.clock = options_.data_clock;
  provision_ = std::make_unique<ProvisionService>(*store_, taxonomy, std::move(backends), p);
  mount_provision_routes(data_host_.server(), *provision_);
  data_host_.run();

  provision_->connect_authorization_server();
  provision_->register_with_authorization_server(bootstrap_user,
                                                 options_.users.at(bootstrap_user), &bootstrap_);
  provision_->start_revocation_poller();
}

LocalDeployment::~LocalDeployment() {
  if (provision_) provision_->stop_revocation_poller();
  data_host_.stop();
  auth_host_.stop();
}

}  // namespace puda
