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

// Runtime configuration: an optional JSON file, then environment overrides.
//
//   PUDA_CONFIG             path of the JSON file
//   PUDA_DATA_DIR           store root
//   PUDA_ISSUER             authorization server issuer URL
//   PUDA_AUTH_ISSUER        issuer the dataset agent trusts (default PUDA_ISSUER)
//   PUDA_AUTH_LISTEN_ADDR   host:port for the authorization server
//   PUDA_LISTEN_ADDR        host:port for the dataset agent
//   PUDA_PUBLIC_URL         dataset agent origin as advertised
//   PUDA_SIGNING_KEY_FILE   Ed25519 PEM, created if missing
//   PUDA_RECORDER_SECRET    bearer secret for ingestion
//   PUDA_DASHBOARD_ORIGIN   origin allowed by CORS
//   PUDA_USERS              "name:password,name:password"
//   PUDA_TAXONOMY_FILE      category taxonomy
//   PUDA_REVOCATION_POLL_MS revocation list polling interval

#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "puda/codec.hpp"

namespace puda {

struct ListenAddress {
  std::string host = "127.0.0.1";
  int port = 0;
};

/// "host:port"; throws InvalidArgument.
ListenAddress parse_listen_address(std::string_view text);

struct Config {
  std::filesystem::path data_dir = "puda-data";
  std::string issuer = "http://127.0.0.1:8600";
  std::string auth_issuer;  // empty: same as issuer
  ListenAddress auth_listen{"127.0.0.1", 8600};
  ListenAddress data_listen{"127.0.0.1", 8601};
  std::string public_url;  // empty: derived from data_listen
  std::filesystem::path signing_key_file;  // empty: <data_dir>/signing_key.pem
  std::string recorder_secret;
  std::string dashboard_origin;
  std::map<std::string, std::string> users;
  std::filesystem::path taxonomy_file;  // empty: bundled sample taxonomy
  std::chrono::milliseconds revocation_poll{30000};
  Json backend = Json::object();  // see BackendSet::from_config

  std::string trusted_issuer() const { return auth_issuer.empty() ? issuer : auth_issuer; }
  std::string data_public_url() const;
  std::filesystem::path signing_key_path() const;
  std::filesystem::path taxonomy_path() const;

  /// Reads `file` (or $PUDA_CONFIG) when given, then applies the
  /// environment. Throws InvalidArgument on malformed values.
  static Config load(std::optional<std::filesystem::path> file = std::nullopt);
  /// Applies one JSON object on top of the current values.
  void merge(const Json& j);
  void apply_environment();
};

/// The sample taxonomy shipped with the library.
std::filesystem::path default_taxonomy_path();

}  // namespace puda
