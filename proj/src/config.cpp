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

#include "puda/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

#include "puda/error.hpp"

namespace puda {

namespace {

std::optional<std::string> env(const char* name) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::string(value);
}

}  // namespace

ListenAddress parse_listen_address(std::string_view text) {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(Errc::InvalidArgument, "listen address must be host:port");
  }
  ListenAddress addr;
  addr.host = std::string(text.substr(0, colon));
  auto digits = text.substr(colon + 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), addr.port);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || addr.port < 0 ||
      addr.port > 65535) {
    throw Error(Errc::InvalidArgument, "bad port in listen address: " + std::string(text));
  }
  return addr;
}

std::filesystem::path default_taxonomy_path() {
  if (auto dir = env("PUDA_RESOURCE_DIR")) return std::filesystem::path(*dir) / "taxonomy" / "sample_taxonomy.txt";
  return std::filesystem::path(PUDA_DEFAULT_DATA_DIR) / "taxonomy" / "sample_taxonomy.txt";
}

std::string Config::data_public_url() const {
  if (!public_url.empty()) return public_url;
  return "http://" + data_listen.host + ":" + std::to_string(data_listen.port);
}

std::filesystem::path Config::signing_key_path() const {
  return signing_key_file.empty() ? data_dir / "signing_key.pem" : signing_key_file;
}

std::filesystem::path Config::taxonomy_path() const {
  return taxonomy_file.empty() ? default_taxonomy_path() : taxonomy_file;
}

void Config::merge(const Json& j) {
  if (!j.is_object()) throw Error(Errc::InvalidArgument, "config must be a JSON object");
  try {
    if (j.contains("data_dir")) data_dir = j["data_dir"].get<std::string>();
    if (j.contains("issuer")) issuer = j["issuer"].get<std::string>();
    if (j.contains("auth_issuer")) auth_issuer = j["auth_issuer"].get<std::string>();
    if (j.contains("auth_listen")) auth_listen = parse_listen_address(j["auth_listen"].get<std::string>());
    if (j.contains("data_listen")) data_listen = parse_listen_address(j["data_listen"].get<std::string>());
    if (j.contains("public_url")) public_url = j["public_url"].get<std::string>();
    if (j.contains("signing_key_file")) signing_key_file = j["signing_key_file"].get<std::string>();
    if (j.contains("recorder_secret")) recorder_secret = j["recorder_secret"].get<std::string>();
    if (j.contains("dashboard_origin")) dashboard_origin = j["dashboard_origin"].get<std::string>();
    if (j.contains("users")) users = j["users"].get<std::map<std::string, std::string>>();
    if (j.contains("taxonomy_file")) taxonomy_file = j["taxonomy_file"].get<std::string>();
    if (j.contains("revocation_poll_ms")) {
      revocation_poll = std::chrono::milliseconds(j["revocation_poll_ms"].get<std::int64_t>());
    }
    if (j.contains("backend")) backend = j["backend"];
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("bad config value: ") + e.what());
  }
}

void Config::apply_environment() {
  if (auto v = env("PUDA_DATA_DIR")) data_dir = *v;
  if (auto v = env("PUDA_ISSUER")) issuer = *v;
  if (auto v = env("PUDA_AUTH_ISSUER")) auth_issuer = *v;
  if (auto v = env("PUDA_AUTH_LISTEN_ADDR")) auth_listen = parse_listen_address(*v);
  if (auto v = env("PUDA_LISTEN_ADDR")) data_listen = parse_listen_address(*v);
  if (auto v = env("PUDA_PUBLIC_URL")) public_url = *v;
  if (auto v = env("PUDA_SIGNING_KEY_FILE")) signing_key_file = *v;
  if (auto v = env("PUDA_RECORDER_SECRET")) recorder_secret = *v;
  if (auto v = env("PUDA_DASHBOARD_ORIGIN")) dashboard_origin = *v;
  if (auto v = env("PUDA_TAXONOMY_FILE")) taxonomy_file = *v;
  if (auto v = env("PUDA_REVOCATION_POLL_MS")) {
    std::int64_t ms = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), ms);
    if (ec != std::errc() || ptr != v->data() + v->size() || ms <= 0) {
      throw Error(Errc::InvalidArgument, "PUDA_REVOCATION_POLL_MS must be a positive integer");
    }
    revocation_poll = std::chrono::milliseconds(ms);
  }
  if (auto v = env("PUDA_USERS")) {
    users.clear();
    std::string_view rest = *v;
    while (!rest.empty()) {
      auto comma = rest.find(',');
      auto entry = rest.substr(0, comma);
      auto colon = entry.find(':');
      if (colon == std::string_view::npos || colon == 0) {
        throw Error(Errc::InvalidArgument, "PUDA_USERS entries must be name:password");
      }
      users[std::string(entry.substr(0, colon))] = std::string(entry.substr(colon + 1));
      rest = comma == std::string_view::npos ? std::string_view() : rest.substr(comma + 1);
    }
  }
}

Config Config::load(std::optional<std::filesystem::path> file) {
  Config config;
  if (!file) {
    if (auto v = env("PUDA_CONFIG")) file = *v;
  }
  if (file) {
    std::ifstream in(*file);
    if (!in) throw Error(Errc::InvalidArgument, "cannot read config " + file->string());
    try {
      config.merge(Json::parse(in));
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(Errc::InvalidArgument, "config " + file->string() + ": " + e.what());
    }
  }
  config.apply_environment();
  return config;
}

}  // namespace puda
