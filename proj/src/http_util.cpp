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

#include "puda/http_util.hpp"

#include <cctype>

#include "puda/crypto.hpp"

namespace puda::http {

std::string Url::origin() const {
  return scheme + "://" + host + ":" + std::to_string(port);
}

std::optional<Url> parse_url(std::string_view text) {
  Url url;
  auto sep = text.find("://");
  if (sep == std::string_view::npos) return std::nullopt;
  url.scheme = std::string(text.substr(0, sep));
  for (auto& c : url.scheme) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (url.scheme != "http" && url.scheme != "https") return std::nullopt;
  auto rest = text.substr(sep + 3);
  auto path_start = rest.find_first_of("/?#");
  auto authority = rest.substr(0, path_start);
  if (authority.empty() || authority.find('@') != std::string_view::npos) {
    return std::nullopt;
  }
  url.path = path_start == std::string_view::npos ? "/" : std::string(rest.substr(path_start));
  if (auto hash = url.path.find('#'); hash != std::string::npos) url.path.resize(hash);
  if (url.path.empty() || url.path.front() != '/') url.path.insert(0, "/");

  int default_port = url.scheme == "https" ? 443 : 80;
  if (authority.front() == '[') {
    auto close = authority.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    url.host = std::string(authority.substr(1, close - 1));
    authority.remove_prefix(close + 1);
  } else {
    auto colon = authority.rfind(':');
    url.host = std::string(authority.substr(0, colon));
    authority.remove_prefix(colon == std::string_view::npos ? authority.size() : colon);
  }
  if (url.host.empty()) return std::nullopt;
  if (authority.empty()) {
    url.port = default_port;
  } else {
    if (authority.front() != ':' || authority.size() == 1) return std::nullopt;
    int port = 0;
    for (char c : authority.substr(1)) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      port = port * 10 + (c - '0');
      if (port > 65535) return std::nullopt;
    }
    url.port = port;
  }
  return url;
}

std::string url_encode(std::string_view value) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : value) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0x0F];
    }
  }
  return out;
}

std::string url_decode(std::string_view value) {
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    char c = value[i];
    if (c == '+') {
      out += ' ';
    } else if (c == '%' && i + 2 < value.size() && hex(value[i + 1]) >= 0 &&
               hex(value[i + 2]) >= 0) {
      out += static_cast<char>(hex(value[i + 1]) * 16 + hex(value[i + 2]));
      i += 2;
    } else {
      out += c;
    }
  }
  return out;
}

std::string form_encode(const std::map<std::string, std::string>& fields) {
  std::string out;
  for (const auto& [key, value] : fields) {
    if (!out.empty()) out += '&';
    out += url_encode(key);
    out += '=';
    out += url_encode(value);
  }
  return out;
}

std::map<std::string, std::string> form_decode(std::string_view body) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    auto end = body.find('&', pos);
    if (end == std::string_view::npos) end = body.size();
    auto pair = body.substr(pos, end - pos);
    if (!pair.empty()) {
      auto eq = pair.find('=');
      std::string key = url_decode(pair.substr(0, eq));
      std::string value = eq == std::string_view::npos ? "" : url_decode(pair.substr(eq + 1));
      out.emplace(std::move(key), std::move(value));
    }
    pos = end + 1;
  }
  return out;
}

std::string with_query(std::string url, const std::map<std::string, std::string>& params) {
  if (params.empty()) return url;
  url += url.find('?') == std::string::npos ? '?' : '&';
  url += form_encode(params);
  return url;
}

std::string bearer_token(const httplib::Request& req) {
  auto header = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (header.size() <= kPrefix.size()) return {};
  for (std::size_t i = 0; i < kPrefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(header[i])) !=
        std::tolower(static_cast<unsigned char>(kPrefix[i]))) {
      return {};
    }
  }
  return header.substr(kPrefix.size());
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(canonical_dump(body), "application/json; charset=utf-8");
}

std::unique_ptr<httplib::Client> make_client(const Url& url,
                                             std::chrono::milliseconds timeout) {
  if (url.scheme != "http") {
    throw Error(Errc::TransportError, "only http endpoints are supported: " + url.origin());
  }
  auto client = std::make_unique<httplib::Client>(url.host, url.port);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client->set_connection_timeout(secs.count(), usecs.count());
  client->set_read_timeout(secs.count(), usecs.count());
  client->set_write_timeout(secs.count(), usecs.count());
  return client;
}

ServiceHost::ServiceHost() : server_(std::make_unique<httplib::Server>()) {}

ServiceHost::~ServiceHost() { stop(); }

int ServiceHost::start(const std::string& host, int port) {
  bind(host, port);
  run();
  return port_;
}

int ServiceHost::bind(const std::string& host, int port) {
  host_ = host;
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ <= 0) {
    throw Error(Errc::ServerSpawnFailure,
                "cannot bind " + host + ":" + std::to_string(port));
  }
  return port_;
}

void ServiceHost::run() {
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void ServiceHost::stop() {
  if (thread_.joinable()) {
    server_->stop();
    thread_.join();
  }
}

std::string ServiceHost::origin() const {
  return "http://" + host_ + ":" + std::to_string(port_);
}

std::optional<std::pair<std::string, std::string>> basic_credentials(
    const httplib::Request& req) {
  auto header = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Basic ";
  if (header.size() <= kPrefix.size() || header.compare(0, kPrefix.size(), kPrefix) != 0) {
    return std::nullopt;
  }
  std::string encoded = header.substr(kPrefix.size());
  while (!encoded.empty() && encoded.back() == '=') encoded.pop_back();
  for (auto& c : encoded) {
    if (c == '+') c = '-';
    else if (c == '/') c = '_';
  }
  auto decoded = crypto::base64url_decode(encoded);
  if (!decoded) return std::nullopt;
  auto colon = decoded->find(':');
  if (colon == std::string::npos) return std::nullopt;
  // RFC 6749 2.3.1: client credentials are form-encoded before Basic.
  return std::pair{url_decode(decoded->substr(0, colon)), url_decode(decoded->substr(colon + 1))};
}

void enable_cors(httplib::Server& server, std::string origin) {
  server.set_post_routing_handler([origin](const httplib::Request& req, httplib::Response& res) {
    if (req.get_header_value("Origin") == origin) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
    }
  });
  server.Options(".*", [origin](const httplib::Request& req, httplib::Response& res) {
    if (req.get_header_value("Origin") != origin) {
      res.status = 403;
      return;
    }
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Authorization, Content-Type");
    res.set_header("Access-Control-Max-Age", "600");
    res.status = 204;
  });
}

int http_status(Errc code) {
  switch (code) {
    case Errc::Unauthorized:
    case Errc::BadSignature:
    case Errc::Expired:
    case Errc::RevokedGrant:
    case Errc::AudienceMismatch:
    case Errc::ClientAuthFailed:
      return 401;
    case Errc::AccessDenied:
    case Errc::InsufficientScope:
      return 403;
    case Errc::UnknownGrant:
    case Errc::NoDatasetBuilt:
    case Errc::MissingDataset:
      return 404;
    case Errc::RebuildInProgress:
      return 409;
    case Errc::StorageFull:
      return 507;
    case Errc::CorruptLog:
    case Errc::IoError:
    case Errc::ServerSpawnFailure:
      return 500;
    case Errc::Timeout:
    case Errc::TransportError:
    case Errc::MalformedResponse:
      return 502;
    default:
      return 400;
  }
}

std::string_view oauth_error(Errc code) {
  switch (code) {
    case Errc::InvalidRedirectURI: return "invalid_redirect_uri";
    case Errc::InvalidScopeString: return "invalid_client_metadata";
    case Errc::UnknownClient:
    case Errc::ClientAuthFailed: return "invalid_client";
    case Errc::InvalidScope: return "invalid_scope";
    case Errc::AccessDenied: return "access_denied";
    case Errc::InvalidCode:
    case Errc::CodeReplay:
    case Errc::PKCEMismatch: return "invalid_grant";
    case Errc::Unauthorized:
    case Errc::BadSignature:
    case Errc::Expired:
    case Errc::RevokedGrant:
    case Errc::AudienceMismatch: return "invalid_token";
    case Errc::InsufficientScope: return "insufficient_scope";
    case Errc::UnknownGrant:
    case Errc::NoDatasetBuilt:
    case Errc::MissingDataset: return "not_found";
    case Errc::RebuildInProgress: return "conflict";
    case Errc::StorageFull: return "insufficient_storage";
    default: return http_status(code) >= 500 ? "server_error" : "invalid_request";
  }
}

void send_error(httplib::Response& res, const Error& error) {
  int status = http_status(error.code());
  if (status == 401) {
    res.set_header("WWW-Authenticate",
                   "Bearer error=\"" + std::string(oauth_error(error.code())) + "\"");
  }
  send_json(res, status,
            Json{{"error", oauth_error(error.code())},
                 {"error_description", error.what()},
                 {"puda_error", errc_name(error.code())}});
}

}  // namespace puda::http

