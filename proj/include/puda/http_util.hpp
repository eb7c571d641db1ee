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

#pragma once

#include <httplib.h>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "puda/codec.hpp"

namespace puda::http {

struct Url {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path;  // includes query, always starts with '/'

  /// scheme://host:port
  std::string origin() const;
};

/// http and https URLs only.
std::optional<Url> parse_url(std::string_view text);

std::string url_encode(std::string_view value);
std::string url_decode(std::string_view value);

/// application/x-www-form-urlencoded, keys sorted.
std::string form_encode(const std::map<std::string, std::string>& fields);
std::map<std::string, std::string> form_decode(std::string_view body);

/// Appends query parameters to a URL that may already carry some.
std::string with_query(std::string url, const std::map<std::string, std::string>& params);

/// Value of "Authorization: Bearer <token>", or empty.
std::string bearer_token(const httplib::Request& req);

/// Username and password from "Authorization: Basic ...", if present.
std::optional<std::pair<std::string, std::string>> basic_credentials(
    const httplib::Request& req);

void send_json(httplib::Response& res, int status, const Json& body);

/// Allows browser calls from `origin` (answers preflights, tags responses).
void enable_cors(httplib::Server& server, std::string origin);

/// HTTP status for a library error code.
int http_status(Errc code);
/// OAuth 2.0 error string for a library error code.
std::string_view oauth_error(Errc code);
/// {"error", "error_description", "puda_error"} with the mapped status.
void send_error(httplib::Response& res, const Error& error);

/// Client for an origin ("http://host:port"). Throws TransportError for
/// non-http schemes.
std::unique_ptr<httplib::Client> make_client(const Url& url,
                                             std::chrono::milliseconds timeout);

/// Owns an httplib::Server running on a background thread. The server is
/// stopped and joined on destruction.
class ServiceHost {
 public:
  ServiceHost();
  ~ServiceHost();
  ServiceHost(const ServiceHost&) = delete;
  ServiceHost& operator=(const ServiceHost&) = delete;

  httplib::Server& server() { return *server_; }

  /// Binds and starts serving. `port` 0 picks a free port. Returns the
  /// bound port; throws ServerSpawnFailure.
  int start(const std::string& host, int port);
  /// The two halves of start(), for callers that need the port before
  /// mounting routes.
  int bind(const std::string& host, int port);
  void run();
  void stop();
  int port() const noexcept { return port_; }
  std::string origin() const;

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = 0;
};

}  // namespace puda::http
