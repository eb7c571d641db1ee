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

// Client side of the authorization code flow over HTTP, with a transcript
// of every exchange for audit. Consent is given programmatically with the
// user's credentials, standing in for the dashboard.

#pragma once

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "puda/codec.hpp"
#include "puda/error.hpp"

namespace puda {

struct FlowStep {
  std::string step;
  std::string method;
  std::string url;
  Json request;   // secrets redacted
  int status = 0;
  Json response;  // body, or {"raw": text} when not JSON
};

struct Transcript {
  std::vector<FlowStep> steps;
  Json to_json() const;
};

/// A flow step failed; names the step and carries the server's error.
class FlowStepError : public Error {
 public:
  FlowStepError(std::string step, int status, const std::string& detail,
                std::string server_error = {})
      : Error(Errc::FlowStepFailed, step + " failed (HTTP " + std::to_string(status) + "): " + detail),
        step_(std::move(step)),
        status_(status),
        server_error_(std::move(server_error)) {}
  const std::string& step() const noexcept { return step_; }
  int status() const noexcept { return status_; }
  /// The "error" member of the server response, e.g. "invalid_scope".
  const std::string& server_error() const noexcept { return server_error_; }

 private:
  std::string step_;
  int status_;
  std::string server_error_;
};

struct OAuthFlowOptions {
  std::string issuer;
  std::string client_name = "puda-client";
  std::string redirect_uri = "http://127.0.0.1/callback";
  bool public_client = true;
  std::set<std::string> scopes;
  std::string resource;  // optional
  std::string username;
  std::string password;
  bool approve = true;
  /// Subset to approve; all requested scopes when empty.
  std::set<std::string> approved_scopes;
  std::chrono::milliseconds timeout{10000};
};

struct OAuthFlowResult {
  Json discovery;
  std::string client_id;
  std::optional<std::string> client_secret;
  std::string access_token;
  std::set<std::string> scopes;
  std::string grant_id;
  std::int64_t expires_in = 0;
};

/// Generates a fresh PKCE verifier (43 characters).
std::string make_code_verifier();

/// discovery -> client registration -> authorize -> consent -> token.
/// Throws FlowStepError naming the failed step.
OAuthFlowResult run_authorization_flow(const OAuthFlowOptions& options, Transcript& transcript);

/// Performs one JSON request and records it. Returns {status, body}.
std::pair<int, Json> transcribed_request(Transcript& transcript, const std::string& step,
                                         const std::string& method, const std::string& url,
                                         const std::string& bearer = {},
                                         const std::optional<Json>& body = std::nullopt,
                                         std::chrono::milliseconds timeout =
                                             std::chrono::milliseconds(10000));

}  // namespace puda
