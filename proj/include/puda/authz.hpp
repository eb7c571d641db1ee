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

// The access-control agent: an OAuth 2.0 authorization server with
// discovery, dynamic registration, the authorization code flow with
// mandatory PKCE (S256), and Ed25519-signed access tokens that a resource
// server verifies with nothing but the published key set.

#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "puda/codec.hpp"
#include "puda/crypto.hpp"
#include "puda/time.hpp"

namespace httplib {
class Server;
}

namespace puda {

class Store;

// Tokens ---------------------------------------------------------------------

struct TokenClaims {
  std::string iss;
  std::string sub;  // user id
  std::string aud;  // resource id
  std::string client_id;
  std::set<std::string> scopes;
  Timestamp iat;
  Timestamp exp;
  std::string jti;
  std::string grant_id;

  bool has_scope(std::string_view scope) const { return scopes.count(std::string(scope)) > 0; }
  friend bool operator==(const TokenClaims&, const TokenClaims&) = default;
};

Json claims_to_json(const TokenClaims& claims);
TokenClaims claims_from_json(const Json& j);

/// Compact JWS (alg EdDSA, kid = key thumbprint).
std::string sign_token(const crypto::Ed25519Key& key, const TokenClaims& claims);

/// Public half of `key` as an OKP JSON Web Key.
Json public_jwk(const crypto::Ed25519Key& key);

/// Stateless verification for resource servers: holds the issuer's public
/// keys and a revocation set that the owner refreshes by polling.
class TokenVerifier {
 public:
  TokenVerifier(std::string issuer, std::string audience, Clock clock = system_clock());

  /// Replaces the key set from a JWKS document.
  void set_keys(const Json& jwks);
  /// Merges a revocation list ({"revoked": [{"grant_id", ...}]}).
  void add_revocations(const Json& list);
  void set_audience(std::string audience);
  std::string audience() const;

  /// Throws BadSignature, Expired, AudienceMismatch, RevokedGrant or
  /// Unauthorized (wrong issuer, malformed claims).
  TokenClaims verify(std::string_view token) const;

 private:
  std::string issuer_;
  Clock clock_;
  mutable std::mutex mutex_;
  std::string audience_;
  std::map<std::string, crypto::Ed25519Key> keys_;
  std::set<std::string> revoked_;
};

// Registrations and grants --------------------------------------------------

struct ClientRegistration {
  std::string client_id;
  std::optional<std::string> client_secret;  // absent for public clients
  std::vector<std::string> redirect_uris;
  std::string client_name;
  Timestamp registered_at;
};

struct ResourceRegistration {
  std::string resource_id;
  std::map<std::string, std::string> endpoint_map;  // scope -> absolute URI
  Timestamp registered_at;
};

enum class GrantStatus { Active, Revoked };

struct AccessGrant {
  std::string grant_id;
  std::string user_id;
  std::string client_id;
  std::set<std::string> scopes;
  std::string audience;
  Timestamp issued_at;
  Timestamp expires_at;
  GrantStatus status = GrantStatus::Active;
  std::optional<Timestamp> revoked_at;
};

void to_json(Json& j, const ClientRegistration& c);
void from_json(const Json& j, ClientRegistration& c);
void to_json(Json& j, const ResourceRegistration& r);
void from_json(const Json& j, ResourceRegistration& r);
void to_json(Json& j, const AccessGrant& g);
void from_json(const Json& j, AccessGrant& g);

// Flow messages --------------------------------------------------------------

struct AuthorizationRequest {
  std::string response_type = "code";
  std::string client_id;
  std::string redirect_uri;
  std::string scope;  // space-delimited
  std::string state;
  std::string code_challenge;
  std::string code_challenge_method = "S256";
  std::string resource;  // optional resource id
};

/// An authorization request waiting for the user's decision.
struct PendingAuthorization {
  std::string request_id;
  std::string client_id;
  std::string client_name;
  std::set<std::string> scopes;
  std::string redirect_uri;
  std::string state;
  std::string code_challenge;
  std::string audience;
  Timestamp expires_at;

  Json to_json() const;
};

struct ConsentDecision {
  std::string request_id;
  std::string username;
  std::string password;
  bool approve = false;
  std::set<std::string> approved_scopes;
};

struct TokenRequest {
  std::string grant_type = "authorization_code";
  std::string code;
  std::string redirect_uri;
  std::string client_id;
  std::optional<std::string> client_secret;
  std::string code_verifier;
};

struct TokenResponse {
  std::string access_token;
  std::int64_t expires_in = 0;
  std::set<std::string> scopes;
  std::string grant_id;

  Json to_json() const;
};

// Server ---------------------------------------------------------------------

struct AuthorizationServerOptions {
  std::string issuer;
  std::map<std::string, std::string> users;  // username -> password
  std::chrono::seconds code_ttl{120};
  std::chrono::seconds token_ttl{3600};
  std::chrono::seconds request_ttl{600};
  Clock clock = system_clock();
  /// When set, grants and token issuance are logged to the user's store and
  /// registrations persist in <data_dir>/registrations.json.
  Store* store = nullptr;
};

class AuthorizationServer {
 public:
  AuthorizationServer(AuthorizationServerOptions options, crypto::Ed25519Key key);

  const std::string& issuer() const noexcept { return options_.issuer; }
  Json discovery() const;
  Json jwks() const;

  /// Throws InvalidRedirectURI or InvalidRequest.
  ClientRegistration register_client(const Json& metadata);
  /// Requires a token carrying puda:register addressed to the issuer.
  ResourceRegistration register_resource(std::string_view bearer, const Json& body);

  /// Validates the request and parks it for consent. Throws UnknownClient,
  /// RedirectMismatch, InvalidScope or InvalidRequest; none of these may be
  /// turned into a redirect.
  PendingAuthorization authorize(const AuthorizationRequest& request);
  std::optional<PendingAuthorization> pending(std::string_view request_id) const;

  /// Records the user's decision and returns the redirect target: the
  /// client's redirect_uri carrying either code and state or
  /// error=access_denied and state. Throws Unauthorized for bad
  /// credentials, InvalidScope if approved scopes exceed the request.
  std::string consent(const ConsentDecision& decision);

  TokenResponse exchange_code(const TokenRequest& request);

  /// Full check including the live grant state.
  TokenClaims verify(std::string_view token, std::string_view audience) const;

  AccessGrant revoke_grant(std::string_view grant_id, std::string_view username,
                           std::string_view password);
  std::vector<AccessGrant> grants_for(std::string_view username, std::string_view password) const;
  std::optional<AccessGrant> grant(std::string_view grant_id) const;

  /// {"revoked": [{"grant_id", "revoked_at"}], "as_of"}; entries revoked at
  /// or after `since` when given.
  Json revocations(std::optional<Timestamp> since) const;

  /// Number of approval decisions recorded so far.
  std::size_t approval_count() const;

 private:
  struct CodeRecord {
    std::string client_id;
    std::string redirect_uri;
    std::string code_challenge;
    std::string grant_id;
    Timestamp expires_at;
    bool consumed = false;
  };

  void authenticate_user(std::string_view username, std::string_view password) const;
  void persist_registrations() const;
  void persist_grant(const AccessGrant& grant, bool created) const;
  void load_state();
  std::string audience_for(const std::set<std::string>& scopes,
                           const std::string& requested) const;
  void revoke_locked(AccessGrant& grant);

  AuthorizationServerOptions options_;
  crypto::Ed25519Key key_;
  std::string kid_;

  mutable std::mutex mutex_;
  std::map<std::string, ClientRegistration, std::less<>> clients_;
  std::map<std::string, ResourceRegistration, std::less<>> resources_;
  std::map<std::string, PendingAuthorization, std::less<>> pending_;
  std::map<std::string, CodeRecord, std::less<>> codes_;
  std::map<std::string, AccessGrant, std::less<>> grants_;
  std::size_t approvals_ = 0;
};

/// Mounts the HTTP endpoints:
///   GET  /.well-known/openid-configuration
///   GET  /authorize            -> pending request (JSON)
///   POST /consent              -> {"redirect_to": ...}
///   POST /token                (form-encoded)
///   POST /register/client
///   POST /register/resource    (bearer bootstrap token)
///   GET  /keys
///   GET  /revocations?since=
///   GET  /grants               (HTTP Basic user credentials)
///   POST /grants/<id>/revoke   (HTTP Basic user credentials)
void mount_authorization_routes(httplib::Server& server, AuthorizationServer& as,
                                std::string dashboard_origin = {});

}  // namespace puda
