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

#include <doctest.h>

#include <random>
#include <thread>

#include "puda/authz.hpp"
#include "puda/http_util.hpp"
#include "puda/oauth_client.hpp"
#include "puda/store.hpp"
#include "test_support.hpp"

using namespace puda;
using namespace puda::testing;

namespace {

constexpr const char* kIssuer = "https://as.example";
constexpr const char* kRedirect = "https://agent.example/cb";

Errc error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::InvalidArgument;
}

std::map<std::string, std::string> query_of(const std::string& url) {
  auto q = url.find('?');
  return q == std::string::npos ? std::map<std::string, std::string>{}
                                : http::form_decode(url.substr(q + 1));
}

struct Code {
  std::string code;
  std::string verifier;
  std::string client_id;
  std::optional<std::string> secret;
  std::string redirect_uri = kRedirect;
};

struct AuthFixture {
  explicit AuthFixture(Store* store = nullptr, std::optional<crypto::Ed25519Key> key = std::nullopt)
      : clock(ts("2026-03-10T09:00:00.000Z")),
        as(options(store), key ? std::move(*key) : crypto::Ed25519Key::generate()) {}

  AuthorizationServerOptions options(Store* store) {
    AuthorizationServerOptions o;
    o.issuer = kIssuer;
    o.users = {{"hanako", "pw-hanako"}, {"taro", "pw-taro"}};
    o.clock = clock.clock();
    o.store = store;
    return o;
  }

  ClientRegistration client(bool confidential = false) {
    Json meta{{"redirect_uris", {kRedirect}}, {"client_name", "agent"}};
    if (!confidential) meta["token_endpoint_auth_method"] = "none";
    return as.register_client(meta);
  }

  AuthorizationRequest request(const ClientRegistration& c, const std::string& scope,
                               const std::string& verifier) {
    AuthorizationRequest r;
    r.client_id = c.client_id;
    r.redirect_uri = kRedirect;
    r.scope = scope;
    r.state = "state-123";
    r.code_challenge = crypto::pkce_challenge(verifier);
    return r;
  }

  // Authorize and consent; returns the code from the redirect.
  Code approve(const std::string& scope, std::set<std::string> approved = {},
               bool confidential = false, const std::string& user = "hanako") {
    auto c = client(confidential);
    Code out{"", make_code_verifier(), c.client_id, c.client_secret};
    auto pending = as.authorize(request(c, scope, out.verifier));
    ConsentDecision d{pending.request_id, user, "pw-" + user, true,
                      approved.empty() ? pending.scopes : approved};
    auto q = query_of(as.consent(d));
    REQUIRE(q.count("code") == 1);
    CHECK(q.at("state") == "state-123");
    out.code = q.at("code");
    return out;
  }

  TokenResponse exchange(const Code& c) {
    TokenRequest r;
    r.code = c.code;
    r.client_id = c.client_id;
    r.client_secret = c.secret;
    r.code_verifier = c.verifier;
    r.redirect_uri = c.redirect_uri;
    return as.exchange_code(r);
  }

  // The dataset agent's registration, so data scopes have an audience.
  void register_dataset_agent() {
    auto token = exchange(approve(std::string(kRegisterScope)));
    Json map = Json::object();
    for (const auto& s : data_scopes()) map[s] = "https://ds.example/data/" + s;
    as.register_resource(token.access_token,
                         Json{{"resource_id", "puda-dataset"}, {"endpoint_map", map}});
  }

  ManualClock clock;
  AuthorizationServer as;
};

std::string flip_signature_byte(const std::string& token) {
  auto copy = token;
  auto pos = copy.rfind('.') + 5;
  copy[pos] = copy[pos] == 'A' ? 'B' : 'A';
  return copy;
}

}  // namespace

TEST_SUITE("authz") {
  TEST_CASE("discovery document") {
    AuthFixture f;
    auto d = f.as.discovery();
    CHECK(d.at("issuer") == kIssuer);
    CHECK(d.at("scopes_supported").size() == 10);
    CHECK(d.at("scopes_supported") == Json(data_scopes()));
    CHECK(d.at("response_types_supported") == Json::array({"code"}));
    CHECK(d.at("code_challenge_methods_supported") == Json::array({"S256"}));
    for (const char* key : {"authorization_endpoint", "token_endpoint", "registration_endpoint",
                            "jwks_uri", "revocation_list_endpoint"}) {
      auto url = http::parse_url(d.at(key).get<std::string>());
      REQUIRE(url);
      CHECK(url->origin() == "https://as.example:443");
    }
    auto jwks = f.as.jwks();
    REQUIRE(jwks.at("keys").size() == 1);
    CHECK(jwks.at("keys")[0].at("kty") == "OKP");
    CHECK(jwks.at("keys")[0].at("crv") == "Ed25519");
  }

  TEST_CASE("client registration") {
    AuthFixture f;
    auto pub = f.client(false);
    CHECK(pub.client_id.size() == 32);
    CHECK_FALSE(pub.client_secret);
    auto conf = f.client(true);
    CHECK(conf.client_secret);
    CHECK(conf.client_id != pub.client_id);
    CHECK(error_of([&] { f.as.register_client(Json{{"redirect_uris", {"https://x/#frag"}}}); }) ==
          Errc::InvalidRedirectURI);
    CHECK(error_of([&] { f.as.register_client(Json{{"redirect_uris", {"/cb"}}}); }) ==
          Errc::InvalidRedirectURI);
    CHECK(error_of([&] { f.as.register_client(Json{{"redirect_uris", Json::array()}}); }) ==
          Errc::InvalidRedirectURI);
  }

  TEST_CASE("resource registration needs the bootstrap token") {
    AuthFixture f;
    Json body{{"endpoint_map", {{"puda:profile", "https://ds.example/data/profile"}}}};
    CHECK(error_of([&] { f.as.register_resource("", body); }) == Errc::Unauthorized);
    CHECK(error_of([&] { f.as.register_resource("not-a-token", body); }) == Errc::BadSignature);
    f.register_dataset_agent();
    // A data token is addressed to the dataset agent, not the issuer.
    auto data_token = f.exchange(f.approve("puda:profile"));
    CHECK(error_of([&] { f.as.register_resource(data_token.access_token, body); }) ==
          Errc::AudienceMismatch);
    auto boot = f.exchange(f.approve("puda:register"));
    Json bad{{"endpoint_map", {{"puda:everything", "https://ds.example/x"}}}};
    CHECK(error_of([&] { f.as.register_resource(boot.access_token, bad); }) ==
          Errc::InvalidScopeString);
  }

  TEST_CASE("authorize validation never redirects") {
    AuthFixture f;
    f.register_dataset_agent();
    auto c = f.client();
    auto v = make_code_verifier();
    auto r = f.request(c, "puda:profile", v);

    auto unknown = r;
    unknown.client_id = "0000";
    CHECK(error_of([&] { f.as.authorize(unknown); }) == Errc::UnknownClient);
    auto off_by_one = r;
    off_by_one.redirect_uri = "https://agent.example/cc";
    CHECK(error_of([&] { f.as.authorize(off_by_one); }) == Errc::RedirectMismatch);
    auto bad_scope = r;
    bad_scope.scope = "puda:profile puda:keywords:070";
    CHECK(error_of([&] { f.as.authorize(bad_scope); }) == Errc::InvalidScope);
    auto mixed = r;
    mixed.scope = "puda:register puda:profile";
    CHECK(error_of([&] { f.as.authorize(mixed); }) == Errc::InvalidScope);
    auto plain = r;
    plain.code_challenge_method = "plain";
    CHECK(error_of([&] { f.as.authorize(plain); }) == Errc::InvalidRequest);
    auto no_pkce = r;
    no_pkce.code_challenge.clear();
    CHECK(error_of([&] { f.as.authorize(no_pkce); }) == Errc::InvalidRequest);
    auto wrong_resource = r;
    wrong_resource.resource = "someone-else";
    CHECK(error_of([&] { f.as.authorize(wrong_resource); }) == Errc::InvalidScope);
    CHECK_NOTHROW(f.as.authorize(r));
  }

  TEST_CASE("data scopes need a registered resource") {
    AuthFixture f;
    auto c = f.client();
    CHECK(error_of([&] { f.as.authorize(f.request(c, "puda:profile", make_code_verifier())); }) ==
          Errc::InvalidScope);
  }

  TEST_CASE("approved scopes become the token's scopes") {
    AuthFixture f;
    f.register_dataset_agent();
    auto token = f.exchange(f.approve("puda:profile puda:categories:3"));
    CHECK(token.scopes == std::set<std::string>{"puda:profile", "puda:categories:3"});
    CHECK(token.expires_in == 3600);
    auto claims = f.as.verify(token.access_token, "puda-dataset");
    CHECK(claims.scopes == token.scopes);
    CHECK(claims.sub == "hanako");
    CHECK(claims.aud == "puda-dataset");
    CHECK(claims.iss == kIssuer);
    CHECK(claims.exp - claims.iat == std::chrono::seconds(3600));
    auto grant = f.as.grant(token.grant_id);
    REQUIRE(grant);
    CHECK(grant->scopes == token.scopes);
  }

  TEST_CASE("the user may approve fewer scopes, never more") {
    AuthFixture f;
    f.register_dataset_agent();
    auto token = f.exchange(f.approve("puda:profile puda:keywords:085", {"puda:profile"}));
    CHECK(token.scopes == std::set<std::string>{"puda:profile"});

    auto c = f.client();
    auto pending = f.as.authorize(f.request(c, "puda:profile", make_code_verifier()));
    ConsentDecision more{pending.request_id, "hanako", "pw-hanako", true,
                         {"puda:profile", "puda:history:long"}};
    CHECK(error_of([&] { f.as.consent(more); }) == Errc::InvalidScope);
  }

  TEST_CASE("denial redirects with access_denied and the state") {
    AuthFixture f;
    f.register_dataset_agent();
    auto c = f.client();
    auto pending = f.as.authorize(f.request(c, "puda:profile", make_code_verifier()));
    auto before = f.as.approval_count();
    auto q = query_of(f.as.consent(ConsentDecision{pending.request_id, "hanako", "pw-hanako", false, {}}));
    CHECK(q.at("error") == "access_denied");
    CHECK(q.at("state") == "state-123");
    CHECK(q.count("code") == 0);
    CHECK(f.as.approval_count() == before);
  }

  TEST_CASE("consent needs the user's password") {
    AuthFixture f;
    f.register_dataset_agent();
    auto c = f.client();
    auto pending = f.as.authorize(f.request(c, "puda:profile", make_code_verifier()));
    CHECK(error_of([&] {
            f.as.consent(ConsentDecision{pending.request_id, "hanako", "wrong", true, {}});
          }) == Errc::Unauthorized);
  }

  TEST_CASE("code exchange checks") {
    AuthFixture f;
    f.register_dataset_agent();

    SUBCASE("wrong verifier does not burn the code") {
      auto code = f.approve("puda:profile");
      auto bad = code;
      bad.verifier = make_code_verifier();
      CHECK(error_of([&] { f.exchange(bad); }) == Errc::PKCEMismatch);
      CHECK_NOTHROW(f.exchange(code));
    }
    SUBCASE("replay revokes the first token") {
      auto code = f.approve("puda:profile");
      auto first = f.exchange(code);
      CHECK_NOTHROW(f.as.verify(first.access_token, "puda-dataset"));
      CHECK(error_of([&] { f.exchange(code); }) == Errc::CodeReplay);
      CHECK(error_of([&] { f.as.verify(first.access_token, "puda-dataset"); }) ==
            Errc::RevokedGrant);
      CHECK(f.as.grant(first.grant_id)->status == GrantStatus::Revoked);
    }
    SUBCASE("expired code") {
      auto code = f.approve("puda:profile");
      f.clock.advance(std::chrono::seconds(121));
      CHECK(error_of([&] { f.exchange(code); }) == Errc::InvalidCode);
    }
    SUBCASE("unknown code") {
      auto code = f.approve("puda:profile");
      code.code = "nope";
      CHECK(error_of([&] { f.exchange(code); }) == Errc::InvalidCode);
    }
    SUBCASE("redirect must match the authorization request") {
      auto code = f.approve("puda:profile");
      code.redirect_uri = "https://agent.example/other";
      CHECK(error_of([&] { f.exchange(code); }) == Errc::RedirectMismatch);
    }
    SUBCASE("confidential clients authenticate") {
      auto code = f.approve("puda:profile", {}, true);
      REQUIRE(code.secret);
      auto wrong = code;
      wrong.secret = "00";
      CHECK(error_of([&] { f.exchange(wrong); }) == Errc::ClientAuthFailed);
      auto missing = code;
      missing.secret.reset();
      CHECK(error_of([&] { f.exchange(missing); }) == Errc::ClientAuthFailed);
      CHECK_NOTHROW(f.exchange(code));
    }
    SUBCASE("another client cannot redeem the code") {
      auto code = f.approve("puda:profile");
      auto other = f.client();
      code.client_id = other.client_id;
      CHECK(error_of([&] { f.exchange(code); }) == Errc::InvalidCode);
    }
  }

  TEST_CASE("concurrent redemption: at most one winner") {
    AuthFixture f;
    f.register_dataset_agent();
    for (int round = 0; round < 20; ++round) {
      auto code = f.approve("puda:profile");
      std::atomic<int> wins{0}, replays{0}, other{0};
      std::vector<std::thread> racers;
      for (int t = 0; t < 8; ++t) {
        racers.emplace_back([&] {
          try {
            f.exchange(code);
            ++wins;
          } catch (const Error& e) {
            (e.code() == Errc::CodeReplay ? replays : other)++;
          }
        });
      }
      for (auto& r : racers) r.join();
      CHECK(wins == 1);
      CHECK(replays == 7);
      CHECK(other == 0);
    }
  }

  TEST_CASE("token verification failures") {
    AuthFixture f;
    f.register_dataset_agent();
    auto token = f.exchange(f.approve("puda:profile")).access_token;

    CHECK(error_of([&] { f.as.verify(flip_signature_byte(token), "puda-dataset"); }) ==
          Errc::BadSignature);
    // Swap in a payload with more scopes, keeping the old signature.
    auto first_dot = token.find('.');
    auto second_dot = token.find('.', first_dot + 1);
    auto claims = Json::parse(*crypto::base64url_decode(token.substr(first_dot + 1, second_dot - first_dot - 1)));
    claims["scope"] = "puda:profile puda:history:long";
    auto forged = token.substr(0, first_dot + 1) + crypto::base64url_encode(claims.dump()) +
                  token.substr(second_dot);
    CHECK(error_of([&] { f.as.verify(forged, "puda-dataset"); }) == Errc::BadSignature);
    // Unsigned token.
    auto none = crypto::base64url_encode(R"({"alg":"none","typ":"at+jwt"})") + "." +
                token.substr(first_dot + 1, second_dot - first_dot - 1) + ".";
    CHECK(error_of([&] { f.as.verify(none, "puda-dataset"); }) == Errc::BadSignature);
    CHECK(error_of([&] { f.as.verify("garbage", "puda-dataset"); }) == Errc::BadSignature);
    CHECK(error_of([&] { f.as.verify(token, "other-resource"); }) == Errc::AudienceMismatch);

    f.clock.advance(std::chrono::seconds(3601));
    CHECK(error_of([&] { f.as.verify(token, "puda-dataset"); }) == Errc::Expired);
  }

  TEST_CASE("revocation by the user") {
    AuthFixture f;
    f.register_dataset_agent();
    auto token = f.exchange(f.approve("puda:profile puda:categories:1"));
    CHECK(error_of([&] { f.as.revoke_grant(token.grant_id, "hanako", "bad"); }) ==
          Errc::Unauthorized);
    CHECK_THROWS(f.as.revoke_grant(token.grant_id, "taro", "pw-taro"));
    CHECK(error_of([&] { f.as.revoke_grant("ffff", "hanako", "pw-hanako"); }) == Errc::UnknownGrant);

    auto since = f.clock.now();
    f.clock.advance(std::chrono::seconds(1));
    auto revoked = f.as.revoke_grant(token.grant_id, "hanako", "pw-hanako");
    CHECK(revoked.status == GrantStatus::Revoked);
    CHECK(error_of([&] { f.as.verify(token.access_token, "puda-dataset"); }) == Errc::RevokedGrant);

    auto list = f.as.revocations(since);
    REQUIRE(list.at("revoked").size() == 1);
    CHECK(list.at("revoked")[0].at("grant_id") == token.grant_id);
    CHECK(f.as.revocations(f.clock.now() + std::chrono::seconds(1)).at("revoked").empty());

    auto grants = f.as.grants_for("hanako", "pw-hanako");
    CHECK(std::any_of(grants.begin(), grants.end(),
                      [&](const AccessGrant& g) { return g.grant_id == token.grant_id; }));
    CHECK(f.as.grants_for("taro", "pw-taro").empty());
  }

  TEST_CASE("resource servers verify with the published keys alone") {
    AuthFixture f;
    f.register_dataset_agent();
    auto token = f.exchange(f.approve("puda:profile"));

    TokenVerifier verifier(kIssuer, "puda-dataset", f.clock.clock());
    CHECK(error_of([&] { verifier.verify(token.access_token); }) == Errc::BadSignature);  // no keys yet
    verifier.set_keys(Json::parse(f.as.jwks().dump()));
    auto claims = verifier.verify(token.access_token);
    CHECK(claims.scopes == std::set<std::string>{"puda:profile"});

    TokenVerifier wrong_issuer("https://evil.example", "puda-dataset", f.clock.clock());
    wrong_issuer.set_keys(f.as.jwks());
    CHECK(error_of([&] { wrong_issuer.verify(token.access_token); }) == Errc::Unauthorized);

    // Keys from another server do not verify these tokens.
    AuthFixture other;
    TokenVerifier foreign(kIssuer, "puda-dataset", f.clock.clock());
    foreign.set_keys(other.as.jwks());
    CHECK(error_of([&] { foreign.verify(token.access_token); }) == Errc::BadSignature);

    f.as.revoke_grant(token.grant_id, "hanako", "pw-hanako");
    verifier.add_revocations(f.as.revocations(std::nullopt));
    CHECK(error_of([&] { verifier.verify(token.access_token); }) == Errc::RevokedGrant);
  }

  TEST_CASE("random flows obey the scope subset law") {
    AuthFixture f;
    f.register_dataset_agent();
    std::mt19937_64 rng(31337);
    const auto& all = data_scopes();
    std::size_t approved_flows = 0;
    for (int round = 0; round < 150; ++round) {
      std::set<std::string> requested;
      while (requested.empty()) {
        for (const auto& s : all) {
          if (rng() % 3 == 0) requested.insert(s);
        }
      }
      std::set<std::string> approved;
      for (const auto& s : requested) {
        if (rng() % 2 == 0) approved.insert(s);
      }
      if (approved.empty()) approved.insert(*requested.begin());
      auto before = f.as.approval_count();
      auto token = f.exchange(f.approve(join_scopes(requested), approved));
      ++approved_flows;
      CHECK(f.as.approval_count() == before + 1);
      auto grant = f.as.grant(token.grant_id);
      REQUIRE(grant);
      auto claims = f.as.verify(token.access_token, "puda-dataset");
      CHECK(std::includes(grant->scopes.begin(), grant->scopes.end(), claims.scopes.begin(),
                          claims.scopes.end()));
      CHECK(std::includes(approved.begin(), approved.end(), grant->scopes.begin(),
                          grant->scopes.end()));
      CHECK(std::includes(requested.begin(), requested.end(), approved.begin(), approved.end()));
    }
    // One approval per token, plus the dataset agent's own registration.
    CHECK(f.as.approval_count() == approved_flows + 1);
  }

  TEST_CASE("state survives a restart") {
    ScratchDir dir;
    Store store(dir.path());
    auto key = crypto::Ed25519Key::generate();
    auto pem = key.private_pem();
    std::string grant_id, token;
    std::string client_id;
    {
      AuthFixture f(&store, std::move(key));
      f.register_dataset_agent();
      auto t = f.exchange(f.approve("puda:profile"));
      grant_id = t.grant_id;
      token = t.access_token;
      client_id = f.client().client_id;
      f.as.revoke_grant(grant_id, "hanako", "pw-hanako");
    }
    AuthFixture again(&store, crypto::Ed25519Key::from_private_pem(pem));
    auto g = again.as.grant(grant_id);
    REQUIRE(g);
    CHECK(g->status == GrantStatus::Revoked);
    CHECK(error_of([&] { again.as.verify(token, "puda-dataset"); }) == Errc::RevokedGrant);
    // Registered clients and the resource are still known.
    auto v = make_code_verifier();
    AuthorizationRequest r;
    r.client_id = client_id;
    r.redirect_uri = kRedirect;
    r.scope = "puda:profile";
    r.code_challenge = crypto::pkce_challenge(v);
    CHECK_NOTHROW(again.as.authorize(r));

    auto events = store.read_events("hanako");
    std::map<EventKind, int> kinds;
    for (const auto& e : events) kinds[e.kind]++;
    CHECK(kinds[EventKind::GrantCreated] == 2);
    CHECK(kinds[EventKind::TokenIssued] == 2);
    CHECK(kinds[EventKind::GrantRevoked] == 1);
  }
}
