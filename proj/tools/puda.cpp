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

// Operator CLI. Exit codes: 0 success, 1 usage error, 2 runtime failure.

#include <CLI11.hpp>
#include <csignal>
#include <iostream>
#include <optional>

#include "puda/authz.hpp"
#include "puda/config.hpp"
#include "puda/crypto.hpp"
#include "puda/deployment.hpp"
#include "puda/harness.hpp"
#include "puda/provision.hpp"

namespace {

using namespace puda;

constexpr int kUsage = 1;
constexpr int kRuntime = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

BackendSet backends_for(const Config& config) {
  return BackendSet::from_config(Json{{"backend", config.backend}});
}

std::set<std::string> parse_scope_list(const std::string& text) {
  std::string spaced = text;
  for (auto& c : spaced) {
    if (c == ',') c = ' ';
  }
  auto scopes = split_scopes(spaced);
  if (scopes.empty()) throw UsageError("--scopes needs at least one scope");
  return scopes;
}

std::vector<GranularityCondition> parse_conditions(const std::string& text) {
  if (text.empty() || text == "all") return {};
  std::vector<GranularityCondition> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto label = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    auto condition = GranularityCondition::parse(label);
    if (!condition) throw UsageError("unknown condition '" + label + "'");
    out.push_back(*condition);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Blocks until SIGINT or SIGTERM.
void wait_for_shutdown() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  int sig = 0;
  sigwait(&set, &sig);
}

void block_shutdown_signals() {
  // Worker threads inherit the mask, so only sigwait sees the signals.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
}

void print(const Json& j) { std::cout << j.dump(2) << std::endl; }

// Subcommands -------------------------------------------------------------------

int cmd_ingest(const Config& config, const std::string& corpus, const std::string& user,
               const std::string& profile_path) {
  Store store(config.data_dir);
  auto captures = load_corpus(corpus);
  std::size_t added = 0;
  std::size_t duplicates = 0;
  for (auto& c : captures) {
    c.user_id = user;
    validate_capture(c, now_utc());
    auto r = store.append_capture(c);
    r.duplicate ? ++duplicates : ++added;
  }
  if (!profile_path.empty()) store.put_profile(user, load_profile(profile_path));
  print(Json{{"user_id", user}, {"ingested", added}, {"duplicates", duplicates}});
  return 0;
}

int cmd_rebuild(const Config& config, const std::string& user) {
  Store store(config.data_dir);
  auto taxonomy = CategoryTaxonomy::load_file(config.taxonomy_path());
  ProvisionOptions options;
  options.issuer = config.trusted_issuer();
  ProvisionService service(store, taxonomy, backends_for(config), options);
  print(service.rebuild(user).to_json());
  return 0;
}

int cmd_serve(const Config& config, bool auth_only, bool data_only) {
  if (config.users.empty()) throw UsageError("configure at least one user (PUDA_USERS)");
  block_shutdown_signals();
  auto taxonomy = CategoryTaxonomy::load_file(config.taxonomy_path());

  if (!auth_only && !data_only) {
    DeploymentOptions d;
    d.data_dir = config.data_dir;
    d.host = config.auth_listen.host;
    d.auth_port = config.auth_listen.port;
    d.data_port = config.data_listen.port;
    d.users = config.users;
    d.recorder_secret = config.recorder_secret;
    d.dashboard_origin = config.dashboard_origin;
    d.signing_key_file = config.signing_key_path();
    d.revocation_poll = config.revocation_poll;
    LocalDeployment deployment(d, taxonomy, backends_for(config));
    std::cerr << "authorization server: " << deployment.issuer() << "\n"
              << "dataset agent:        " << deployment.dataset_url() << std::endl;
    wait_for_shutdown();
    return 0;
  }

  Store store(config.data_dir);
  http::ServiceHost host;
  if (auth_only) {
    AuthorizationServerOptions o;
    o.issuer = config.issuer;
    o.users = config.users;
    o.store = &store;
    AuthorizationServer as(o, crypto::Ed25519Key::load_or_create(config.signing_key_path()));
    mount_authorization_routes(host.server(), as, config.dashboard_origin);
    host.start(config.auth_listen.host, config.auth_listen.port);
    std::cerr << "authorization server: " << as.issuer() << " on " << host.origin() << std::endl;
    wait_for_shutdown();
    return 0;
  }

  ProvisionOptions o;
  o.issuer = config.trusted_issuer();
  o.public_url = config.data_public_url();
  o.recorder_secret = config.recorder_secret;
  o.dashboard_origin = config.dashboard_origin;
  o.revocation_poll = config.revocation_poll;
  ProvisionService service(store, taxonomy, backends_for(config), o);
  mount_provision_routes(host.server(), service);
  host.start(config.data_listen.host, config.data_listen.port);
  service.connect_authorization_server();
  const auto& [user, password] = *config.users.begin();
  service.register_with_authorization_server(user, password);
  service.start_revocation_poller();
  std::cerr << "dataset agent: " << service.options().public_url << std::endl;
  wait_for_shutdown();
  return 0;
}

struct DemoInputs {
  std::string corpus;
  std::string profile;
};

// A throwaway deployment holding the demo corpus.
std::unique_ptr<LocalDeployment> demo_deployment(const Config& config, const ScratchDir& dir,
                                                 const DemoInputs& in,
                                                 const CategoryTaxonomy& taxonomy,
                                                 const std::string& user,
                                                 const std::string& password) {
  DeploymentOptions d;
  d.data_dir = dir.path();
  d.users = {{user, password}};
  d.recorder_secret = crypto::random_hex(16);
  auto deployment = std::make_unique<LocalDeployment>(d, taxonomy,
                                                      backends_for(config));
  auto& provision = deployment->provision();
  provision.put_profile(user, load_profile(in.profile));
  for (auto c : load_corpus(in.corpus)) {
    c.user_id = user;
    deployment->store().append_capture(c);
  }
  provision.rebuild(user);
  return deployment;
}

int cmd_grant_demo(const Config& config, const std::string& scopes, const DemoInputs& in) {
  ScratchDir dir("puda-grant");
  auto taxonomy = CategoryTaxonomy::load_file(config.taxonomy_path());
  std::string user = "demo";
  std::string password = crypto::random_hex(12);
  auto deployment = demo_deployment(config, dir, in, taxonomy, user, password);

  Transcript transcript;
  OAuthFlowOptions flow;
  flow.issuer = deployment->issuer();
  flow.client_name = "puda-grant-demo";
  flow.scopes = parse_scope_list(scopes);
  flow.username = user;
  flow.password = password;
  auto result = run_authorization_flow(flow, transcript);
  auto claims = deployment->provision().verifier().verify(result.access_token);
  print(Json{{"grant_id", result.grant_id},
             {"scopes", std::vector<std::string>(result.scopes.begin(), result.scopes.end())},
             {"expires_in", result.expires_in},
             {"claims", claims_to_json(claims)},
             {"transcript", transcript.to_json()}});
  return 0;
}

int cmd_measure(const Config& config, const HarnessOptions& options, const std::string& out,
                const std::string& format_name) {
  auto format = parse_report_format(format_name);
  if (!format) throw UsageError("--format must be csv or json");
  auto taxonomy = CategoryTaxonomy::load_file(config.taxonomy_path());
  auto run = run_conditions(options, taxonomy, backends_for(config));
  emit_report(run.report, *format, out);
  std::cerr << run.report.rows.size() << " rows written to " << out << " (dataset "
            << dataset_version(run.dataset) << ", token proxy " << kTokenProxyName << ")"
            << std::endl;
  return 0;
}

int cmd_agent_demo(const Config& config, const std::string& scopes, AgentFlowOptions options,
                   const DemoInputs& in) {
  options.scopes = parse_scope_list(scopes);
  std::optional<ScratchDir> dir;
  std::optional<CategoryTaxonomy> taxonomy;
  std::unique_ptr<LocalDeployment> deployment;
  if (options.issuer.empty()) {
    dir.emplace("puda-agent-demo");
    taxonomy = CategoryTaxonomy::load_file(config.taxonomy_path());
    options.username = "demo";
    options.password = crypto::random_hex(12);
    deployment = demo_deployment(config, *dir, in, *taxonomy, options.username, options.password);
    options.issuer = deployment->issuer();
    options.dataset_url = deployment->dataset_url();
  } else if (options.dataset_url.empty()) {
    throw UsageError("--dataset is required with --issuer");
  }
  auto result = mock_agent_flow(options);
  Json payloads = Json::object();
  for (const auto& [scope, body] : result.payloads) payloads[scope] = body;
  print(Json{{"granted_scopes",
              std::vector<std::string>(result.granted_scopes.begin(), result.granted_scopes.end())},
             {"payloads", payloads},
             {"transcript", result.transcript.to_json()}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"puda: personal data agent operator tool"};
  app.require_subcommand(1);
  std::string config_file;
  app.add_option("--config", config_file, "JSON config file (default: $PUDA_CONFIG)");

  std::string corpus, user, profile;
  auto* ingest = app.add_subcommand("ingest", "Append page captures to a user's log");
  ingest->add_option("corpus", corpus, "JSONL file of page captures")->required();
  ingest->add_option("--user", user, "User id")->required();
  ingest->add_option("--profile", profile, "Also store this profile JSON");

  auto* rebuild = app.add_subcommand("rebuild", "Rebuild a user's dataset from the log");
  rebuild->add_option("--user", user, "User id")->required();

  bool auth_only = false, data_only = false, all = false;
  auto* serve = app.add_subcommand("serve", "Run the services until interrupted");
  auto* auth_flag = serve->add_flag("--auth", auth_only, "Authorization server only");
  auto* data_flag = serve->add_flag("--data", data_only, "Dataset agent only");
  auto* all_flag = serve->add_flag("--all", all, "Both services (default)");
  auth_flag->excludes(data_flag)->excludes(all_flag);
  data_flag->excludes(all_flag);

  std::string default_corpus = std::string(PUDA_FIXTURES_DIR) + "/golden_corpus.jsonl";
  std::string default_profile = std::string(PUDA_FIXTURES_DIR) + "/profile.json";
  DemoInputs demo{default_corpus, default_profile};

  bool demo_flag = false;
  std::string scopes = "puda:profile,puda:categories:3";
  auto* grant = app.add_subcommand("grant", "Scripted consent against throwaway services");
  grant->add_flag("--demo", demo_flag, "Run the scripted consent flow")->required();
  grant->add_option("--scopes", scopes, "Comma separated scopes")->capture_default_str();
  grant->add_option("--corpus", demo.corpus, "Capture corpus")->capture_default_str();
  grant->add_option("--profile", demo.profile, "Profile JSON")->capture_default_str();

  HarnessOptions harness;
  std::string out, format = "csv", conditions = "all";
  std::string corpus_path = default_corpus, profile_path = default_profile;
  std::string queries_file = std::string(PUDA_FIXTURES_DIR) + "/queries.json";
  auto* measure = app.add_subcommand("measure", "Cost report across granularity conditions");
  measure->add_option("--corpus", corpus_path, "Capture corpus (JSONL)")->capture_default_str();
  measure->add_option("--profile", profile_path, "Profile JSON")->capture_default_str();
  measure->add_option("--queries", queries_file, "Queries JSON")->capture_default_str();
  measure->add_option("--out", out, "Report path")->required();
  measure->add_option("--format", format, "csv or json")->capture_default_str();
  measure->add_option("--conditions", conditions, "all, or comma separated labels")
      ->capture_default_str();
  measure->add_option("--run-id", harness.run_id, "Run identifier");
  measure->add_flag("--parallel", harness.parallel, "Bytes and tokens only, concurrently");

  AgentFlowOptions agent;
  std::string agent_scopes;
  auto* agent_demo = app.add_subcommand("agent-demo", "Mock external agent, full flow");
  agent_demo->add_option("--scopes", agent_scopes, "Comma separated scopes")->required();
  agent_demo->add_option("--issuer", agent.issuer, "Authorization server (default: spawn locally)");
  agent_demo->add_option("--dataset", agent.dataset_url, "Dataset agent URL");
  agent_demo->add_option("--user", agent.username, "User who consents");
  agent_demo->add_option("--password", agent.password, "That user's password");
  agent_demo->add_option("--corpus", demo.corpus, "Corpus for the local deployment")
      ->capture_default_str();
  agent_demo->add_option("--profile", demo.profile, "Profile for the local deployment")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    auto config = Config::load(config_file.empty() ? std::nullopt
                                                   : std::optional<std::filesystem::path>(config_file));
    if (*ingest) return cmd_ingest(config, corpus, user, profile);
    if (*rebuild) return cmd_rebuild(config, user);
    if (*serve) return cmd_serve(config, auth_only, data_only);
    if (*grant) return cmd_grant_demo(config, scopes, demo);
    if (*measure) {
      harness.corpus_path = corpus_path;
      harness.profile_path = profile_path;
      harness.queries = load_queries(queries_file);
      harness.conditions = parse_conditions(conditions);
      return cmd_measure(config, harness, out, format);
    }
    if (*agent_demo) return cmd_agent_demo(config, agent_scopes, agent, demo);
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << std::endl;
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kRuntime;
  }
  return kUsage;
}
