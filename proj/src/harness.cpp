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

#include "puda/harness.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

#include "puda/crypto.hpp"
#include "puda/deployment.hpp"
#include "puda/pipeline.hpp"
#include "puda/store.hpp"

namespace puda {

namespace {

std::string read_text(const std::filesystem::path& path, Errc missing) {
  auto text = read_file(path);
  if (!text) throw Error(missing, "cannot read " + path.string());
  return *text;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string backend_label(const BackendSet& b) {
  auto s = b.summarize->id();
  auto k = b.keywords->id();
  auto c = b.categorize->id();
  if (s == k && k == c) return s;
  return "summarize=" + s + ";keywords=" + k + ";categorize=" + c;
}

// The provision call that stands in for handing the context to the consumer.
struct RoundTrip {
  std::string path;
  std::optional<std::string> scope;  // nullopt: public card
};

RoundTrip round_trip_for(const GranularityCondition& c) {
  if (c.kind() == GranularityCondition::Kind::NoData) return {"/.well-known/puda-agent", {}};
  if (c.kind() == GranularityCondition::Kind::ProfileOnly) {
    return {scope_endpoint_path(kProfileScope), std::string(kProfileScope)};
  }
  auto scope = *granularity_scope(c);
  return {scope_endpoint_path(scope), scope};
}

CostRow measure_bytes(const UserDataset& dataset, const GranularityCondition& condition,
                      const Query& query) {
  auto bundle = build_context(dataset, condition);
  std::string combined = query.text + "\n\n" + bundle.canonical();
  CostRow row;
  row.condition = condition.label();
  row.query_id = query.id;
  row.serialized_bytes = bundle.serialized_bytes;
  row.token_proxy_in = token_proxy(combined);
  return row;
}

}  // namespace

std::int64_t token_proxy(std::string_view text) {
  return static_cast<std::int64_t>((text.size() + 3) / 4);
}

std::vector<Query> load_queries(const std::filesystem::path& path) {
  std::vector<Query> queries;
  try {
    Json j = Json::parse(read_text(path, Errc::IoError));
    for (const auto& q : j) {
      queries.push_back(Query{q.at("id").get<std::string>(), q.at("text").get<std::string>()});
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::InvalidArgument, "queries " + path.string() + ": " + e.what());
  }
  return queries;
}

std::vector<PageCapture> load_corpus(const std::filesystem::path& path) {
  std::istringstream in(read_text(path, Errc::MissingDataset));
  std::vector<PageCapture> captures;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      captures.push_back(Json::parse(line).get<PageCapture>());
    } catch (const InvalidCaptureError& e) {
      throw InvalidCaptureError(e.field(), "line " + std::to_string(number) + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(Errc::InvalidCapture, "line " + std::to_string(number) + ": " + e.what());
    }
  }
  return captures;
}

Profile load_profile(const std::filesystem::path& path) {
  try {
    auto profile = Json::parse(read_text(path, Errc::MissingProfile)).get<Profile>();
    validate_profile(profile);
    return profile;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::InvalidArgument, "profile " + path.string() + ": " + e.what());
  }
}

// Reports ---------------------------------------------------------------------

void to_json(Json& j, const CostRow& row) {
  j = Json{{"run_id", row.run_id},
           {"condition", row.condition},
           {"query_id", row.query_id},
           {"serialized_bytes", row.serialized_bytes},
           {"token_proxy_in", row.token_proxy_in},
           {"latency_ms", row.latency_ms},
           {"dataset_version", row.dataset_version},
           {"backend", row.backend},
           {"token_proxy", row.token_proxy}};
}

void from_json(const Json& j, CostRow& row) {
  row.run_id = j.at("run_id").get<std::string>();
  row.condition = j.at("condition").get<std::string>();
  row.query_id = j.at("query_id").get<std::string>();
  row.serialized_bytes = j.at("serialized_bytes").get<std::size_t>();
  row.token_proxy_in = j.at("token_proxy_in").get<std::int64_t>();
  row.latency_ms = j.at("latency_ms").get<double>();
  row.dataset_version = j.at("dataset_version").get<std::string>();
  row.backend = j.value("backend", "");
  row.token_proxy = j.value("token_proxy", std::string(kTokenProxyName));
}

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  return std::nullopt;
}

void emit_report(const CostReport& report, ReportFormat format,
                 const std::filesystem::path& out) {
  if (report.rows.empty()) throw Error(Errc::InvalidArgument, "refusing to write an empty report");
  std::string text;
  if (format == ReportFormat::Json) {
    text = Json(report.rows).dump(2) + "\n";
  } else {
    text = std::string(kCsvHeader) + "\n";
    char latency[32];
    for (const auto& r : report.rows) {
      std::snprintf(latency, sizeof(latency), "%.3f", r.latency_ms);
      text += csv_field(r.run_id) + "," + csv_field(r.condition) + "," + csv_field(r.query_id) +
              "," + std::to_string(r.serialized_bytes) + "," + std::to_string(r.token_proxy_in) +
              "," + latency + "," + csv_field(r.dataset_version) + "\n";
    }
  }
  if (out.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(out.parent_path(), ec);
  }
  std::ofstream file(out, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(Errc::IoError, "cannot write " + out.string());
  file << text;
  file.close();
  if (!file) throw Error(Errc::IoError, "write failed for " + out.string());
}

CostReport parse_report_json(std::string_view text) {
  try {
    return CostReport{Json::parse(text).get<std::vector<CostRow>>()};
  } catch (const std::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed report: ") + e.what());
  }
}

// Measurement -----------------------------------------------------------------

HarnessRun run_conditions(const HarnessOptions& options, const CategoryTaxonomy& taxonomy,
                          const BackendSet& backends) {
  if (options.queries.empty()) throw Error(Errc::InvalidArgument, "no queries given");
  if (!std::filesystem::exists(options.corpus_path)) {
    throw Error(Errc::MissingDataset, "corpus not found: " + options.corpus_path.string());
  }
  auto captures = load_corpus(options.corpus_path);
  auto profile = load_profile(options.profile_path);
  std::string user = options.user_id;
  if (user.empty()) user = captures.empty() ? "harness-user" : captures.front().user_id;
  for (auto& c : captures) c.user_id = user;

  std::vector<GranularityCondition> conditions = options.conditions;
  if (conditions.empty()) {
    auto all = all_conditions();
    conditions.assign(all.begin(), all.end());
  }
  std::string run_id = options.run_id.empty() ? crypto::random_hex(6) : options.run_id;
  std::string backend = backend_label(backends);

  HarnessRun run;
  auto stamp = [&](CostRow& row, const std::string& version) {
    row.run_id = run_id;
    row.dataset_version = version;
    row.backend = backend;
  };

  if (options.parallel) {
    auto outcome = process_pages(captures, backends, std::thread::hardware_concurrency());
    run.dataset = build_dataset(user, profile, outcome.records, taxonomy, backends, now_utc());
    auto version = dataset_version(run.dataset);
    std::vector<std::future<std::vector<CostRow>>> futures;
    for (const auto& condition : conditions) {
      futures.push_back(std::async(std::launch::async, [&, condition] {
        std::vector<CostRow> rows;
        for (const auto& q : options.queries) rows.push_back(measure_bytes(run.dataset, condition, q));
        return rows;
      }));
    }
    for (auto& f : futures) {
      for (auto& row : f.get()) {
        stamp(row, version);
        run.report.rows.push_back(std::move(row));
      }
    }
    return run;
  }

  ScratchDir scratch("puda-harness");
  std::string password = crypto::random_hex(16);
  DeploymentOptions d;
  d.data_dir = scratch.path();
  d.users = {{user, password}};
  d.recorder_secret = crypto::random_hex(16);
  LocalDeployment deployment(d, taxonomy, backends);

  deployment.provision().put_profile(user, profile);
  for (const auto& c : captures) deployment.store().append_capture(c);
  deployment.provision().rebuild(user);
  auto dataset = deployment.provision().dataset(user);
  if (!dataset) throw Error(Errc::MissingDataset, "rebuild produced no dataset");
  run.dataset = *dataset;
  auto version = dataset_version(run.dataset);

  Transcript transcript;
  OAuthFlowOptions flow;
  flow.issuer = deployment.issuer();
  flow.client_name = "puda-harness";
  flow.scopes = std::set<std::string>(data_scopes().begin(), data_scopes().end());
  flow.username = user;
  flow.password = password;
  auto token = run_authorization_flow(flow, transcript);

  auto client = http::make_client(*http::parse_url(deployment.dataset_url()),
                                  std::chrono::milliseconds(10000));
  httplib::Headers auth{{"Authorization", "Bearer " + token.access_token}};
  for (const auto& condition : conditions) {
    auto trip = round_trip_for(condition);
    for (const auto& q : options.queries) {
      auto start = std::chrono::steady_clock::now();
      CostRow row = measure_bytes(run.dataset, condition, q);
      auto res = trip.scope ? client->Get(trip.path, auth) : client->Get(trip.path);
      auto stop = std::chrono::steady_clock::now();
      if (!res || res->status != 200) {
        throw FlowStepError("provision " + trip.path, res ? res->status : 0,
                            res ? res->body : httplib::to_string(res.error()));
      }
      if (trip.scope && res->body != canonical_dump(scope_fragment(run.dataset, *trip.scope))) {
        throw FlowStepError("provision " + trip.path, res->status,
                            "served fragment differs from the local bundle");
      }
      row.latency_ms = std::chrono::duration<double, std::milli>(stop - start).count();
      stamp(row, version);
      run.report.rows.push_back(std::move(row));
    }
  }
  return run;
}

// Mock agent ------------------------------------------------------------------

AgentFlowResult mock_agent_flow(const AgentFlowOptions& options) {
  AgentFlowResult result;
  OAuthFlowOptions flow;
  flow.issuer = options.issuer;
  flow.client_name = "mock-travel-agent";
  flow.redirect_uri = "http://127.0.0.1/mock-agent/callback";
  flow.scopes = options.scopes;
  flow.username = options.username;
  flow.password = options.password;
  auto token = run_authorization_flow(flow, result.transcript);
  result.granted_scopes = token.scopes;
  result.access_token = token.access_token;
  result.grant_id = token.grant_id;

  std::string base = options.dataset_url;
  while (!base.empty() && base.back() == '/') base.pop_back();
  auto [cstatus, card] = transcribed_request(result.transcript, "capability_card", "GET",
                                             base + "/.well-known/puda-agent");
  if (cstatus != 200) throw FlowStepError("capability_card", cstatus, card.dump());
  std::string issuer = options.issuer;
  while (!issuer.empty() && issuer.back() == '/') issuer.pop_back();
  if (card.value("authorization_server", "") != issuer) {
    throw FlowStepError("capability_card", cstatus, "card names another authorization server");
  }
  result.card = card;

  for (const auto& scope : token.scopes) {
    if (!is_data_scope(scope)) continue;
    const auto& endpoints = card.at("provision_endpoints");
    if (!endpoints.contains(scope)) {
      throw FlowStepError("fetch " + scope, cstatus, "card does not advertise this scope");
    }
    auto path = endpoints.at(scope).at("path").get<std::string>();
    auto [status, body] = transcribed_request(result.transcript, "fetch " + scope, "GET",
                                              base + path, token.access_token);
    if (status != 200) {
      throw FlowStepError("fetch " + scope, status, body.dump(),
                          body.is_object() ? body.value("error", "") : "");
    }
    result.payloads[scope] = body;
  }
  return result;
}

}  // namespace puda
