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

#include <sstream>

#include "puda/harness.hpp"
#include "puda/pipeline.hpp"
#include "test_support.hpp"

using namespace puda;
using namespace puda::testing;

namespace {

HarnessOptions golden_options(bool parallel) {
  HarnessOptions o;
  o.corpus_path = fixtures_dir() / "golden_corpus.jsonl";
  o.profile_path = fixtures_dir() / "profile.json";
  o.queries = golden_queries();
  o.run_id = "test-run";
  o.parallel = parallel;
  return o;
}

const HarnessRun& golden_run() {
  static const HarnessRun run =
      run_conditions(golden_options(false), sample_taxonomy(), BackendSet::stub());
  return run;
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("token proxy") {
    CHECK(token_proxy("") == 0);
    CHECK(token_proxy("abcd") == 1);
    CHECK(token_proxy("abcde") == 2);
    CHECK(token_proxy("123456789") == 3);
    CHECK(token_proxy("温泉") == 2);  // six bytes
  }

  TEST_CASE("eleven conditions by five queries") {
    const auto& rows = golden_run().report.rows;
    REQUIRE(rows.size() == 55);
    std::set<std::pair<std::string, std::string>> cells;
    for (const auto& r : rows) {
      cells.emplace(r.condition, r.query_id);
      CHECK(r.run_id == "test-run");
      CHECK(r.backend == "stub");
      CHECK(r.latency_ms > 0.0);
      CHECK(r.dataset_version == dataset_version(golden_run().dataset));
    }
    CHECK(cells.size() == 55);
    for (const auto& c : all_conditions()) {
      for (const auto& q : golden_queries()) CHECK(cells.count({c.label(), q.id}) == 1);
    }
  }

  TEST_CASE("a single condition") {
    auto o = golden_options(true);
    o.conditions = {GranularityCondition::no_data()};
    auto run = run_conditions(o, sample_taxonomy(), BackendSet::stub());
    REQUIRE(run.report.rows.size() == 5);
    for (const auto& r : run.report.rows) {
      CHECK(r.condition == "no_data");
      CHECK(r.serialized_bytes == 23);
      CHECK(r.latency_ms == 0.0);
    }
  }

  TEST_CASE("parallel and sequential agree on the byte columns") {
    auto parallel = run_conditions(golden_options(true), sample_taxonomy(), BackendSet::stub());
    CHECK(cost_columns_csv(parallel.report) == cost_columns_csv(golden_run().report));
    auto again = run_conditions(golden_options(true), sample_taxonomy(), BackendSet::stub());
    CHECK(again.report == parallel.report);
  }

  TEST_CASE("cost columns match the golden file and the independent oracle") {
    const auto& report = golden_run().report;
    CHECK(matches_golden(golden_dir() / "cost_columns.csv", cost_columns_csv(report)));

    auto oracle_path = golden_dir() / "cost_oracle.json";
    REQUIRE_MESSAGE(std::filesystem::exists(oracle_path), "run tools/cost_oracle.py");
    auto oracle = Json::parse(read_text(oracle_path));
    REQUIRE(oracle.size() == report.rows.size());
    std::map<std::pair<std::string, std::string>, const CostRow*> by_cell;
    for (const auto& r : report.rows) by_cell[{r.condition, r.query_id}] = &r;
    for (const auto& o : oracle) {
      auto key = std::make_pair(o.at("condition").get<std::string>(), o.at("query_id").get<std::string>());
      REQUIRE(by_cell.count(key) == 1);
      CHECK(by_cell[key]->serialized_bytes == o.at("serialized_bytes").get<std::size_t>());
      CHECK(by_cell[key]->token_proxy_in == o.at("token_proxy_in").get<std::int64_t>());
    }
  }

  TEST_CASE("token costs are monotone in granularity") {
    std::map<std::string, std::map<std::string, std::int64_t>> cost;
    for (const auto& r : golden_run().report.rows) cost[r.query_id][r.condition] = r.token_proxy_in;
    for (const auto& [q, c] : cost) {
      CAPTURE(q);
      CHECK(c.at("no_data") <= c.at("profile"));
      for (const auto* richer : {"categories_1", "keywords_090", "history_short"}) {
        CHECK(c.at("profile") <= c.at(richer));
      }
      CHECK(c.at("categories_1") <= c.at("categories_2"));
      CHECK(c.at("categories_2") <= c.at("categories_3"));
      CHECK(c.at("keywords_090") <= c.at("keywords_085"));
      CHECK(c.at("keywords_085") <= c.at("keywords_080"));
      CHECK(c.at("keywords_080") <= c.at("keywords_075"));
      CHECK(c.at("history_short") <= c.at("history_long"));
    }
  }

  TEST_CASE("report formats") {
    ScratchDir dir;
    const auto& report = golden_run().report;
    emit_report(report, ReportFormat::Csv, dir.path() / "out" / "costs.csv");
    auto csv = read_text(dir.path() / "out" / "costs.csv");
    CHECK(count_lines(csv) == 56);
    CHECK(csv.substr(0, csv.find('\n')) == kCsvHeader);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) CHECK(std::count(line.begin(), line.end(), ',') == 6);

    emit_report(report, ReportFormat::Json, dir.path() / "costs.json");
    auto parsed = parse_report_json(read_text(dir.path() / "costs.json"));
    CHECK(parsed == report);

    CHECK(parse_report_format("csv") == ReportFormat::Csv);
    CHECK_FALSE(parse_report_format("xml"));
    CHECK_THROWS_AS(parse_report_json("{\"rows\": 1}"), Error);
  }

  TEST_CASE("an empty report is an error and writes nothing") {
    ScratchDir dir;
    CHECK_THROWS_AS(emit_report(CostReport{}, ReportFormat::Csv, dir.path() / "empty.csv"), Error);
    CHECK_FALSE(std::filesystem::exists(dir.path() / "empty.csv"));
  }

  TEST_CASE("input errors") {
    auto o = golden_options(true);
    o.queries.clear();
    CHECK_THROWS_AS(run_conditions(o, sample_taxonomy(), BackendSet::stub()), Error);
    o = golden_options(true);
    o.corpus_path = "/nonexistent/corpus.jsonl";
    try {
      run_conditions(o, sample_taxonomy(), BackendSet::stub());
      FAIL("ran without a corpus");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::MissingDataset);
    }
    CHECK_THROWS_AS(load_queries("/nonexistent/q.json"), Error);
  }

  TEST_CASE("mock agent flow") {
    GoldenDeployment g;
    AgentFlowOptions o;
    o.issuer = g->issuer();
    o.dataset_url = g->dataset_url();
    o.username = g.username;
    o.password = g.password;

    SUBCASE("profile only") {
      o.scopes = {"puda:profile"};
      auto r = mock_agent_flow(o);
      CHECK(r.granted_scopes == o.scopes);
      REQUIRE(r.payloads.size() == 1);
      CHECK(r.payloads.at("puda:profile").at("profile") == Json(golden_profile()));
      int fetches = 0;
      for (const auto& s : r.transcript.steps) fetches += s.step.rfind("fetch ", 0) == 0;
      CHECK(fetches == 1);
      // The transcript never carries the user's password.
      CHECK(r.transcript.to_json().dump().find(g.password) == std::string::npos);
    }
    SUBCASE("profile and keywords") {
      o.scopes = {"puda:profile", "puda:keywords:085"};
      auto r = mock_agent_flow(o);
      REQUIRE(r.payloads.size() == 2);
      const auto& kws = r.payloads.at("puda:keywords:085").at("keywords");
      CHECK_FALSE(kws.empty());
      for (const auto& k : kws) CHECK(k.at("score").get<double>() >= 0.85);
    }
    SUBCASE("unknown scope") {
      o.scopes = {"puda:keywords:070"};
      try {
        mock_agent_flow(o);
        FAIL("flow accepted an unknown scope");
      } catch (const FlowStepError& e) {
        CHECK(e.server_error() == "invalid_scope");
        CHECK(e.step() == "authorize");
      }
    }
  }
}
