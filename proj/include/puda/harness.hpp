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

// Cost measurement across the eleven granularity conditions, plus a mock
// external agent that walks the whole discovery-to-fetch path.
//
// Latency here covers bundle assembly and one local provision round trip.
// It does not include any LLM generation.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "puda/backend.hpp"
#include "puda/codec.hpp"
#include "puda/model.hpp"
#include "puda/oauth_client.hpp"
#include "puda/taxonomy.hpp"

namespace puda {

/// ceil(utf8_bytes / 4). An approximation, not any model's tokenizer.
std::int64_t token_proxy(std::string_view text);
inline constexpr std::string_view kTokenProxyName = "ceil(utf8_bytes/4)";

struct Query {
  std::string id;
  std::string text;
};

/// JSON array of {"id", "text", ...}.
std::vector<Query> load_queries(const std::filesystem::path& path);
/// JSONL, one PageCapture per line; blank lines ignored.
std::vector<PageCapture> load_corpus(const std::filesystem::path& path);
Profile load_profile(const std::filesystem::path& path);

struct CostRow {
  std::string run_id;
  std::string condition;
  std::string query_id;
  std::size_t serialized_bytes = 0;
  std::int64_t token_proxy_in = 0;
  double latency_ms = 0.0;
  std::string dataset_version;
  std::string backend;
  std::string token_proxy{kTokenProxyName};

  friend bool operator==(const CostRow&, const CostRow&) = default;
};

struct CostReport {
  std::vector<CostRow> rows;
  friend bool operator==(const CostReport&, const CostReport&) = default;
};

void to_json(Json& j, const CostRow& row);
void from_json(const Json& j, CostRow& row);

enum class ReportFormat { Csv, Json };
std::optional<ReportFormat> parse_report_format(std::string_view name);

inline constexpr std::string_view kCsvHeader =
    "run_id,condition,query_id,serialized_bytes,token_proxy_in,latency_ms,dataset_version";

/// Throws InvalidArgument for an empty report (nothing is written) and
/// IoError when the file cannot be written.
void emit_report(const CostReport& report, ReportFormat format, const std::filesystem::path& out);
CostReport parse_report_json(std::string_view text);

struct HarnessOptions {
  std::filesystem::path corpus_path;
  std::filesystem::path profile_path;
  std::vector<Query> queries;
  std::vector<GranularityCondition> conditions;  // empty: all eleven
  std::string run_id;                            // generated when empty
  /// Byte and token columns only, computed concurrently; latency_ms is 0
  /// and no services are spawned.
  bool parallel = false;
  std::string user_id;  // empty: the corpus owner
};

struct HarnessRun {
  CostReport report;
  UserDataset dataset;
};

/// Builds the dataset from the corpus, spawns both services on loopback and
/// measures every (condition, query) pair in order. Throws MissingDataset,
/// ServerSpawnFailure, FlowStepFailed.
HarnessRun run_conditions(const HarnessOptions& options, const CategoryTaxonomy& taxonomy,
                          const BackendSet& backends);

struct AgentFlowResult {
  Transcript transcript;
  Json card;
  std::set<std::string> granted_scopes;
  std::map<std::string, Json> payloads;  // scope -> fetched fragment
  std::string access_token;
  std::string grant_id;
};

struct AgentFlowOptions {
  std::string issuer;
  std::string dataset_url;
  std::set<std::string> scopes;
  std::string username;
  std::string password;
};

/// discovery -> registration -> authorize -> consent -> token -> card ->
/// one fetch per granted data scope. Throws FlowStepError.
AgentFlowResult mock_agent_flow(const AgentFlowOptions& options);

}  // namespace puda
