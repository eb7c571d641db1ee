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

// The generative-task contract (summaries, keywords, categories) and its
// two implementations: a deterministic offline stub and an HTTP client for
// model servers speaking the JSON wire protocol below.
//
//   request:  {"task", "input_text", "allowed_categories"?, "max_items"}
//   response: {"task", "payload", "backend_id"}

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "puda/codec.hpp"
#include "puda/model.hpp"

namespace puda {

enum class BackendTask { SummarizeLong, SummarizeShort, ExtractKeywords, Categorize };

std::string_view task_name(BackendTask task);
std::optional<BackendTask> parse_task(std::string_view name);

struct BackendRequest {
  BackendTask task = BackendTask::SummarizeLong;
  std::string input_text;
  std::vector<CategoryPath> allowed_categories;  // categorize only
  int max_items = 1;
};

/// Throws EmptyInput, EmptyAllowedList or InvalidArgument.
void validate_request(const BackendRequest& request);

using BackendPayload =
    std::variant<std::string, std::vector<Keyword>, std::vector<std::string>>;

struct BackendResponse {
  BackendTask task = BackendTask::SummarizeLong;
  BackendPayload payload;
  std::string backend_id;
  std::int64_t elapsed_ms = 0;
};

Json request_to_json(const BackendRequest& request);
BackendRequest request_from_json(const Json& j);
Json response_to_json(const BackendResponse& response);
/// Decodes a wire response and checks it answers `expected`; any mismatch
/// or ill-typed payload is MalformedResponse.
BackendResponse response_from_json(const Json& j, BackendTask expected);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendResponse invoke(const BackendRequest& request) = 0;
  virtual std::string id() const = 0;
};

inline constexpr std::size_t kLongSummaryWords = 200;
inline constexpr std::size_t kShortSummaryWords = 40;
inline constexpr int kDefaultPageKeywords = 20;

// Typed task helpers. Each validates the request, invokes the backend and
// checks the payload shape.
std::string summarize(Backend& backend, std::string_view text, SummaryVariant variant);
std::vector<Keyword> extract_keywords(Backend& backend, std::string_view text, int max_items);
std::vector<std::string> categorize(Backend& backend, std::string_view context,
                                    std::span<const CategoryPath> allowed, int max_items);

/// Stopwords and a polarity lexicon used by the stub. Both are plain text
/// config files (see data/lexicon).
struct Lexicon {
  std::unordered_set<std::string> stopwords;
  std::unordered_map<std::string, Sentiment> polarity;

  static Lexicon load(const std::filesystem::path& directory);
  /// Loads from $PUDA_LEXICON_DIR, falling back to the shipped data dir.
  static std::shared_ptr<const Lexicon> shared_default();

  /// Token filter shared by keyword extraction and categorization.
  bool is_content_token(const std::string& token) const;
};

/// Deterministic model-free backend. Pure: safe to call concurrently.
class StubBackend final : public Backend {
 public:
  static constexpr std::string_view kId = "stub";

  explicit StubBackend(std::shared_ptr<const Lexicon> lexicon = Lexicon::shared_default());

  BackendResponse invoke(const BackendRequest& request) override;
  std::string id() const override { return std::string(kId); }

  /// Leading whole sentences of `text` within the variant's word budget.
  /// The short variant is taken from the long output.
  std::string summary(std::string_view text, SummaryVariant variant) const;
  std::vector<Keyword> keywords(std::string_view text, int max_items) const;
  std::vector<std::string> categories(std::string_view context,
                                      std::span<const CategoryPath> allowed,
                                      int max_items) const;

 private:
  std::shared_ptr<const Lexicon> lexicon_;
};

/// Leading whole sentences of `text` totalling at most `budget` words.
/// Text within budget is returned unchanged; a single over-long first
/// sentence is cut at the budget.
std::string lead_sentences(std::string_view text, std::size_t budget);

/// Sends each request as one HTTP POST to `endpoint`.
class RemoteBackend final : public Backend {
 public:
  explicit RemoteBackend(std::string endpoint,
                         std::chrono::milliseconds timeout = std::chrono::seconds(60));

  /// Throws Timeout, TransportError or MalformedResponse.
  BackendResponse invoke(const BackendRequest& request) override;
  std::string id() const override { return "remote:" + endpoint_; }

 private:
  std::string endpoint_;
  std::chrono::milliseconds timeout_;
};

/// One backend per task. Absent configuration means the stub.
struct BackendSet {
  std::shared_ptr<Backend> summarize;
  std::shared_ptr<Backend> keywords;
  std::shared_ptr<Backend> categorize;

  static BackendSet stub();
  /// Reads backend.{summarize,keywords,categorize}.url from a config object.
  static BackendSet from_config(const Json& config);

  bool all_stub() const;
};

}  // namespace puda
