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

// Shared domain types: raw captures, per-page records, the per-user
// dataset, and the eleven granularity conditions with their privacy order.

#pragma once

#include <array>
#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "puda/error.hpp"
#include "puda/time.hpp"

namespace puda {

enum class Sentiment { Positive, Neutral, Negative };

std::string_view sentiment_name(Sentiment s);
std::optional<Sentiment> parse_sentiment(std::string_view name);

struct Keyword {
  std::string text;  // normalized: trimmed, case-folded, NFC
  Sentiment sentiment = Sentiment::Neutral;
  double score = 0.0;  // [0, 1]

  friend bool operator==(const Keyword&, const Keyword&) = default;
};

/// Normalizes `text` and checks the score range. Throws InvalidArgument.
Keyword make_keyword(std::string_view text, Sentiment sentiment, double score);

struct PageCapture {
  std::string url;
  std::string title;
  std::string html_body;
  Timestamp captured_at;
  std::string user_id;

  friend bool operator==(const PageCapture&, const PageCapture&) = default;
};

/// Thrown when a capture fails validation; names the offending field.
class InvalidCaptureError : public Error {
 public:
  InvalidCaptureError(std::string field, const std::string& message)
      : Error(Errc::InvalidCapture, field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Ingestion-time checks. `now` is the ingestion clock; captures up to five
/// minutes ahead of it are tolerated.
void validate_capture(const PageCapture& capture, Timestamp now);

bool is_absolute_uri(std::string_view uri);

/// Path-safe user identifier: [A-Za-z0-9._-]{1,128}, not "." or "..".
bool is_valid_user_id(std::string_view user_id);

struct CaptureRef {
  std::string user_id;
  std::string url;
  Timestamp captured_at;

  friend bool operator==(const CaptureRef&, const CaptureRef&) = default;
};

std::string describe(const CaptureRef& ref);

struct PageRecord {
  CaptureRef capture_ref;
  std::string title;
  std::string summary_long;
  std::string summary_short;
  std::vector<Keyword> keywords;

  friend bool operator==(const PageRecord&, const PageRecord&) = default;
};

struct Profile {
  int age = 0;
  std::chrono::year_month_day date_of_birth;
  std::string gender;
  std::string address;
  std::string name;

  friend bool operator==(const Profile&, const Profile&) = default;
};

void validate_profile(const Profile& profile);

struct HistoryEntry {
  std::string url;
  std::string title;
  std::string summary;
  Timestamp captured_at;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

/// A 1-3 segment path into the category taxonomy, e.g.
/// /Travel/Hotels & Accommodations.
class CategoryPath {
 public:
  CategoryPath() = default;
  explicit CategoryPath(std::vector<std::string> segments);

  /// Parses the canonical "/A/B/C" form after trimming and NFC. Returns
  /// nullopt for anything that is not a well-formed path of depth 1-3.
  static std::optional<CategoryPath> parse(std::string_view text);

  const std::vector<std::string>& segments() const noexcept { return segments_; }
  int depth() const noexcept { return static_cast<int>(segments_.size()); }
  std::string canonical() const;
  CategoryPath parent() const;

  friend bool operator==(const CategoryPath&, const CategoryPath&) = default;
  friend auto operator<=>(const CategoryPath&, const CategoryPath&) = default;

 private:
  std::vector<std::string> segments_;
};

/// Records pipeline events a consumer of the dataset should know about,
/// such as the categorizer falling back to the offline stub.
struct ProvenanceNote {
  std::string event;
  int tier = 0;
  std::string detail;

  friend bool operator==(const ProvenanceNote&, const ProvenanceNote&) = default;
};

struct UserDataset {
  std::string user_id;
  Profile profile;
  std::vector<HistoryEntry> history_long;
  std::vector<HistoryEntry> history_short;
  std::vector<Keyword> keywords;
  std::map<int, std::vector<CategoryPath>> categories;  // tier -> subset
  Timestamp built_at;
  std::string pipeline_version;
  std::vector<ProvenanceNote> provenance;

  friend bool operator==(const UserDataset&, const UserDataset&) = default;
};

enum class SummaryVariant { Short, Long };

std::string_view variant_name(SummaryVariant v);
std::optional<SummaryVariant> parse_variant(std::string_view name);

/// The fixed keyword-score ladder.
enum class KeywordThreshold { T090, T085, T080, T075 };

double threshold_value(KeywordThreshold t);
/// "090", "085", "080", "075".
std::string_view threshold_code(KeywordThreshold t);
std::optional<KeywordThreshold> parse_threshold_code(std::string_view code);

/// One of the eleven user-context conditions.
class GranularityCondition {
 public:
  enum class Kind { NoData, ProfileOnly, Categories, Keywords, History };

  static GranularityCondition no_data();
  static GranularityCondition profile_only();
  /// tier must be 1, 2 or 3.
  static GranularityCondition categories(int tier);
  static GranularityCondition keywords(KeywordThreshold threshold);
  static GranularityCondition history(SummaryVariant variant);

  Kind kind() const noexcept { return kind_; }
  int tier() const noexcept { return tier_; }
  KeywordThreshold threshold() const noexcept { return threshold_; }
  SummaryVariant variant() const noexcept { return variant_; }

  /// 0 for NoData (most protective) through 10 for History(long).
  int protection_rank() const noexcept;

  /// Stable identifier, e.g. "no_data", "categories_2", "keywords_085".
  std::string label() const;
  static std::optional<GranularityCondition> parse(std::string_view label);

  friend bool operator==(const GranularityCondition& a,
                         const GranularityCondition& b) {
    return a.protection_rank() == b.protection_rank();
  }

 private:
  GranularityCondition(Kind kind, int tier, KeywordThreshold threshold,
                       SummaryVariant variant)
      : kind_(kind), tier_(tier), threshold_(threshold), variant_(variant) {}

  Kind kind_;
  int tier_ = 0;
  KeywordThreshold threshold_ = KeywordThreshold::T090;
  SummaryVariant variant_ = SummaryVariant::Short;
};

/// All eleven conditions, most protective first.
const std::array<GranularityCondition, 11>& all_conditions();

enum class Protection { MoreProtective, Equal, LessProtective };

/// Whether `a` protects privacy more than, equally to, or less than `b`.
Protection privacy_order(const GranularityCondition& a,
                         const GranularityCondition& b);

// Scope strings -------------------------------------------------------------

inline constexpr std::string_view kProfileScope = "puda:profile";
/// Bootstrap scope for resource-server registration; not a data scope.
inline constexpr std::string_view kRegisterScope = "puda:register";

/// The ten data scopes in privacy order.
const std::vector<std::string>& data_scopes();
bool is_data_scope(std::string_view scope);

/// The scope that grants the condition's own granularity; nullopt for NoData.
std::optional<std::string> granularity_scope(const GranularityCondition& c);

/// Scope required for a condition: empty for NoData, otherwise the profile
/// scope plus the granularity's own scope.
std::set<std::string> condition_scope(const GranularityCondition& c);

/// Inverse of granularity_scope for data scopes.
std::optional<GranularityCondition> scope_condition(std::string_view scope);

/// Splits a space-delimited OAuth scope parameter.
std::set<std::string> split_scopes(std::string_view scope_param);
std::string join_scopes(const std::set<std::string>& scopes);

}  // namespace puda
