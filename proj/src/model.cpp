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

#include "puda/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "puda/text.hpp"

namespace puda {

std::string_view sentiment_name(Sentiment s) {
  switch (s) {
    case Sentiment::Positive: return "positive";
    case Sentiment::Neutral: return "neutral";
    case Sentiment::Negative: return "negative";
  }
  return "neutral";
}

std::optional<Sentiment> parse_sentiment(std::string_view name) {
  if (name == "positive") return Sentiment::Positive;
  if (name == "neutral") return Sentiment::Neutral;
  if (name == "negative") return Sentiment::Negative;
  return std::nullopt;
}

Keyword make_keyword(std::string_view text, Sentiment sentiment, double score) {
  if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
    throw Error(Errc::InvalidArgument,
                "keyword score out of [0,1]: " + std::to_string(score));
  }
  std::string normalized = text::normalize_key(text);
  if (normalized.empty()) {
    throw Error(Errc::InvalidArgument, "keyword text empty after normalization");
  }
  return Keyword{std::move(normalized), sentiment, score};
}

bool is_absolute_uri(std::string_view uri) {
  // scheme ":" hier-part, with a non-empty authority for hierarchical
  // schemes written with "//".
  auto colon = uri.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  if (!std::isalpha(static_cast<unsigned char>(uri[0]))) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    char c = uri[i];
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' &&
        c != '.') {
      return false;
    }
  }
  for (char c : uri) {
    if (static_cast<unsigned char>(c) <= 0x20 || c == 0x7f) return false;
  }
  auto rest = uri.substr(colon + 1);
  if (rest.empty()) return false;
  if (rest.starts_with("//")) {
    auto authority = rest.substr(2);
    auto end = authority.find_first_of("/?#");
    authority = authority.substr(0, end);
    if (authority.empty()) return false;
  }
  return true;
}

bool is_valid_user_id(std::string_view user_id) {
  if (user_id.empty() || user_id.size() > 128) return false;
  if (user_id == "." || user_id == "..") return false;
  return std::all_of(user_id.begin(), user_id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' ||
           c == '_' || c == '-';
  });
}

void validate_capture(const PageCapture& capture, Timestamp now) {
  if (!is_valid_user_id(capture.user_id)) {
    throw InvalidCaptureError("user_id", "must match [A-Za-z0-9._-]{1,128}");
  }
  if (!is_absolute_uri(capture.url)) {
    throw InvalidCaptureError("url", "must be an absolute URI");
  }
  if (capture.html_body.empty()) {
    throw InvalidCaptureError("html_body", "must be non-empty");
  }
  if (capture.captured_at > now + std::chrono::minutes(5)) {
    throw InvalidCaptureError("captured_at",
                              "lies more than 5 minutes in the future");
  }
}

std::string describe(const CaptureRef& ref) {
  return ref.user_id + " " + ref.url + " @ " + format_rfc3339(ref.captured_at);
}

void validate_profile(const Profile& profile) {
  if (profile.age < 0) {
    throw Error(Errc::InvalidArgument, "profile age must be non-negative");
  }
  if (!profile.date_of_birth.ok()) {
    throw Error(Errc::InvalidArgument, "profile date_of_birth invalid");
  }
}

// CategoryPath --------------------------------------------------------------

CategoryPath::CategoryPath(std::vector<std::string> segments)
    : segments_(std::move(segments)) {}

std::optional<CategoryPath> CategoryPath::parse(std::string_view input) {
  std::string normalized = text::normalize_label(input);
  if (normalized.size() < 2 || normalized.front() != '/') return std::nullopt;
  std::vector<std::string> segments;
  std::size_t pos = 1;
  while (true) {
    auto next = normalized.find('/', pos);
    std::string segment = normalized.substr(
        pos, next == std::string::npos ? std::string::npos : next - pos);
    // Segments are stored trimmed; a segment that only differs by padding
    // would not be canonical.
    if (segment.empty() || text::trim(segment) != segment) return std::nullopt;
    segments.push_back(std::move(segment));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (segments.size() > 3) return std::nullopt;
  return CategoryPath(std::move(segments));
}

std::string CategoryPath::canonical() const {
  std::string out;
  for (const auto& segment : segments_) {
    out += '/';
    out += segment;
  }
  return out;
}

CategoryPath CategoryPath::parent() const {
  if (segments_.size() <= 1) return {};
  return CategoryPath(
      std::vector<std::string>(segments_.begin(), segments_.end() - 1));
}

// Conditions ----------------------------------------------------------------

std::string_view variant_name(SummaryVariant v) {
  return v == SummaryVariant::Short ? "short" : "long";
}

std::optional<SummaryVariant> parse_variant(std::string_view name) {
  if (name == "short") return SummaryVariant::Short;
  if (name == "long") return SummaryVariant::Long;
  return std::nullopt;
}

double threshold_value(KeywordThreshold t) {
  switch (t) {
    case KeywordThreshold::T090: return 0.90;
    case KeywordThreshold::T085: return 0.85;
    case KeywordThreshold::T080: return 0.80;
    case KeywordThreshold::T075: return 0.75;
  }
  return 1.0;
}

std::string_view threshold_code(KeywordThreshold t) {
  switch (t) {
    case KeywordThreshold::T090: return "090";
    case KeywordThreshold::T085: return "085";
    case KeywordThreshold::T080: return "080";
    case KeywordThreshold::T075: return "075";
  }
  return "090";
}

std::optional<KeywordThreshold> parse_threshold_code(std::string_view code) {
  for (auto t : {KeywordThreshold::T090, KeywordThreshold::T085,
                 KeywordThreshold::T080, KeywordThreshold::T075}) {
    if (threshold_code(t) == code) return t;
  }
  return std::nullopt;
}

GranularityCondition GranularityCondition::no_data() {
  return {Kind::NoData, 0, KeywordThreshold::T090, SummaryVariant::Short};
}

GranularityCondition GranularityCondition::profile_only() {
  return {Kind::ProfileOnly, 0, KeywordThreshold::T090, SummaryVariant::Short};
}

GranularityCondition GranularityCondition::categories(int tier) {
  if (tier < 1 || tier > 3) {
    throw Error(Errc::InvalidArgument, "category tier must be 1, 2 or 3");
  }
  return {Kind::Categories, tier, KeywordThreshold::T090, SummaryVariant::Short};
}

GranularityCondition GranularityCondition::keywords(KeywordThreshold threshold) {
  return {Kind::Keywords, 0, threshold, SummaryVariant::Short};
}

GranularityCondition GranularityCondition::history(SummaryVariant variant) {
  return {Kind::History, 0, KeywordThreshold::T090, variant};
}

int GranularityCondition::protection_rank() const noexcept {
  switch (kind_) {
    case Kind::NoData: return 0;
    case Kind::ProfileOnly: return 1;
    case Kind::Categories: return 1 + tier_;
    case Kind::Keywords: return 5 + static_cast<int>(threshold_);
    case Kind::History: return variant_ == SummaryVariant::Short ? 9 : 10;
  }
  return 0;
}

std::string GranularityCondition::label() const {
  switch (kind_) {
    case Kind::NoData: return "no_data";
    case Kind::ProfileOnly: return "profile";
    case Kind::Categories: return "categories_" + std::to_string(tier_);
    case Kind::Keywords:
      return "keywords_" + std::string(threshold_code(threshold_));
    case Kind::History: return "history_" + std::string(variant_name(variant_));
  }
  return {};
}

std::optional<GranularityCondition> GranularityCondition::parse(
    std::string_view label) {
  for (const auto& c : all_conditions()) {
    if (c.label() == label) return c;
  }
  return std::nullopt;
}

const std::array<GranularityCondition, 11>& all_conditions() {
  static const std::array<GranularityCondition, 11> conditions = {
      GranularityCondition::no_data(),
      GranularityCondition::profile_only(),
      GranularityCondition::categories(1),
      GranularityCondition::categories(2),
      GranularityCondition::categories(3),
      GranularityCondition::keywords(KeywordThreshold::T090),
      GranularityCondition::keywords(KeywordThreshold::T085),
      GranularityCondition::keywords(KeywordThreshold::T080),
      GranularityCondition::keywords(KeywordThreshold::T075),
      GranularityCondition::history(SummaryVariant::Short),
      GranularityCondition::history(SummaryVariant::Long),
  };
  return conditions;
}

Protection privacy_order(const GranularityCondition& a,
                         const GranularityCondition& b) {
  int ra = a.protection_rank();
  int rb = b.protection_rank();
  if (ra < rb) return Protection::MoreProtective;
  if (ra > rb) return Protection::LessProtective;
  return Protection::Equal;
}

// Scopes --------------------------------------------------------------------

std::optional<std::string> granularity_scope(const GranularityCondition& c) {
  using Kind = GranularityCondition::Kind;
  switch (c.kind()) {
    case Kind::NoData: return std::nullopt;
    case Kind::ProfileOnly: return std::string(kProfileScope);
    case Kind::Categories: return "puda:categories:" + std::to_string(c.tier());
    case Kind::Keywords:
      return "puda:keywords:" + std::string(threshold_code(c.threshold()));
    case Kind::History:
      return "puda:history:" + std::string(variant_name(c.variant()));
  }
  return std::nullopt;
}

const std::vector<std::string>& data_scopes() {
  static const std::vector<std::string> scopes = [] {
    std::vector<std::string> out;
    for (const auto& c : all_conditions()) {
      if (auto s = granularity_scope(c)) out.push_back(*s);
    }
    return out;
  }();
  return scopes;
}

bool is_data_scope(std::string_view scope) {
  const auto& all = data_scopes();
  return std::find(all.begin(), all.end(), scope) != all.end();
}

std::set<std::string> condition_scope(const GranularityCondition& c) {
  std::set<std::string> out;
  if (c.kind() == GranularityCondition::Kind::NoData) return out;
  out.insert(std::string(kProfileScope));
  out.insert(*granularity_scope(c));
  return out;
}

std::optional<GranularityCondition> scope_condition(std::string_view scope) {
  for (const auto& c : all_conditions()) {
    auto s = granularity_scope(c);
    if (s && *s == scope) return c;
  }
  return std::nullopt;
}

std::set<std::string> split_scopes(std::string_view scope_param) {
  std::set<std::string> out;
  std::size_t pos = 0;
  while (pos < scope_param.size()) {
    auto end = scope_param.find(' ', pos);
    if (end == std::string_view::npos) end = scope_param.size();
    if (end > pos) out.emplace(scope_param.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

std::string join_scopes(const std::set<std::string>& scopes) {
  std::string out;
  for (const auto& s : scopes) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

}  // namespace puda
