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

// The dataset transformation: raw captures become per-page records, which
// are aggregated into a per-user dataset holding detailed history, scored
// keywords and taxonomy-bounded category subsets. build_context then cuts
// the dataset down to what one granularity condition exposes.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "puda/backend.hpp"
#include "puda/codec.hpp"
#include "puda/model.hpp"
#include "puda/taxonomy.hpp"

namespace puda {

inline constexpr std::string_view kPipelineVersion = "puda-pipeline/1";
inline constexpr int kDefaultCategoryItems = 10;

/// Visible text of an HTML document: script, style and head content
/// removed, tags stripped, entities decoded, white space collapsed. Never
/// fails; malformed markup is scanned as best it can be.
std::string extract_text(std::string_view html);

/// A page that could not be processed. Keeps the original error code.
class PageProcessingError : public Error {
 public:
  PageProcessingError(Errc code, CaptureRef ref, const std::string& message)
      : Error(code, describe(ref) + ": " + message), ref_(std::move(ref)) {}
  const CaptureRef& ref() const noexcept { return ref_; }

 private:
  CaptureRef ref_;
};

PageRecord process_page(const PageCapture& capture, const BackendSet& backends);

struct PageFailure {
  CaptureRef ref;
  Errc code;
  std::string message;
};

struct ProcessingOutcome {
  std::vector<PageRecord> records;  // in capture order
  std::vector<PageFailure> failures;
};

/// Runs process_page over every capture, optionally on several threads.
/// Failed pages are reported, never dropped silently.
ProcessingOutcome process_pages(std::span<const PageCapture> captures,
                                const BackendSet& backends, unsigned parallelism = 1);

/// Newest first; equal timestamps ordered by URL.
std::vector<HistoryEntry> aggregate_history(std::span<const PageRecord> records,
                                            SummaryVariant variant);

/// Merges per-page keywords by text keeping the highest score. Sorted by
/// score descending, then text ascending.
std::vector<Keyword> aggregate_keywords(std::span<const PageRecord> records);

std::vector<Keyword> filter_keywords(std::span<const Keyword> keywords, double threshold);

/// The categorizer input: every history entry's long summary followed by
/// every keyword as a "text (sentiment, score)" line.
std::string render_category_context(std::span<const HistoryEntry> history_long,
                                     std::span<const Keyword> keywords);

struct CategorySubset {
  std::vector<CategoryPath> paths;
  std::optional<ProvenanceNote> fallback;  // set when the stub had to step in
};

/// Always returns a subset of taxonomy.project_tier(tier).
CategorySubset build_category_subset(std::span<const HistoryEntry> history_long,
                                     std::span<const Keyword> keywords,
                                     const CategoryTaxonomy& taxonomy, int tier,
                                     const BackendSet& backends,
                                     int max_items = kDefaultCategoryItems);

UserDataset build_dataset(const std::string& user_id, const Profile& profile,
                          std::span<const PageRecord> records,
                          const CategoryTaxonomy& taxonomy, const BackendSet& backends,
                          Timestamp built_at);

/// Content hash of the dataset, ignoring built_at. Two builds over the same
/// inputs share a version.
std::string dataset_version(const UserDataset& dataset);

/// The user context handed to a consumer under one condition.
struct ContextBundle {
  GranularityCondition condition = GranularityCondition::no_data();
  std::optional<Profile> profile;
  std::optional<std::vector<CategoryPath>> categories;
  std::optional<std::vector<Keyword>> keywords;
  std::optional<std::vector<HistoryEntry>> history;
  std::size_t serialized_bytes = 0;

  /// Canonical form: condition label plus the populated fields.
  Json to_json() const;
  std::string canonical() const;
};

ContextBundle build_context(const UserDataset& dataset, const GranularityCondition& condition);

/// The slice of a bundle served for one data scope, e.g. {"keywords": [...]}
/// for puda:keywords:085. Throws InvalidScopeString for non-data scopes.
Json scope_fragment(const UserDataset& dataset, std::string_view scope);

}  // namespace puda
