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

#include "puda/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <thread>

#include "puda/crypto.hpp"
#include "puda/text.hpp"

namespace puda {

// Per-page stage ------------------------------------------------------------

PageRecord process_page(const PageCapture& capture, const BackendSet& backends) {
  CaptureRef ref{capture.user_id, capture.url, capture.captured_at};
  try {
    std::string body = extract_text(capture.html_body);
    if (body.empty()) {
      throw Error(Errc::EmptyInput, "page has no visible text");
    }
    PageRecord record;
    record.capture_ref = ref;
    record.title = capture.title;
    record.summary_long = summarize(*backends.summarize, body, SummaryVariant::Long);
    record.summary_short =
        summarize(*backends.summarize, record.summary_long, SummaryVariant::Short);
    if (text::word_count(record.summary_short) > text::word_count(record.summary_long)) {
      throw Error(Errc::MalformedResponse, "short summary longer than long summary");
    }
    record.keywords = extract_keywords(*backends.keywords, body, kDefaultPageKeywords);
    return record;
  } catch (const PageProcessingError&) {
    throw;
  } catch (const Error& e) {
    throw PageProcessingError(e.code(), ref, e.what());
  }
}

ProcessingOutcome process_pages(std::span<const PageCapture> captures,
                                const BackendSet& backends, unsigned parallelism) {
  std::vector<std::optional<PageRecord>> slots(captures.size());
  std::vector<std::optional<PageFailure>> failures(captures.size());

  auto work = [&](std::size_t i) {
    try {
      slots[i] = process_page(captures[i], backends);
    } catch (const PageProcessingError& e) {
      failures[i] = PageFailure{e.ref(), e.code(), e.what()};
    }
  };

  parallelism = std::max(1u, std::min<unsigned>(parallelism,
                                                static_cast<unsigned>(captures.size())));
  if (parallelism <= 1) {
    for (std::size_t i = 0; i < captures.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < parallelism; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < captures.size(); i = next++) work(i);
      });
    }
  }

  ProcessingOutcome outcome;
  for (std::size_t i = 0; i < captures.size(); ++i) {
    if (slots[i]) outcome.records.push_back(std::move(*slots[i]));
    if (failures[i]) outcome.failures.push_back(std::move(*failures[i]));
  }
  return outcome;
}

// Per-user stage ------------------------------------------------------------

std::vector<HistoryEntry> aggregate_history(std::span<const PageRecord> records,
                                            SummaryVariant variant) {
  std::vector<HistoryEntry> entries;
  entries.reserve(records.size());
  for (const auto& r : records) {
    entries.push_back(HistoryEntry{
        r.capture_ref.url, r.title,
        variant == SummaryVariant::Long ? r.summary_long : r.summary_short,
        r.capture_ref.captured_at});
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const HistoryEntry& a, const HistoryEntry& b) {
                     if (a.captured_at != b.captured_at) return a.captured_at > b.captured_at;
                     return a.url < b.url;
                   });
  return entries;
}

std::vector<Keyword> aggregate_keywords(std::span<const PageRecord> records) {
  struct Best {
    Keyword keyword;
    Timestamp seen_at;
  };
  std::map<std::string, Best> merged;
  for (const auto& record : records) {
    for (const auto& k : record.keywords) {
      auto at = record.capture_ref.captured_at;
      auto [it, inserted] = merged.try_emplace(k.text, Best{k, at});
      if (inserted) continue;
      Best& best = it->second;
      if (k.score > best.keyword.score ||
          (k.score == best.keyword.score && at < best.seen_at)) {
        best = Best{k, at};
      }
    }
  }
  std::vector<Keyword> out;
  out.reserve(merged.size());
  for (auto& [_, best] : merged) out.push_back(std::move(best.keyword));
  std::stable_sort(out.begin(), out.end(), [](const Keyword& a, const Keyword& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.text < b.text;
  });
  return out;
}

std::vector<Keyword> filter_keywords(std::span<const Keyword> keywords, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(Errc::InvalidArgument, "threshold must lie in [0,1]");
  }
  std::vector<Keyword> out;
  std::copy_if(keywords.begin(), keywords.end(), std::back_inserter(out),
               [&](const Keyword& k) { return k.score >= threshold; });
  return out;
}

std::string render_category_context(std::span<const HistoryEntry> history_long,
                                     std::span<const Keyword> keywords) {
  std::string out;
  if (!history_long.empty()) {
    out += "Browsing history:\n";
    for (const auto& entry : history_long) {
      out += "- ";
      out += entry.title;
      out += ": ";
      out += entry.summary;
      out += '\n';
    }
  }
  if (!keywords.empty()) {
    out += "Keywords:\n";
    char score[16];
    for (const auto& k : keywords) {
      std::snprintf(score, sizeof(score), "%.2f", k.score);
      out += k.text;
      out += " (";
      out += sentiment_name(k.sentiment);
      out += ", ";
      out += score;
      out += ")\n";
    }
  }
  return out;
}

CategorySubset build_category_subset(std::span<const HistoryEntry> history_long,
                                     std::span<const Keyword> keywords,
                                     const CategoryTaxonomy& taxonomy, int tier,
                                     const BackendSet& backends, int max_items) {
  auto allowed = taxonomy.project_tier(tier);
  if (allowed.empty()) {
    throw Error(Errc::InvalidArgument,
                "taxonomy has no categories at tier " + std::to_string(tier));
  }
  CategorySubset subset;
  if (history_long.empty() && keywords.empty()) return subset;

  std::string context = render_category_context(history_long, keywords);
  auto capped = [&](std::vector<CategoryPath> paths) {
    if (paths.size() > static_cast<std::size_t>(max_items)) paths.resize(max_items);
    return paths;
  };

  std::string reason;
  try {
    auto candidates = categorize(*backends.categorize, context, allowed, max_items);
    subset.paths = capped(taxonomy.validate_subset(candidates, tier));
    if (!subset.paths.empty() || backends.categorize->id() == StubBackend::kId) {
      return subset;
    }
    reason = "backend returned no valid category";
  } catch (const Error& e) {
    if (e.code() != Errc::TransportError && e.code() != Errc::Timeout &&
        e.code() != Errc::MalformedResponse) {
      throw;
    }
    reason = e.what();
  }

  StubBackend fallback;
  subset.paths = capped(
      taxonomy.validate_subset(fallback.categories(context, allowed, max_items), tier));
  subset.fallback = ProvenanceNote{"categorize_fallback", tier, reason};
  return subset;
}

UserDataset build_dataset(const std::string& user_id, const Profile& profile,
                          std::span<const PageRecord> records,
                          const CategoryTaxonomy& taxonomy, const BackendSet& backends,
                          Timestamp built_at) {
  validate_profile(profile);
  UserDataset dataset;
  dataset.user_id = user_id;
  dataset.profile = profile;
  dataset.history_long = aggregate_history(records, SummaryVariant::Long);
  dataset.history_short = aggregate_history(records, SummaryVariant::Short);
  dataset.keywords = aggregate_keywords(records);
  for (int tier = 1; tier <= 3; ++tier) {
    auto subset = build_category_subset(dataset.history_long, dataset.keywords, taxonomy,
                                        tier, backends);
    dataset.categories[tier] = std::move(subset.paths);
    if (subset.fallback) dataset.provenance.push_back(std::move(*subset.fallback));
  }
  dataset.built_at = built_at;
  dataset.pipeline_version = std::string(kPipelineVersion);
  return dataset;
}

std::string dataset_version(const UserDataset& dataset) {
  Json j = dataset;
  j.erase("built_at");
  return crypto::sha256_hex(canonical_dump(j)).substr(0, 16);
}

// Context bundles -----------------------------------------------------------

Json ContextBundle::to_json() const {
  Json j{{"condition", condition.label()}};
  if (profile) j["profile"] = *profile;
  if (categories) j["categories"] = *categories;
  if (keywords) j["keywords"] = *keywords;
  if (history) j["history"] = *history;
  return j;
}

std::string ContextBundle::canonical() const { return canonical_dump(to_json()); }

ContextBundle build_context(const UserDataset& dataset, const GranularityCondition& condition) {
  using Kind = GranularityCondition::Kind;
  ContextBundle bundle;
  bundle.condition = condition;
  if (condition.kind() != Kind::NoData) bundle.profile = dataset.profile;
  switch (condition.kind()) {
    case Kind::NoData:
    case Kind::ProfileOnly:
      break;
    case Kind::Categories: {
      auto it = dataset.categories.find(condition.tier());
      bundle.categories =
          it == dataset.categories.end() ? std::vector<CategoryPath>{} : it->second;
      break;
    }
    case Kind::Keywords:
      bundle.keywords = filter_keywords(dataset.keywords, threshold_value(condition.threshold()));
      break;
    case Kind::History:
      bundle.history = condition.variant() == SummaryVariant::Long ? dataset.history_long
                                                                    : dataset.history_short;
      break;
  }
  bundle.serialized_bytes = bundle.canonical().size();
  return bundle;
}

Json scope_fragment(const UserDataset& dataset, std::string_view scope) {
  auto condition = scope_condition(scope);
  if (!condition) {
    throw Error(Errc::InvalidScopeString, "not a data scope: " + std::string(scope));
  }
  Json bundle = build_context(dataset, *condition).to_json();
  using Kind = GranularityCondition::Kind;
  const char* field = "profile";
  switch (condition->kind()) {
    case Kind::Categories: field = "categories"; break;
    case Kind::Keywords: field = "keywords"; break;
    case Kind::History: field = "history"; break;
    default: break;
  }
  return Json{{field, bundle.at(field)}};
}

}  // namespace puda
