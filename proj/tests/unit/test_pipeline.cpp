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

#include "puda/codec.hpp"
#include "puda/pipeline.hpp"
#include "test_support.hpp"

using namespace puda;
using namespace puda::testing;

namespace {

using GC = GranularityCondition;

PageCapture capture(std::string url, std::string body, std::string at) {
  return PageCapture{std::move(url), "Title", std::move(body), ts(at), "hanako"};
}

PageRecord record(std::string url, std::string at, std::vector<Keyword> keywords = {}) {
  PageRecord r;
  r.capture_ref = CaptureRef{"hanako", url, ts(at)};
  r.title = "T " + url;
  r.summary_long = "Long summary of " + url + ". More detail here.";
  r.summary_short = "Short " + url + ".";
  r.keywords = std::move(keywords);
  return r;
}

// Fails every categorize call the way an unreachable model server would.
class DownBackend final : public Backend {
 public:
  BackendResponse invoke(const BackendRequest& request) override {
    if (request.task == BackendTask::Categorize) {
      throw Error(Errc::TransportError, "connection refused");
    }
    return StubBackend().invoke(request);
  }
  std::string id() const override { return "down"; }
};

// Returns a fixed list of fabricated paths.
class FabricatingBackend final : public Backend {
 public:
  BackendResponse invoke(const BackendRequest& request) override {
    if (request.task != BackendTask::Categorize) return StubBackend().invoke(request);
    std::vector<std::string> made_up;
    for (int i = 0; i < 50; ++i) made_up.push_back("/Fabricated/Path " + std::to_string(i));
    return BackendResponse{request.task, made_up, id(), 0};
  }
  std::string id() const override { return "fabricating"; }
};

bool is_subset(const std::vector<Keyword>& a, const std::vector<Keyword>& b) {
  for (const auto& k : a) {
    if (std::find(b.begin(), b.end(), k) == b.end()) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("process_page composes the stub oracles") {
    auto c = capture("https://golf.example.com/a",
                     "<html><head><title>x</title></head><body><p>Golf is fun. "
                     "Golf courses near Tokyo.</p><p>Book an onsen after golf.</p></body></html>",
                     "2026-03-02T08:15:00.000Z");
    auto r = process_page(c, BackendSet::stub());
    CHECK(r.summary_long == "Golf is fun. Golf courses near Tokyo. Book an onsen after golf.");
    CHECK(r.summary_short == r.summary_long);
    CHECK(r.capture_ref == CaptureRef{"hanako", c.url, c.captured_at});
    // golf x3 is the maximum; every other content word once.
    REQUIRE_FALSE(r.keywords.empty());
    CHECK(r.keywords[0] == Keyword{"golf", Sentiment::Neutral, 1.0});
    for (std::size_t i = 1; i < r.keywords.size(); ++i) {
      CHECK(r.keywords[i].score == doctest::Approx(1.0 / 3.0));
    }
    std::set<std::string> rest;
    for (std::size_t i = 1; i < r.keywords.size(); ++i) rest.insert(r.keywords[i].text);
    CHECK(rest.count("courses") == 1);
    CHECK(rest.count("tokyo") == 1);
    CHECK(rest.count("onsen") == 1);
  }

  TEST_CASE("process_page rejects pages without visible text") {
    auto c = capture("https://x.example/empty", "<script>only()</script>",
                     "2026-03-02T08:15:00.000Z");
    try {
      process_page(c, BackendSet::stub());
      FAIL("processed an empty page");
    } catch (const PageProcessingError& e) {
      CHECK(e.code() == Errc::EmptyInput);
      CHECK(e.ref().url == c.url);
    }
  }

  TEST_CASE("process_pages reports failures and keeps order") {
    std::vector<PageCapture> cs = {
        capture("https://x.example/1", "<p>One onsen.</p>", "2026-03-02T08:00:00.000Z"),
        capture("https://x.example/2", "<style>x</style>", "2026-03-02T09:00:00.000Z"),
        capture("https://x.example/3", "<p>Three golf.</p>", "2026-03-02T10:00:00.000Z")};
    auto out = process_pages(cs, BackendSet::stub(), 3);
    REQUIRE(out.records.size() == 2);
    CHECK(out.records[0].capture_ref.url == "https://x.example/1");
    CHECK(out.records[1].capture_ref.url == "https://x.example/3");
    REQUIRE(out.failures.size() == 1);
    CHECK(out.failures[0].ref.url == "https://x.example/2");
    CHECK(out.failures[0].code == Errc::EmptyInput);
  }

  TEST_CASE("identical captures give identical records") {
    auto c = golden_captures().at(0);
    CHECK(process_page(c, BackendSet::stub()) == process_page(c, BackendSet::stub()));
  }

  TEST_CASE("history aggregation sorts newest first") {
    CHECK(aggregate_history({}, SummaryVariant::Long).empty());
    std::vector<PageRecord> rs = {record("https://b.example", "2026-03-02T08:00:00.000Z"),
                                  record("https://c.example", "2026-03-04T08:00:00.000Z"),
                                  record("https://a.example", "2026-03-02T08:00:00.000Z"),
                                  record("https://d.example", "2026-03-03T08:00:00.000Z")};
    auto h = aggregate_history(rs, SummaryVariant::Long);
    // Independent sort: by time descending then URL ascending.
    auto sorted = rs;
    std::sort(sorted.begin(), sorted.end(), [](const PageRecord& x, const PageRecord& y) {
      return std::tie(y.capture_ref.captured_at, x.capture_ref.url) <
             std::tie(x.capture_ref.captured_at, y.capture_ref.url);
    });
    REQUIRE(h.size() == sorted.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
      CHECK(h[i].url == sorted[i].capture_ref.url);
      CHECK(h[i].summary == sorted[i].summary_long);
      CHECK(h[i].title == sorted[i].title);
    }
    auto s = aggregate_history(rs, SummaryVariant::Short);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i].summary == sorted[i].summary_short);
  }

  TEST_CASE("keyword aggregation keeps the maximum") {
    std::vector<PageRecord> rs = {
        record("https://a.example", "2026-03-02T08:00:00.000Z",
               {{"onsen", Sentiment::Neutral, 0.4}, {"golf", Sentiment::Positive, 0.7}}),
        record("https://b.example", "2026-03-03T08:00:00.000Z",
               {{"onsen", Sentiment::Positive, 0.9}})};
    auto k = aggregate_keywords(rs);
    REQUIRE(k.size() == 2);
    CHECK(k[0] == Keyword{"onsen", Sentiment::Positive, 0.9});
    CHECK(k[1] == Keyword{"golf", Sentiment::Positive, 0.7});
    CHECK(aggregate_keywords({}).empty());
  }

  TEST_CASE("keyword aggregation: sentiment ties go to the earliest capture") {
    std::vector<PageRecord> rs = {
        record("https://late.example", "2026-03-05T08:00:00.000Z",
               {{"onsen", Sentiment::Negative, 0.8}}),
        record("https://early.example", "2026-03-01T08:00:00.000Z",
               {{"onsen", Sentiment::Positive, 0.8}})};
    auto k = aggregate_keywords(rs);
    REQUIRE(k.size() == 1);
    CHECK(k[0].sentiment == Sentiment::Positive);
  }

  TEST_CASE("keyword aggregation matches a brute-force group-by") {
    std::mt19937_64 rng(99);
    const std::vector<std::string> words = {"onsen", "golf", "hotel", "ryokan", "kyoto",
                                            "beppu", "trip",  "spa",   "kaiseki"};
    for (int round = 0; round < 200; ++round) {
      std::vector<PageRecord> rs;
      for (int p = 0, n = static_cast<int>(rng() % 6); p < n; ++p) {
        std::vector<Keyword> ks;
        std::set<std::string> used;
        for (int j = 0, m = static_cast<int>(rng() % 5); j < m; ++j) {
          auto w = words[rng() % words.size()];
          if (!used.insert(w).second) continue;
          ks.push_back({w, static_cast<Sentiment>(rng() % 3), static_cast<double>(rng() % 21) / 20.0});
        }
        rs.push_back(record("https://p.example/" + std::to_string(p),
                            "2026-03-0" + std::to_string(1 + rng() % 9) + "T08:00:00.000Z", ks));
      }
      auto merged = aggregate_keywords(rs);
      std::map<std::string, double> best;
      for (const auto& r : rs) {
        for (const auto& k : r.keywords) best[k.text] = std::max(best[k.text], k.score);
      }
      REQUIRE(merged.size() == best.size());
      for (std::size_t i = 0; i < merged.size(); ++i) {
        CHECK(merged[i].score == best[merged[i].text]);
        if (i > 0) {
          CHECK((merged[i - 1].score > merged[i].score ||
                 (merged[i - 1].score == merged[i].score && merged[i - 1].text < merged[i].text)));
        }
      }
    }
  }

  TEST_CASE("keyword filtering") {
    std::vector<Keyword> ks = {{"onsen", Sentiment::Neutral, 0.92}, {"golf", Sentiment::Neutral, 0.81}};
    auto out = filter_keywords(ks, 0.85);
    REQUIRE(out.size() == 1);
    CHECK(out[0].text == "onsen");
    CHECK(filter_keywords(ks, 0.0) == ks);
    CHECK(filter_keywords({}, 0.5).empty());
    std::vector<Keyword> edge = {{"exact", Sentiment::Neutral, 0.85}};
    CHECK(filter_keywords(edge, 0.85).size() == 1);
  }

  TEST_CASE("category context renders keywords inline") {
    std::vector<HistoryEntry> h = {{"https://x.example", "T", "Long summary.", ts("2026-03-02T08:00:00.000Z")}};
    std::vector<Keyword> k = {{"onsen", Sentiment::Positive, 0.5}};
    auto context = render_category_context(h, k);
    CHECK(context.find("Long summary.") != std::string::npos);
    CHECK(context.find("onsen (positive, 0.5") != std::string::npos);
    CHECK(context.find("https://") == std::string::npos);
  }

  TEST_CASE("category subsets stay inside the taxonomy") {
    const auto& tax = sample_taxonomy();
    std::vector<HistoryEntry> h = {{"https://hotels.example.com", "Hotels",
                                    "We compared hotels in Kyoto and booked one near the station.",
                                    ts("2026-03-02T08:00:00.000Z")}};
    auto stub = build_category_subset(h, {}, tax, 2, BackendSet::stub());
    std::vector<std::string> names;
    for (const auto& p : stub.paths) names.push_back(p.canonical());
    CHECK(std::find(names.begin(), names.end(), "/Travel/Hotels & Accommodations") != names.end());
    CHECK_FALSE(stub.fallback);
    CHECK(stub.paths.size() <= static_cast<std::size_t>(kDefaultCategoryItems));

    CHECK(build_category_subset({}, {}, tax, 2, BackendSet::stub()).paths.empty());

    auto fabricated = build_category_subset(
        h, {}, tax, 2, with_categorizer(std::make_shared<FabricatingBackend>()));
    for (const auto& p : fabricated.paths) CHECK(tax.contains(p.canonical()));
    for (const auto& p : fabricated.paths) CHECK(p.depth() == 2);
    CHECK(fabricated.fallback);  // nothing valid came back, so the stub stepped in
  }

  TEST_CASE("transport failures fall back to the stub and are recorded") {
    auto backends = with_categorizer(std::make_shared<DownBackend>());
    auto d = build_golden_dataset(backends);
    auto reference = build_golden_dataset();
    CHECK(d.categories == reference.categories);
    REQUIRE(d.provenance.size() == 3);
    for (const auto& note : d.provenance) {
      CHECK(note.event == "categorize_fallback");
      CHECK(note.detail.find("TransportError") != std::string::npos);
    }
    CHECK(reference.provenance.empty());
  }

  TEST_CASE("fuzzed categorizers never leak paths outside the tier") {
    const auto& tax = sample_taxonomy();
    auto golden = build_golden_dataset();
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto fuzz = std::make_shared<FuzzBackend>(seed, 1000, tax);
      for (int tier = 1; tier <= 3; ++tier) {
        auto subset = build_category_subset(golden.history_long, golden.keywords, tax, tier,
                                            with_categorizer(fuzz));
        auto allowed = tax.project_tier(tier);
        for (const auto& p : subset.paths) {
          CHECK(std::find(allowed.begin(), allowed.end(), p) != allowed.end());
        }
        auto direct = tax.validate_subset(fuzz->last_batch(), tier);
        for (const auto& p : direct) {
          CHECK(std::find(allowed.begin(), allowed.end(), p) != allowed.end());
        }
      }
    }
  }

  TEST_CASE("empty corpus gives an empty but valid dataset") {
    auto d = build_dataset("hanako", golden_profile(), {}, sample_taxonomy(), BackendSet::stub(),
                           golden_built_at());
    CHECK(d.history_long.empty());
    CHECK(d.history_short.empty());
    CHECK(d.keywords.empty());
    for (int k = 1; k <= 3; ++k) CHECK(d.categories.at(k).empty());
    CHECK(d.profile == golden_profile());
    CHECK(d.pipeline_version == kPipelineVersion);
  }

  TEST_CASE("golden dataset is pinned") {
    auto d = build_golden_dataset();
    CHECK(matches_golden(golden_dir() / "dataset.json", golden_dataset_text(d)));
    CHECK(d.history_long.size() == 25);
    CHECK(d.history_short.size() == 25);
  }

  TEST_CASE("rebuilds agree modulo built_at") {
    auto captures = golden_captures();
    auto records = process_pages(captures, BackendSet::stub(), 4).records;
    auto a = build_dataset("hanako", golden_profile(), records, sample_taxonomy(),
                           BackendSet::stub(), ts("2026-03-10T00:00:00.000Z"));
    auto b = build_dataset("hanako", golden_profile(), records, sample_taxonomy(),
                           BackendSet::stub(), ts("2026-03-11T00:00:00.000Z"));
    CHECK(a != b);
    CHECK(dataset_version(a) == dataset_version(b));
    b.built_at = a.built_at;
    CHECK(a == b);
  }

  TEST_CASE("golden dataset invariants") {
    auto d = build_golden_dataset();
    const auto& tax = sample_taxonomy();
    for (std::size_t i = 1; i < d.history_long.size(); ++i) {
      CHECK(d.history_long[i - 1].captured_at >= d.history_long[i].captured_at);
    }
    for (int k = 1; k <= 3; ++k) {
      for (const auto& p : d.categories.at(k)) {
        CHECK(p.depth() == k);
        CHECK(tax.contains(p.canonical()));
      }
    }
    // Every merged keyword appears in some page record.
    auto records = process_pages(golden_captures(), BackendSet::stub()).records;
    for (const auto& k : d.keywords) {
      bool found = false;
      for (const auto& r : records) {
        for (const auto& rk : r.keywords) found = found || rk.text == k.text;
      }
      CHECK_MESSAGE(found, k.text);
    }
    std::set<std::string> texts;
    for (const auto& k : d.keywords) CHECK(texts.insert(k.text).second);
  }

  TEST_CASE("bundles expose exactly the condition's fields") {
    auto d = build_golden_dataset();
    for (const auto& c : all_conditions()) {
      auto b = build_context(d, c);
      CHECK(b.serialized_bytes == b.canonical().size());
      auto j = b.to_json();
      CHECK(j.at("condition") == c.label());
      CHECK(j.contains("profile") == (c.kind() != GC::Kind::NoData));
      CHECK(j.contains("categories") == (c.kind() == GC::Kind::Categories));
      CHECK(j.contains("keywords") == (c.kind() == GC::Kind::Keywords));
      CHECK(j.contains("history") == (c.kind() == GC::Kind::History));
    }
    auto none = build_context(d, GC::no_data());
    CHECK(none.canonical() == R"({"condition":"no_data"})");
    CHECK(none.serialized_bytes == 23);

    auto kw90 = build_context(d, GC::keywords(KeywordThreshold::T090));
    for (const auto& k : *kw90.keywords) CHECK(k.score >= 0.90);
    auto shorter = build_context(d, GC::history(SummaryVariant::Short));
    auto longer = build_context(d, GC::history(SummaryVariant::Long));
    CHECK(shorter.serialized_bytes <= longer.serialized_bytes);
  }

  TEST_CASE("payload bytes are monotone within each family on the golden corpus") {
    auto d = build_golden_dataset();
    auto bytes = [&](const GC& c) { return build_context(d, c).serialized_bytes; };
    CHECK(bytes(GC::no_data()) <= bytes(GC::profile_only()));
    for (const auto& c : all_conditions()) {
      if (c.protection_rank() >= 2) CHECK(bytes(GC::profile_only()) <= bytes(c));
    }
    using KT = KeywordThreshold;
    CHECK(bytes(GC::keywords(KT::T090)) <= bytes(GC::keywords(KT::T085)));
    CHECK(bytes(GC::keywords(KT::T085)) <= bytes(GC::keywords(KT::T080)));
    CHECK(bytes(GC::keywords(KT::T080)) <= bytes(GC::keywords(KT::T075)));
    CHECK(bytes(GC::history(SummaryVariant::Short)) <= bytes(GC::history(SummaryVariant::Long)));
  }

  TEST_CASE("threshold nesting over random keyword sets") {
    std::mt19937_64 rng(424242);
    const double edges[] = {0.75, 0.80, 0.85, 0.90};
    auto d = build_golden_dataset();
    for (int round = 0; round < 1000; ++round) {
      std::vector<PageRecord> rs(1);
      std::set<std::string> used;
      for (int j = 0, n = static_cast<int>(rng() % 40); j < n; ++j) {
        double score = rng() % 4 == 0 ? std::nextafter(edges[rng() % 4], rng() % 2 ? 0.0 : 1.0)
                                      : static_cast<double>(rng() % 10001) / 10000.0;
        auto text = "k" + std::to_string(rng() % 100);
        if (!used.insert(text).second) continue;
        rs[0].keywords.push_back({text, static_cast<Sentiment>(rng() % 3), score});
      }
      d.keywords = aggregate_keywords(rs);
      std::vector<std::vector<Keyword>> ladder;
      for (auto t : {KeywordThreshold::T090, KeywordThreshold::T085, KeywordThreshold::T080,
                     KeywordThreshold::T075}) {
        auto b = build_context(d, GC::keywords(t));
        for (const auto& k : *b.keywords) CHECK(k.score >= threshold_value(t));
        std::size_t expected = std::count_if(d.keywords.begin(), d.keywords.end(),
                                             [&](const Keyword& k) { return k.score >= threshold_value(t); });
        CHECK(b.keywords->size() == expected);
        ladder.push_back(*b.keywords);
      }
      for (std::size_t i = 1; i < ladder.size(); ++i) CHECK(is_subset(ladder[i - 1], ladder[i]));
    }
  }

  TEST_CASE("scope fragments") {
    auto d = build_golden_dataset();
    CHECK(scope_fragment(d, "puda:profile") == Json{{"profile", d.profile}});
    auto kw = scope_fragment(d, "puda:keywords:085");
    for (const auto& k : kw.at("keywords")) CHECK(k.at("score").get<double>() >= 0.85);
    CHECK(scope_fragment(d, "puda:categories:2").at("categories") == Json(d.categories.at(2)));
    CHECK(scope_fragment(d, "puda:history:short").at("history") == Json(d.history_short));
    CHECK_THROWS_AS(scope_fragment(d, "puda:register"), Error);
  }
}
