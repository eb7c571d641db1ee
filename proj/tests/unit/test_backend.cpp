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
#include <httplib.h>

#include <random>
#include <thread>

#include "puda/backend.hpp"
#include "puda/http_util.hpp"
#include "puda/text.hpp"
#include "test_support.hpp"

using namespace puda;

namespace {

Errc error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::InvalidArgument;
}

// A model server double that answers every request with `reply`.
struct FakeModelServer {
  explicit FakeModelServer(std::function<Json(const Json&)> reply,
                           std::chrono::milliseconds delay = {}) {
    host.server().Post("/v1", [reply, delay](const httplib::Request& req, httplib::Response& res) {
      if (delay.count() > 0) std::this_thread::sleep_for(delay);
      res.set_content(reply(Json::parse(req.body)).dump(), "application/json");
    });
    host.start("127.0.0.1", 0);
  }
  std::string url() const { return host.origin() + "/v1"; }
  http::ServiceHost host;
};

std::vector<Keyword> kw(StubBackend& stub, std::string_view text, int max) {
  return extract_keywords(stub, text, max);
}

}  // namespace

TEST_SUITE("backend") {
  TEST_CASE("stub keywords: hand computed frequencies") {
    StubBackend stub;
    auto out = kw(stub, "golf golf onsen", 10);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == Keyword{"golf", Sentiment::Neutral, 1.0});
    CHECK(out[1] == Keyword{"onsen", Sentiment::Neutral, 0.5});
  }

  TEST_CASE("stub keywords: stopwords, short tokens, ties and limits") {
    StubBackend stub;
    CHECK(kw(stub, "the and of it is to", 10).empty());
    // "go" is too short; ties keep first occurrence order.
    auto out = kw(stub, "go ryokan onsen ryokan onsen kaiseki", 2);
    REQUIRE(out.size() == 2);
    CHECK(out[0].text == "ryokan");
    CHECK(out[1].text == "onsen");
    CHECK(out[0].score == 1.0);
    CHECK(out[1].score == 1.0);
  }

  TEST_CASE("stub keywords carry lexicon sentiment") {
    StubBackend stub;
    auto lexicon = Lexicon::shared_default();
    std::string positive, negative;
    for (const auto& [word, s] : lexicon->polarity) {
      if (s == Sentiment::Positive && positive.empty()) positive = word;
      if (s == Sentiment::Negative && negative.empty()) negative = word;
    }
    REQUIRE_FALSE(positive.empty());
    REQUIRE_FALSE(negative.empty());
    auto out = kw(stub, positive + " " + negative, 10);
    REQUIRE(out.size() == 2);
    CHECK(out[0].sentiment == Sentiment::Positive);
    CHECK(out[1].sentiment == Sentiment::Negative);
  }

  TEST_CASE("stub keyword properties on random text") {
    StubBackend stub;
    std::mt19937_64 rng(7);
    const std::vector<std::string> vocab = {"onsen", "golf", "hotel", "the",  "ryokan", "trip",
                                            "温泉",  "ONSEN", "Golf", "budget", "a", "kyoto"};
    for (int i = 0; i < 200; ++i) {
      std::string text;
      for (int w = 0, n = 1 + static_cast<int>(rng() % 60); w < n; ++w) {
        text += vocab[rng() % vocab.size()] + (rng() % 5 == 0 ? ". " : " ");
      }
      int max = 1 + static_cast<int>(rng() % 8);
      auto out = kw(stub, text, max);
      CHECK(out.size() <= static_cast<std::size_t>(max));
      for (std::size_t j = 0; j < out.size(); ++j) {
        CHECK(out[j].score >= 0.0);
        CHECK(out[j].score <= 1.0);
        if (j > 0) CHECK(out[j - 1].score >= out[j].score);
      }
      CHECK(kw(stub, text, max) == out);  // deterministic
    }
  }

  TEST_CASE("stub summaries: lead sentences within the word budget") {
    // A 500-word article built from sentences of known length.
    std::mt19937_64 rng(11);
    std::vector<std::string> sentences;
    std::size_t words = 0;
    while (words < 500) {
      std::size_t n = 5 + rng() % 20;
      std::string s;
      for (std::size_t i = 0; i < n; ++i) s += (i ? " word" : "Word") + std::to_string(words + i);
      s += (rng() % 3 == 0) ? "!" : ".";
      sentences.push_back(s);
      words += n;
    }
    std::string article;
    for (const auto& s : sentences) article += (article.empty() ? "" : " ") + s;

    // Oracle: keep whole sentences while the running total stays within budget.
    auto oracle = [&](std::size_t budget) {
      std::string out;
      std::size_t total = 0;
      for (const auto& s : sentences) {
        std::size_t n = text::word_count(s);
        if (total + n > budget) break;
        total += n;
        out += (out.empty() ? "" : " ") + s;
      }
      return out;
    };

    StubBackend stub;
    auto long_form = summarize(stub, article, SummaryVariant::Long);
    auto short_form = summarize(stub, article, SummaryVariant::Short);
    CHECK(long_form == oracle(kLongSummaryWords));
    CHECK(short_form == oracle(kShortSummaryWords));
    CHECK(text::word_count(long_form) <= 200);
    CHECK(text::word_count(short_form) <= 40);
    CHECK(article.starts_with(long_form));
  }

  TEST_CASE("stub summaries: short text unchanged, empty rejected") {
    StubBackend stub;
    std::string t = "Hakone is close to Tokyo. The onsen are relaxing.";
    CHECK(summarize(stub, t, SummaryVariant::Long) == t);
    CHECK(summarize(stub, t, SummaryVariant::Short) == t);
    CHECK(error_of([&] { summarize(stub, "", SummaryVariant::Long); }) == Errc::EmptyInput);
    CHECK(error_of([&] { extract_keywords(stub, "", 10); }) == Errc::EmptyInput);
  }

  TEST_CASE("lead sentences handle ideographic stops and long first sentences") {
    CHECK(lead_sentences("温泉 に 行った。ゴルフ も 楽しんだ。", 3) == "温泉 に 行った。");
    CHECK(lead_sentences("one two three four five.", 3) == "one two three");
    CHECK(lead_sentences("Ends with ellipsis... Next one.", 3) == "Ends with ellipsis...");
  }

  TEST_CASE("short summary never longer than long summary") {
    StubBackend stub;
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
      std::string text;
      for (int w = 0, n = 1 + static_cast<int>(rng() % 400); w < n; ++w) {
        text += "w" + std::to_string(rng() % 50) + (rng() % 9 == 0 ? ". " : " ");
      }
      auto l = summarize(stub, text, SummaryVariant::Long);
      auto s = summarize(stub, text, SummaryVariant::Short);
      CHECK(text::word_count(s) <= text::word_count(l));
      CHECK(text::word_count(l) <= 200);
      CHECK(text::word_count(s) <= 40);
    }
  }

  TEST_CASE("stub categorizer: overlap ranking") {
    StubBackend stub;
    auto allowed = puda::testing::sample_taxonomy().project_tier(2);
    auto out = categorize(stub, "We compared hotels near the station.", allowed, 10);
    REQUIRE_FALSE(out.empty());

    // Recompute overlaps by hand: tokens of each label against the context.
    auto lexicon = Lexicon::shared_default();
    std::set<std::string> context;
    for (auto& t : text::letter_tokens("We compared hotels near the station.")) {
      if (lexicon->is_content_token(t)) context.insert(t);
    }
    std::size_t best = 0;
    std::string first_best;
    for (const auto& p : allowed) {
      std::set<std::string> label;
      for (const auto& seg : p.segments()) {
        for (auto& t : text::letter_tokens(seg)) {
          if (lexicon->is_content_token(t)) label.insert(t);
        }
      }
      std::size_t overlap = 0;
      for (const auto& t : label) overlap += context.count(t);
      if (overlap > best) {
        best = overlap;
        first_best = p.canonical();
      }
    }
    CHECK(first_best == "/Travel/Hotels & Accommodations");
    CHECK(out[0] == first_best);

    CHECK(categorize(stub, "zzzz qqqq", allowed, 10).empty());
    CHECK(error_of([&] { categorize(stub, "hotels", std::vector<CategoryPath>{}, 10); }) ==
          Errc::EmptyAllowedList);
  }

  TEST_CASE("wire format round trip") {
    BackendRequest req;
    req.task = BackendTask::Categorize;
    req.input_text = "温泉";
    req.allowed_categories = {CategoryPath({"Travel"})};
    req.max_items = 3;
    auto back = request_from_json(request_to_json(req));
    CHECK(back.task == req.task);
    CHECK(back.input_text == req.input_text);
    CHECK(back.allowed_categories == req.allowed_categories);
    CHECK(back.max_items == 3);

    BackendResponse res;
    res.task = BackendTask::ExtractKeywords;
    res.payload = std::vector<Keyword>{{"onsen", Sentiment::Positive, 0.5}};
    res.backend_id = "x";
    auto decoded = response_from_json(response_to_json(res), BackendTask::ExtractKeywords);
    CHECK(std::get<std::vector<Keyword>>(decoded.payload) ==
          std::get<std::vector<Keyword>>(res.payload));
    CHECK(error_of([&] { response_from_json(response_to_json(res), BackendTask::SummarizeLong); }) ==
          Errc::MalformedResponse);
  }

  TEST_CASE("remote backend over loopback") {
    FakeModelServer server([](const Json& req) {
      return Json{{"task", req.at("task")}, {"payload", "A fixed summary."}, {"backend_id", "fake"}};
    });
    RemoteBackend remote(server.url());
    BackendRequest req;
    req.task = BackendTask::SummarizeLong;
    req.input_text = "Some page text.";
    auto res = remote.invoke(req);
    CHECK(std::get<std::string>(res.payload) == "A fixed summary.");
    CHECK(res.elapsed_ms > 0);
    CHECK(res.backend_id == "fake");
  }

  TEST_CASE("remote backend rejects a mismatched payload") {
    FakeModelServer server([](const Json&) {
      return Json{{"task", "extract_keywords"},
                  {"payload", Json::array({{{"text", "x"}, {"sentiment", "neutral"}, {"score", 1.0}}})},
                  {"backend_id", "fake"}};
    });
    RemoteBackend remote(server.url());
    CHECK(error_of([&] { summarize(remote, "text", SummaryVariant::Long); }) ==
          Errc::MalformedResponse);
  }

  TEST_CASE("remote backend transport failures") {
    // Nothing listens on a port that was bound and released.
    int port = 0;
    {
      http::ServiceHost probe;
      port = probe.start("127.0.0.1", 0);
    }
    RemoteBackend refused("http://127.0.0.1:" + std::to_string(port) + "/v1",
                          std::chrono::milliseconds(2000));
    CHECK(error_of([&] { summarize(refused, "text", SummaryVariant::Long); }) ==
          Errc::TransportError);

    FakeModelServer slow(
        [](const Json& req) {
          return Json{{"task", req.at("task")}, {"payload", "late"}, {"backend_id", "slow"}};
        },
        std::chrono::milliseconds(1500));
    RemoteBackend impatient(slow.url(), std::chrono::milliseconds(300));
    CHECK(error_of([&] { summarize(impatient, "text", SummaryVariant::Long); }) == Errc::Timeout);
  }

  TEST_CASE("backend set from config") {
    CHECK(BackendSet::from_config(Json::object()).all_stub());
    auto set = BackendSet::from_config(
        Json{{"backend", {{"categorize", {{"url", "http://127.0.0.1:9/v1"}}}}}});
    CHECK_FALSE(set.all_stub());
    CHECK(set.summarize->id() == "stub");
    CHECK(set.categorize->id() == "remote:http://127.0.0.1:9/v1");
  }
}
