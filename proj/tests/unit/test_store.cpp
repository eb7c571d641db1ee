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
#include <sys/resource.h>

#include <csignal>
#include <fstream>
#include <thread>

#include "puda/codec.hpp"
#include "puda/store.hpp"
#include "test_support.hpp"

using namespace puda;
using namespace puda::testing;

namespace {

PageCapture capture(int i, std::string user = "hanako") {
  return PageCapture{"https://x.example/" + std::to_string(i), "T" + std::to_string(i),
                     "<p>page " + std::to_string(i) + "</p>",
                     ts("2026-03-02T08:00:00.000Z") + std::chrono::minutes(i), std::move(user)};
}

void write_raw(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::size_t complete_lines(std::string_view bytes) {
  return static_cast<std::size_t>(std::count(bytes.begin(), bytes.end(), '\n'));
}

}  // namespace

TEST_SUITE("store") {
  TEST_CASE("offsets start at zero and increase by one") {
    ScratchDir dir;
    Store store(dir.path());
    CHECK(store.append("hanako", EventKind::Capture, Json(capture(0))) == 0);
    CHECK(store.append("hanako", EventKind::Capture, Json(capture(1))) == 1);
    CHECK(store.append("hanako", EventKind::GrantCreated, Json{{"grant_id", "g"}}) == 2);
    CHECK(store.append("taro", EventKind::Capture, Json(capture(0, "taro"))) == 0);
    auto events = store.read_events("hanako");
    REQUIRE(events.size() == 3);
    for (std::size_t i = 0; i < events.size(); ++i) CHECK(events[i].offset == i);
    CHECK(events[2].kind == EventKind::GrantCreated);
  }

  TEST_CASE("capture log round trip and kind filter") {
    ScratchDir dir;
    Store store(dir.path());
    CHECK(store.load_captures("nobody").empty());
    std::vector<PageCapture> written;
    for (int i = 0; i < 5; ++i) {
      written.push_back(capture(i));
      store.append_capture(written.back());
      store.append("hanako", EventKind::TokenIssued, Json{{"jti", std::to_string(i)}});
    }
    CHECK(store.load_captures("hanako") == written);
  }

  TEST_CASE("duplicate captures are acknowledged with the first offset") {
    ScratchDir dir;
    Store store(dir.path());
    auto first = store.append_capture(capture(3));
    auto other = store.append_capture(capture(4));
    auto again = store.append_capture(capture(3));
    CHECK_FALSE(first.duplicate);
    CHECK_FALSE(other.duplicate);
    CHECK(again.duplicate);
    CHECK(again.offset == first.offset);
    CHECK(store.load_captures("hanako").size() == 2);
    // A fresh instance rebuilds the index from the log.
    Store reopened(dir.path());
    CHECK(reopened.append_capture(capture(4)).duplicate);
  }

  TEST_CASE("dataset snapshots are last writer wins") {
    ScratchDir dir;
    Store store(dir.path());
    CHECK_FALSE(store.get_dataset("hanako"));
    auto d = build_golden_dataset();
    store.put_dataset("hanako", d);
    CHECK(store.get_dataset("hanako") == d);
    auto d2 = d;
    d2.keywords.resize(3);
    store.put_dataset("hanako", d2);
    CHECK(store.get_dataset("hanako") == d2);
    auto events = store.read_events("hanako");
    REQUIRE(events.size() == 2);
    CHECK(events[1].kind == EventKind::DatasetBuilt);
    CHECK(events[1].payload.at("dataset_version") == dataset_version(d2));
  }

  TEST_CASE("profile and generic snapshots") {
    ScratchDir dir;
    Store store(dir.path());
    CHECK_FALSE(store.get_profile("hanako"));
    store.put_profile("hanako", golden_profile());
    CHECK(store.get_profile("hanako") == golden_profile());
    store.put_snapshot("hanako", "grants.json", Json{{"a", 1}});
    CHECK(store.get_snapshot("hanako", "grants.json") == Json{{"a", 1}});
    CHECK(store.users() == std::vector<std::string>{"hanako"});
  }

  TEST_CASE("unsafe user ids are refused") {
    ScratchDir dir;
    Store store(dir.path());
    CHECK_THROWS_AS(store.append("../x", EventKind::Capture, Json::object()), Error);
    CHECK_THROWS_AS(store.user_dir(""), Error);
  }

  TEST_CASE("fixture log decodes independently of the encoder") {
    auto bytes = read_text(fixtures_dir() / "events_50.jsonl");
    auto events = decode_event_log(bytes);
    REQUIRE(events.size() == 50);
    std::string reencoded;
    for (const auto& e : events) reencoded += encode_event_line(e);
    CHECK(reencoded == bytes);
    CHECK(events[49].kind == EventKind::GrantRevoked);
  }

  TEST_CASE("truncation at every byte yields a prefix or CorruptLog") {
    auto bytes = read_text(fixtures_dir() / "events_50.jsonl");
    auto full = decode_event_log(bytes);
    for (std::size_t cut = 0; cut <= bytes.size(); ++cut) {
      std::string_view prefix(bytes.data(), cut);
      std::size_t lines = complete_lines(prefix);
      bool at_boundary = cut == 0 || bytes[cut - 1] == '\n';
      try {
        auto events = decode_event_log(prefix);
        CHECK(at_boundary);
        REQUIRE(events.size() == lines);
        CHECK(std::equal(events.begin(), events.end(), full.begin()));
      } catch (const CorruptLogError& e) {
        CHECK_FALSE(at_boundary);
        CHECK(e.offset() == lines);
      }
    }
  }

  TEST_CASE("flipped bytes are caught by the checksum") {
    auto bytes = read_text(fixtures_dir() / "events_50.jsonl");
    for (std::size_t pos = 0; pos < bytes.size(); pos += 37) {
      if (bytes[pos] == '\n') continue;
      auto damaged = bytes;
      damaged[pos] = static_cast<char>(damaged[pos] ^ 0x01);
      std::size_t line = complete_lines(std::string_view(bytes.data(), pos));
      try {
        decode_event_log(damaged);
        FAIL("accepted a damaged log at byte " << pos);
      } catch (const CorruptLogError& e) {
        CHECK(e.offset() == line);
      }
    }
  }

  TEST_CASE("store refuses to read or extend a torn log") {
    ScratchDir dir;
    auto bytes = read_text(fixtures_dir() / "events_50.jsonl");
    auto cut = bytes.size() - 20;
    write_raw(dir.path() / "taro" / "events.jsonl", bytes.substr(0, cut));
    Store store(dir.path());
    try {
      store.read_events("taro");
      FAIL("read a torn log");
    } catch (const CorruptLogError& e) {
      CHECK(e.offset() == 49);
    }
    CHECK_THROWS_AS(store.append("taro", EventKind::Capture, Json(capture(1, "taro"))),
                    CorruptLogError);
    CHECK_THROWS_AS(store.load_captures("taro"), CorruptLogError);
  }

  TEST_CASE("concurrent appenders get distinct consecutive offsets") {
    ScratchDir dir;
    Store a(dir.path());
    Store b(dir.path());  // a second handle, as another process would have
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
      threads.emplace_back([&, t] {
        Store& s = t % 2 == 0 ? a : b;
        for (int i = 0; i < 25; ++i) s.append("hanako", EventKind::TokenIssued, Json{{"t", t}, {"i", i}});
      });
    }
    for (auto& th : threads) th.join();
    auto events = Store(dir.path()).read_events("hanako");
    REQUIRE(events.size() == 100);
    for (std::size_t i = 0; i < events.size(); ++i) CHECK(events[i].offset == i);
  }

  TEST_CASE("full storage is reported and leaves the log intact") {
    ScratchDir dir;
    Store store(dir.path());
    store.append("hanako", EventKind::Capture, Json(capture(0)));
    auto size_before = std::filesystem::file_size(dir.path() / "hanako" / "events.jsonl");

    rlimit old{};
    getrlimit(RLIMIT_FSIZE, &old);
    auto old_handler = std::signal(SIGXFSZ, SIG_IGN);
    rlimit tight = old;
    tight.rlim_cur = size_before + 10;
    setrlimit(RLIMIT_FSIZE, &tight);
    Errc code = Errc::InvalidArgument;
    try {
      store.append("hanako", EventKind::Capture, Json(capture(1)));
    } catch (const Error& e) {
      code = e.code();
    }
    setrlimit(RLIMIT_FSIZE, &old);
    std::signal(SIGXFSZ, old_handler);

    CHECK(code == Errc::StorageFull);
    CHECK(std::filesystem::file_size(dir.path() / "hanako" / "events.jsonl") == size_before);
    CHECK(store.append("hanako", EventKind::Capture, Json(capture(1))) == 1);
  }

  TEST_CASE("atomic file replacement") {
    ScratchDir dir;
    auto path = dir.path() / "f.json";
    write_file_atomic(path, "one");
    write_file_atomic(path, "two");
    CHECK(read_file(path) == std::optional<std::string>("two"));
    CHECK_FALSE(std::filesystem::exists(dir.path() / "f.json.tmp"));
    CHECK_FALSE(read_file(dir.path() / "missing"));
  }
}
