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

#include "puda/backend.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "puda/http_util.hpp"
#include "puda/text.hpp"

#ifndef PUDA_DEFAULT_DATA_DIR
#define PUDA_DEFAULT_DATA_DIR "data"
#endif

namespace puda {

std::string_view task_name(BackendTask task) {
  switch (task) {
    case BackendTask::SummarizeLong: return "summarize_long";
    case BackendTask::SummarizeShort: return "summarize_short";
    case BackendTask::ExtractKeywords: return "extract_keywords";
    case BackendTask::Categorize: return "categorize";
  }
  return "summarize_long";
}

std::optional<BackendTask> parse_task(std::string_view name) {
  for (auto t : {BackendTask::SummarizeLong, BackendTask::SummarizeShort,
                 BackendTask::ExtractKeywords, BackendTask::Categorize}) {
    if (task_name(t) == name) return t;
  }
  return std::nullopt;
}

void validate_request(const BackendRequest& request) {
  if (request.max_items < 1) {
    throw Error(Errc::InvalidArgument, "max_items must be positive");
  }
  if (request.task == BackendTask::Categorize) {
    if (request.allowed_categories.empty()) {
      throw Error(Errc::EmptyAllowedList, "categorize requires allowed categories");
    }
    return;
  }
  if (text::trim(request.input_text).empty()) {
    throw Error(Errc::EmptyInput, std::string(task_name(request.task)) +
                                      " requires non-empty input text");
  }
}

// Wire codec ----------------------------------------------------------------

Json request_to_json(const BackendRequest& request) {
  Json j{{"task", task_name(request.task)},
         {"input_text", request.input_text},
         {"max_items", request.max_items}};
  if (request.task == BackendTask::Categorize) {
    j["allowed_categories"] = request.allowed_categories;
  }
  return j;
}

BackendRequest request_from_json(const Json& j) {
  BackendRequest request;
  try {
    auto task = parse_task(j.at("task").get<std::string>());
    if (!task) throw Error(Errc::InvalidArgument, "unknown task");
    request.task = *task;
    request.input_text = j.at("input_text").get<std::string>();
    request.max_items = j.at("max_items").get<int>();
    if (auto it = j.find("allowed_categories"); it != j.end()) {
      request.allowed_categories = it->get<std::vector<CategoryPath>>();
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("bad backend request: ") + e.what());
  }
  return request;
}

Json response_to_json(const BackendResponse& response) {
  Json payload;
  std::visit([&](const auto& value) { payload = value; }, response.payload);
  return Json{{"task", task_name(response.task)},
              {"payload", payload},
              {"backend_id", response.backend_id}};
}

BackendResponse response_from_json(const Json& j, BackendTask expected) {
  auto malformed = [](const std::string& why) {
    return Error(Errc::MalformedResponse, why);
  };
  if (!j.is_object()) throw malformed("response is not a JSON object");
  auto task_it = j.find("task");
  auto payload_it = j.find("payload");
  auto id_it = j.find("backend_id");
  if (task_it == j.end() || !task_it->is_string() || payload_it == j.end() ||
      id_it == j.end() || !id_it->is_string()) {
    throw malformed("response lacks task, payload or backend_id");
  }
  auto task = parse_task(task_it->get<std::string>());
  if (!task || *task != expected) {
    throw malformed("response answers " + task_it->get<std::string>() + ", expected " +
                    std::string(task_name(expected)));
  }

  BackendResponse response;
  response.task = expected;
  response.backend_id = id_it->get<std::string>();
  const Json& payload = *payload_it;
  switch (expected) {
    case BackendTask::SummarizeLong:
    case BackendTask::SummarizeShort:
      if (!payload.is_string()) throw malformed("summary payload must be a string");
      response.payload = payload.get<std::string>();
      break;
    case BackendTask::ExtractKeywords: {
      if (!payload.is_array()) throw malformed("keyword payload must be an array");
      std::vector<Keyword> keywords;
      for (const auto& item : payload) {
        if (!item.is_object()) throw malformed("keyword entries must be objects");
        try {
          keywords.push_back(item.get<Keyword>());
        } catch (const std::exception& e) {
          throw malformed(std::string("bad keyword entry: ") + e.what());
        }
      }
      response.payload = std::move(keywords);
      break;
    }
    case BackendTask::Categorize: {
      if (!payload.is_array()) throw malformed("category payload must be an array");
      std::vector<std::string> candidates;
      for (const auto& item : payload) {
        if (!item.is_string()) throw malformed("category entries must be strings");
        candidates.push_back(item.get<std::string>());
      }
      response.payload = std::move(candidates);
      break;
    }
  }
  return response;
}

// Typed helpers -------------------------------------------------------------

namespace {

template <typename T>
T take_payload(BackendResponse&& response) {
  if (auto* value = std::get_if<T>(&response.payload)) return std::move(*value);
  throw Error(Errc::MalformedResponse, "payload type does not match task " +
                                           std::string(task_name(response.task)));
}

// Brings remote keyword lists in line with the contract: unique normalized
// text, score-descending, at most max_items.
std::vector<Keyword> tidy_keywords(std::vector<Keyword> keywords, int max_items) {
  std::vector<Keyword> out;
  std::unordered_set<std::string> seen;
  for (auto& k : keywords) {
    if (seen.insert(k.text).second) out.push_back(std::move(k));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Keyword& a, const Keyword& b) { return a.score > b.score; });
  if (out.size() > static_cast<std::size_t>(max_items)) out.resize(max_items);
  return out;
}

}  // namespace

std::string summarize(Backend& backend, std::string_view text, SummaryVariant variant) {
  BackendRequest request;
  request.task = variant == SummaryVariant::Long ? BackendTask::SummarizeLong
                                                 : BackendTask::SummarizeShort;
  request.input_text = std::string(text);
  validate_request(request);
  return take_payload<std::string>(backend.invoke(request));
}

std::vector<Keyword> extract_keywords(Backend& backend, std::string_view text, int max_items) {
  BackendRequest request;
  request.task = BackendTask::ExtractKeywords;
  request.input_text = std::string(text);
  request.max_items = max_items;
  validate_request(request);
  return tidy_keywords(take_payload<std::vector<Keyword>>(backend.invoke(request)),
                       max_items);
}

std::vector<std::string> categorize(Backend& backend, std::string_view context,
                                    std::span<const CategoryPath> allowed, int max_items) {
  BackendRequest request;
  request.task = BackendTask::Categorize;
  request.input_text = std::string(context);
  request.allowed_categories.assign(allowed.begin(), allowed.end());
  request.max_items = max_items;
  validate_request(request);
  return take_payload<std::vector<std::string>>(backend.invoke(request));
}

// Lexicon -------------------------------------------------------------------

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open lexicon file " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    std::string trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    lines.push_back(std::move(trimmed));
  }
  return lines;
}

}  // namespace

Lexicon Lexicon::load(const std::filesystem::path& directory) {
  Lexicon lexicon;
  for (const auto& word : read_lines(directory / "stopwords.txt")) {
    lexicon.stopwords.insert(text::normalize_key(word));
  }
  for (const auto& line : read_lines(directory / "polarity.txt")) {
    auto space = line.find_last_of(" \t");
    if (space == std::string::npos) {
      throw Error(Errc::MalformedLine, "polarity entry without label: " + line);
    }
    auto sentiment = parse_sentiment(text::trim(line.substr(space + 1)));
    if (!sentiment) throw Error(Errc::MalformedLine, "bad polarity label: " + line);
    lexicon.polarity[text::normalize_key(line.substr(0, space))] = *sentiment;
  }
  return lexicon;
}

std::shared_ptr<const Lexicon> Lexicon::shared_default() {
  static std::once_flag once;
  static std::shared_ptr<const Lexicon> instance;
  std::call_once(once, [] {
    std::filesystem::path dir = std::filesystem::path(PUDA_DEFAULT_DATA_DIR) / "lexicon";
    if (const char* env = std::getenv("PUDA_LEXICON_DIR"); env && *env) dir = env;
    instance = std::make_shared<const Lexicon>(load(dir));
  });
  return instance;
}

bool Lexicon::is_content_token(const std::string& token) const {
  return text::codepoint_count(token) >= 3 && !stopwords.contains(token);
}

// Stub ----------------------------------------------------------------------

namespace {

bool ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// [begin, end) byte spans of sentences. A sentence ends at "。", or at a
// run of '.', '!' or '?' followed by white space or end of text.
std::vector<std::pair<std::size_t, std::size_t>> sentence_spans(std::string_view text) {
  constexpr std::string_view kIdeographicStop = "\xE3\x80\x82";
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t i = 0;
  auto skip_space = [&](std::size_t from) {
    while (from < text.size() && ascii_space(text[from])) ++from;
    return from;
  };
  std::size_t start = skip_space(0);
  i = start;
  while (i < text.size()) {
    if (text.substr(i).starts_with(kIdeographicStop)) {
      std::size_t end = i + kIdeographicStop.size();
      spans.emplace_back(start, end);
      start = i = skip_space(end);
      continue;
    }
    char c = text[i];
    if (c == '.' || c == '!' || c == '?') {
      std::size_t j = i + 1;
      while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
      if (j == text.size() || ascii_space(text[j])) {
        spans.emplace_back(start, j);
        start = i = skip_space(j);
        continue;
      }
      i = j;
      continue;
    }
    ++i;
  }
  if (start < text.size()) {
    std::size_t end = text.size();
    while (end > start && ascii_space(text[end - 1])) --end;
    if (end > start) spans.emplace_back(start, end);
  }
  return spans;
}

std::string first_words(std::string_view text, std::size_t budget) {
  std::string collapsed = text::collapse_whitespace(text);
  std::string out;
  std::size_t words = 0;
  std::size_t pos = 0;
  while (pos < collapsed.size() && words < budget) {
    auto end = collapsed.find(' ', pos);
    if (end == std::string::npos) end = collapsed.size();
    if (!out.empty()) out += ' ';
    out.append(collapsed, pos, end - pos);
    ++words;
    pos = end + 1;
  }
  return out;
}

}  // namespace

std::string lead_sentences(std::string_view text, std::size_t budget) {
  if (text::word_count(text) <= budget) return std::string(text);
  auto spans = sentence_spans(text);
  std::size_t total = 0;
  std::size_t end = std::string_view::npos;
  for (const auto& [b, e] : spans) {
    std::size_t words = text::word_count(text.substr(b, e - b));
    if (total + words > budget) break;
    total += words;
    end = e;
  }
  if (end == std::string_view::npos) return first_words(text, budget);
  return std::string(text.substr(spans.front().first, end - spans.front().first));
}

StubBackend::StubBackend(std::shared_ptr<const Lexicon> lexicon)
    : lexicon_(std::move(lexicon)) {}

std::string StubBackend::summary(std::string_view text, SummaryVariant variant) const {
  std::string long_form = lead_sentences(text, kLongSummaryWords);
  if (variant == SummaryVariant::Long) return long_form;
  return lead_sentences(long_form, kShortSummaryWords);
}

std::vector<Keyword> StubBackend::keywords(std::string_view text, int max_items) const {
  struct Tally {
    std::size_t count = 0;
    std::size_t first = 0;
  };
  std::map<std::string, Tally> tally;
  std::size_t position = 0;
  for (auto& token : text::letter_tokens(text)) {
    if (!lexicon_->is_content_token(token)) continue;
    auto [it, inserted] = tally.try_emplace(std::move(token));
    if (inserted) it->second.first = position;
    it->second.count++;
    ++position;
  }
  if (tally.empty()) return {};

  std::size_t max_count = 0;
  for (const auto& [_, t] : tally) max_count = std::max(max_count, t.count);

  std::vector<std::pair<const std::string*, const Tally*>> order;
  order.reserve(tally.size());
  for (const auto& [word, t] : tally) order.emplace_back(&word, &t);
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second->count != b.second->count) return a.second->count > b.second->count;
    return a.second->first < b.second->first;
  });

  std::vector<Keyword> out;
  for (const auto& [word, t] : order) {
    if (out.size() >= static_cast<std::size_t>(max_items)) break;
    auto polarity = lexicon_->polarity.find(*word);
    Sentiment sentiment =
        polarity == lexicon_->polarity.end() ? Sentiment::Neutral : polarity->second;
    out.push_back(Keyword{*word, sentiment,
                          static_cast<double>(t->count) / static_cast<double>(max_count)});
  }
  return out;
}

std::vector<std::string> StubBackend::categories(std::string_view context,
                                                 std::span<const CategoryPath> allowed,
                                                 int max_items) const {
  if (allowed.empty()) throw Error(Errc::EmptyAllowedList, "no allowed categories");
  std::unordered_set<std::string> context_tokens;
  for (auto& token : text::letter_tokens(context)) {
    if (lexicon_->is_content_token(token)) context_tokens.insert(std::move(token));
  }
  if (context_tokens.empty()) return {};

  std::vector<std::pair<std::size_t, std::size_t>> scored;  // (overlap, index)
  for (std::size_t i = 0; i < allowed.size(); ++i) {
    std::unordered_set<std::string> label_tokens;
    for (const auto& segment : allowed[i].segments()) {
      for (auto& token : text::letter_tokens(segment)) {
        if (lexicon_->is_content_token(token)) label_tokens.insert(std::move(token));
      }
    }
    std::size_t overlap = 0;
    for (const auto& token : label_tokens) overlap += context_tokens.contains(token);
    if (overlap >= 1) scored.emplace_back(overlap, i);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<std::string> out;
  for (const auto& [overlap, index] : scored) {
    if (out.size() >= static_cast<std::size_t>(max_items)) break;
    out.push_back(allowed[index].canonical());
  }
  return out;
}

BackendResponse StubBackend::invoke(const BackendRequest& request) {
  validate_request(request);
  BackendResponse response;
  response.task = request.task;
  response.backend_id = id();
  switch (request.task) {
    case BackendTask::SummarizeLong:
      response.payload = summary(request.input_text, SummaryVariant::Long);
      break;
    case BackendTask::SummarizeShort:
      response.payload = summary(request.input_text, SummaryVariant::Short);
      break;
    case BackendTask::ExtractKeywords:
      response.payload = keywords(request.input_text, request.max_items);
      break;
    case BackendTask::Categorize:
      response.payload = categories(request.input_text, request.allowed_categories,
                                    request.max_items);
      break;
  }
  return response;
}

// Remote --------------------------------------------------------------------

RemoteBackend::RemoteBackend(std::string endpoint, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {}

BackendResponse RemoteBackend::invoke(const BackendRequest& request) {
  validate_request(request);
  auto url = http::parse_url(endpoint_);
  if (!url) throw Error(Errc::TransportError, "bad backend endpoint " + endpoint_);
  auto client = http::make_client(*url, timeout_);

  auto started = std::chrono::steady_clock::now();
  auto result = client->Post(url->path, canonical_dump(request_to_json(request)),
                             "application/json; charset=utf-8");
  auto elapsed = std::chrono::steady_clock::now() - started;

  if (!result) {
    auto err = result.error();
    if (err == httplib::Error::ConnectionTimeout ||
        (err == httplib::Error::Read && elapsed >= timeout_)) {
      throw Error(Errc::Timeout, endpoint_ + " did not answer within " +
                                     std::to_string(timeout_.count()) + " ms");
    }
    throw Error(Errc::TransportError, endpoint_ + ": " + httplib::to_string(err));
  }
  if (result->status != 200) {
    throw Error(Errc::TransportError,
                endpoint_ + " answered HTTP " + std::to_string(result->status));
  }
  Json body;
  try {
    body = Json::parse(result->body);
  } catch (const std::exception& e) {
    throw Error(Errc::MalformedResponse, std::string("response is not JSON: ") + e.what());
  }
  BackendResponse response = response_from_json(body, request.task);
  auto micros = std::chrono::duration_cast<std::chrono::microseconds>(elapsed).count();
  response.elapsed_ms = std::max<std::int64_t>(1, (micros + 999) / 1000);
  return response;
}

// BackendSet ----------------------------------------------------------------

BackendSet BackendSet::stub() {
  auto stub = std::make_shared<StubBackend>();
  return BackendSet{stub, stub, stub};
}

BackendSet BackendSet::from_config(const Json& config) {
  BackendSet set = stub();
  auto pick = [&](const char* task, std::shared_ptr<Backend>& slot) {
    Json::json_pointer pointer(std::string("/backend/") + task + "/url");
    if (config.contains(pointer) && config.at(pointer).is_string()) {
      std::chrono::milliseconds timeout = std::chrono::seconds(60);
      Json::json_pointer timeout_ptr(std::string("/backend/") + task + "/timeout_ms");
      if (config.contains(timeout_ptr)) {
        timeout = std::chrono::milliseconds(config.at(timeout_ptr).get<std::int64_t>());
      }
      slot = std::make_shared<RemoteBackend>(config.at(pointer).get<std::string>(), timeout);
    }
  };
  pick("summarize", set.summarize);
  pick("keywords", set.keywords);
  pick("categorize", set.categorize);
  return set;
}

bool BackendSet::all_stub() const {
  return summarize->id() == StubBackend::kId && keywords->id() == StubBackend::kId &&
         categorize->id() == StubBackend::kId;
}

}  // namespace puda
