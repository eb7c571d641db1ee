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

#include "puda/codec.hpp"

namespace puda {

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) throw Error(Errc::InvalidArgument, "expected JSON object");
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(Errc::InvalidArgument, std::string("missing field ") + key);
  }
  return *it;
}

std::string require_string(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_string()) {
    throw Error(Errc::InvalidArgument, std::string(key) + " must be a string");
  }
  return v.get<std::string>();
}

}  // namespace

std::string canonical_dump(const Json& value) {
  // Replacement keeps the output valid UTF-8 even for hostile input.
  return value.dump(-1, ' ', false, Json::error_handler_t::replace);
}

Json timestamp_json(Timestamp ts) { return format_rfc3339(ts); }

Timestamp timestamp_from_json(const Json& j) {
  if (!j.is_string()) throw Error(Errc::InvalidArgument, "timestamp must be a string");
  auto parsed = parse_rfc3339(j.get<std::string>());
  if (!parsed) {
    throw Error(Errc::InvalidArgument,
                "not an RFC 3339 timestamp: " + j.get<std::string>());
  }
  return *parsed;
}

void to_json(Json& j, const Keyword& k) {
  j = Json{{"text", k.text},
           {"sentiment", sentiment_name(k.sentiment)},
           {"score", k.score}};
}

void from_json(const Json& j, Keyword& k) {
  auto sentiment = parse_sentiment(require_string(j, "sentiment"));
  if (!sentiment) throw Error(Errc::InvalidArgument, "unknown sentiment label");
  const Json& score = require(j, "score");
  if (!score.is_number()) throw Error(Errc::InvalidArgument, "score must be a number");
  k = make_keyword(require_string(j, "text"), *sentiment, score.get<double>());
}

void to_json(Json& j, const PageCapture& c) {
  j = Json{{"url", c.url},
           {"title", c.title},
           {"html_body", c.html_body},
           {"captured_at", timestamp_json(c.captured_at)},
           {"user_id", c.user_id}};
}

void from_json(const Json& j, PageCapture& c) {
  if (!j.is_object()) throw InvalidCaptureError("(body)", "expected a JSON object");
  auto field = [&](const char* key) -> std::string {
    auto it = j.find(key);
    if (it == j.end()) throw InvalidCaptureError(key, "missing");
    if (!it->is_string()) throw InvalidCaptureError(key, "must be a string");
    return it->get<std::string>();
  };
  c.url = field("url");
  c.title = field("title");
  c.html_body = field("html_body");
  c.user_id = field("user_id");
  std::string ts = field("captured_at");
  auto parsed = parse_rfc3339(ts);
  if (!parsed) throw InvalidCaptureError("captured_at", "not an RFC 3339 timestamp");
  c.captured_at = *parsed;
}

void to_json(Json& j, const CaptureRef& r) {
  j = Json{{"user_id", r.user_id},
           {"url", r.url},
           {"captured_at", timestamp_json(r.captured_at)}};
}

void from_json(const Json& j, CaptureRef& r) {
  r.user_id = require_string(j, "user_id");
  r.url = require_string(j, "url");
  r.captured_at = timestamp_from_json(require(j, "captured_at"));
}

void to_json(Json& j, const PageRecord& r) {
  j = Json{{"capture_ref", r.capture_ref},
           {"title", r.title},
           {"summary_long", r.summary_long},
           {"summary_short", r.summary_short},
           {"keywords", r.keywords}};
}

void from_json(const Json& j, PageRecord& r) {
  r.capture_ref = require(j, "capture_ref").get<CaptureRef>();
  r.title = require_string(j, "title");
  r.summary_long = require_string(j, "summary_long");
  r.summary_short = require_string(j, "summary_short");
  r.keywords = require(j, "keywords").get<std::vector<Keyword>>();
}

void to_json(Json& j, const Profile& p) {
  j = Json{{"age", p.age},
           {"date_of_birth", format_date(p.date_of_birth)},
           {"gender", p.gender},
           {"address", p.address},
           {"name", p.name}};
}

void from_json(const Json& j, Profile& p) {
  const Json& age = require(j, "age");
  if (!age.is_number_integer()) throw Error(Errc::InvalidArgument, "age must be an integer");
  p.age = age.get<int>();
  auto dob = parse_date(require_string(j, "date_of_birth"));
  if (!dob) throw Error(Errc::InvalidArgument, "date_of_birth must be YYYY-MM-DD");
  p.date_of_birth = *dob;
  p.gender = require_string(j, "gender");
  p.address = require_string(j, "address");
  p.name = require_string(j, "name");
  validate_profile(p);
}

void to_json(Json& j, const HistoryEntry& e) {
  j = Json{{"url", e.url},
           {"title", e.title},
           {"summary", e.summary},
           {"captured_at", timestamp_json(e.captured_at)}};
}

void from_json(const Json& j, HistoryEntry& e) {
  e.url = require_string(j, "url");
  e.title = require_string(j, "title");
  e.summary = require_string(j, "summary");
  e.captured_at = timestamp_from_json(require(j, "captured_at"));
}

void to_json(Json& j, const CategoryPath& p) { j = p.canonical(); }

void from_json(const Json& j, CategoryPath& p) {
  if (!j.is_string()) throw Error(Errc::InvalidArgument, "category path must be a string");
  auto parsed = CategoryPath::parse(j.get<std::string>());
  if (!parsed) throw Error(Errc::InvalidArgument, "malformed category path");
  p = *parsed;
}

void to_json(Json& j, const ProvenanceNote& n) {
  j = Json{{"event", n.event}, {"tier", n.tier}, {"detail", n.detail}};
}

void from_json(const Json& j, ProvenanceNote& n) {
  n.event = require_string(j, "event");
  n.tier = require(j, "tier").get<int>();
  n.detail = require_string(j, "detail");
}

void to_json(Json& j, const UserDataset& d) {
  Json categories = Json::object();
  for (const auto& [tier, paths] : d.categories) {
    categories[std::to_string(tier)] = paths;
  }
  j = Json{{"user_id", d.user_id},
           {"profile", d.profile},
           {"history_long", d.history_long},
           {"history_short", d.history_short},
           {"keywords", d.keywords},
           {"categories", categories},
           {"built_at", timestamp_json(d.built_at)},
           {"pipeline_version", d.pipeline_version},
           {"provenance", d.provenance}};
}

void from_json(const Json& j, UserDataset& d) {
  d.user_id = require_string(j, "user_id");
  d.profile = require(j, "profile").get<Profile>();
  d.history_long = require(j, "history_long").get<std::vector<HistoryEntry>>();
  d.history_short = require(j, "history_short").get<std::vector<HistoryEntry>>();
  d.keywords = require(j, "keywords").get<std::vector<Keyword>>();
  d.categories.clear();
  for (const auto& [key, paths] : require(j, "categories").items()) {
    int tier = std::stoi(key);
    if (tier < 1 || tier > 3) throw Error(Errc::InvalidArgument, "category tier out of range");
    d.categories[tier] = paths.get<std::vector<CategoryPath>>();
  }
  d.built_at = timestamp_from_json(require(j, "built_at"));
  d.pipeline_version = require_string(j, "pipeline_version");
  if (auto it = j.find("provenance"); it != j.end()) {
    d.provenance = it->get<std::vector<ProvenanceNote>>();
  } else {
    d.provenance.clear();
  }
}

}  // namespace puda
