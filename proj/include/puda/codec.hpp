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

// JSON encoding of the domain types. Objects use snake_case keys and
// RFC 3339 timestamps. The canonical form is minified with sorted keys,
// which is what nlohmann::json emits by default for std::map-backed
// objects.

#pragma once

#include <json.hpp>
#include <string>

#include "puda/model.hpp"

namespace puda {

using Json = nlohmann::json;

std::string canonical_dump(const Json& value);

void to_json(Json& j, const Keyword& k);
void from_json(const Json& j, Keyword& k);

void to_json(Json& j, const PageCapture& c);
/// Decoding reports the first missing or mistyped field as an
/// InvalidCaptureError. Semantic checks live in validate_capture.
void from_json(const Json& j, PageCapture& c);

void to_json(Json& j, const CaptureRef& r);
void from_json(const Json& j, CaptureRef& r);

void to_json(Json& j, const PageRecord& r);
void from_json(const Json& j, PageRecord& r);

void to_json(Json& j, const Profile& p);
void from_json(const Json& j, Profile& p);

void to_json(Json& j, const HistoryEntry& e);
void from_json(const Json& j, HistoryEntry& e);

void to_json(Json& j, const CategoryPath& p);
void from_json(const Json& j, CategoryPath& p);

void to_json(Json& j, const ProvenanceNote& n);
void from_json(const Json& j, ProvenanceNote& n);

void to_json(Json& j, const UserDataset& d);
void from_json(const Json& j, UserDataset& d);

Json timestamp_json(Timestamp ts);
Timestamp timestamp_from_json(const Json& j);

/// Parses `text` as JSON and decodes T, converting any decoding failure
/// into Error(InvalidArgument).
template <typename T>
T decode_json(const std::string& text) {
  try {
    return Json::parse(text).get<T>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::InvalidArgument, e.what());
  }
}

}  // namespace puda
