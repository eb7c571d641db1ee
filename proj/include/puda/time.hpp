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

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace puda {

/// UTC instant with millisecond precision.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// Injectable time source; services take one so tests can move time.
using Clock = std::function<Timestamp()>;

Timestamp now_utc();
Clock system_clock();

/// "2025-05-01T09:30:00.000Z". Always UTC, always three fractional digits.
std::string format_rfc3339(Timestamp ts);

/// Accepts "Z" or a numeric offset; fractional seconds beyond
/// milliseconds are truncated. Returns nullopt for anything else.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

std::string format_date(std::chrono::year_month_day date);
std::optional<std::chrono::year_month_day> parse_date(std::string_view text);

/// Seconds since the Unix epoch, as used in token claims.
inline std::int64_t to_unix_seconds(Timestamp ts) {
  return std::chrono::duration_cast<std::chrono::seconds>(ts.time_since_epoch())
      .count();
}

inline Timestamp from_unix_seconds(std::int64_t seconds) {
  return Timestamp(std::chrono::seconds(seconds));
}

}  // namespace puda
