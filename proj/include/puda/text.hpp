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

// Locale-independent Unicode helpers. Everything here operates on UTF-8;
// malformed sequences are replaced with U+FFFD rather than rejected.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace puda::text {

std::string nfc(std::string_view input);

/// Simple (one-to-one) Unicode case folding, no locale tailoring.
std::string fold_case(std::string_view input);

/// Strips leading and trailing Unicode white space.
std::string trim(std::string_view input);

/// trim + simple case folding + NFC. The key used for keyword identity.
std::string normalize_key(std::string_view input);

/// trim + NFC without folding. Used for category labels.
std::string normalize_label(std::string_view input);

/// Maximal runs of alphabetic code points, each case-folded and NFC'd.
std::vector<std::string> letter_tokens(std::string_view input);

/// Runs of Unicode white space collapse to a single ASCII space; result is
/// trimmed.
std::string collapse_whitespace(std::string_view input);

std::size_t codepoint_count(std::string_view input);

/// Number of white-space separated tokens.
std::size_t word_count(std::string_view input);

bool is_valid_utf8(std::string_view input);

/// Appends the UTF-8 encoding of `cp` to `out`.
void append_utf8(std::string& out, char32_t cp);

}  // namespace puda::text
