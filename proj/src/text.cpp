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

#include "puda/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace puda::text {

namespace {

// Decodes `input` one code point at a time; ill-formed bytes come back
// as U+FFFD.
template <typename Fn>
void for_each_codepoint(std::string_view input, Fn&& fn) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(input.data());
  int32_t length = static_cast<int32_t>(input.size());
  int32_t i = 0;
  while (i < length) {
    int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) c = 0xFFFD;
    fn(static_cast<char32_t>(c), static_cast<std::size_t>(start),
       static_cast<std::size_t>(i));
  }
}

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

}  // namespace

void append_utf8(std::string& out, char32_t cp) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t len = 0;
  UBool error = false;
  U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (error) {
    out += "\xEF\xBF\xBD";
    return;
  }
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
}

std::string nfc(std::string_view input) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC unavailable");
  icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(input.data(), static_cast<int32_t>(input.size())));
  icu::UnicodeString result = normalizer->normalize(source, status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC failed");
  std::string out;
  result.toUTF8String(out);
  return out;
}

std::string fold_case(std::string_view input) {
  std::string out;
  out.reserve(input.size());
  for_each_codepoint(input, [&](char32_t c, std::size_t, std::size_t) {
    append_utf8(out, static_cast<char32_t>(
                         u_foldCase(static_cast<UChar32>(c), U_FOLD_CASE_DEFAULT)));
  });
  return out;
}

std::string trim(std::string_view input) {
  std::size_t first = std::string_view::npos;
  std::size_t last_end = 0;
  for_each_codepoint(input, [&](char32_t c, std::size_t start, std::size_t end) {
    if (is_space(c)) return;
    if (first == std::string_view::npos) first = start;
    last_end = end;
  });
  if (first == std::string_view::npos) return {};
  return std::string(input.substr(first, last_end - first));
}

std::string normalize_key(std::string_view input) {
  return nfc(fold_case(nfc(trim(input))));
}

std::string normalize_label(std::string_view input) { return nfc(trim(input)); }

std::vector<std::string> letter_tokens(std::string_view input) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(nfc(current));
      current.clear();
    }
  };
  for_each_codepoint(input, [&](char32_t c, std::size_t, std::size_t) {
    if (u_isalpha(static_cast<UChar32>(c))) {
      append_utf8(current, static_cast<char32_t>(u_foldCase(
                               static_cast<UChar32>(c), U_FOLD_CASE_DEFAULT)));
    } else {
      flush();
    }
  });
  flush();
  return tokens;
}

std::string collapse_whitespace(std::string_view input) {
  std::string out;
  out.reserve(input.size());
  bool pending_space = false;
  for_each_codepoint(input, [&](char32_t c, std::size_t start, std::size_t end) {
    if (is_space(c)) {
      pending_space = true;
      return;
    }
    if (pending_space && !out.empty()) out += ' ';
    pending_space = false;
    if (c == 0xFFFD && input.substr(start, end - start) != "\xEF\xBF\xBD") {
      append_utf8(out, c);
    } else {
      out.append(input.substr(start, end - start));
    }
  });
  return out;
}

std::size_t codepoint_count(std::string_view input) {
  std::size_t n = 0;
  for_each_codepoint(input, [&](char32_t, std::size_t, std::size_t) { ++n; });
  return n;
}

std::size_t word_count(std::string_view input) {
  std::size_t n = 0;
  bool in_word = false;
  for_each_codepoint(input, [&](char32_t c, std::size_t, std::size_t) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  });
  return n;
}

bool is_valid_utf8(std::string_view input) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(input.data());
  int32_t length = static_cast<int32_t>(input.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

}  // namespace puda::text
