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

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

#include "puda/pipeline.hpp"
#include "puda/text.hpp"

namespace puda {

namespace {

// Elements whose content is never rendered.
constexpr std::array<std::string_view, 7> kHiddenElements = {
    "script", "style", "head", "title", "noscript", "template", "iframe"};

// Elements that break the text flow; their tags become a space.
constexpr std::array<std::string_view, 36> kBlockElements = {
    "address", "article", "aside", "blockquote", "br", "dd", "div", "dl", "dt",
    "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4",
    "h5", "h6", "header", "hr", "li", "main", "nav", "ol", "p", "pre", "section",
    "table", "td", "th", "tr", "ul", "option", "body"};

constexpr std::array<std::pair<std::string_view, char32_t>, 22> kNamedEntities = {{
    {"amp", U'&'},        {"lt", U'<'},          {"gt", U'>'},
    {"quot", U'"'},       {"apos", U'\''},       {"nbsp", 0x00A0},
    {"copy", 0x00A9},     {"reg", 0x00AE},       {"trade", 0x2122},
    {"hellip", 0x2026},   {"mdash", 0x2014},     {"ndash", 0x2013},
    {"lsquo", 0x2018},    {"rsquo", 0x2019},     {"ldquo", 0x201C},
    {"rdquo", 0x201D},    {"yen", 0x00A5},       {"euro", 0x20AC},
    {"middot", 0x00B7},   {"times", 0x00D7},     {"deg", 0x00B0},
    {"bull", 0x2022},
}};

bool iequals_at(std::string_view text, std::size_t pos, std::string_view word) {
  if (pos + word.size() > text.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[pos + i])) != word[i]) return false;
  }
  return true;
}

// Position just past the end tag of `name`, or end of input.
std::size_t skip_element_body(std::string_view html, std::size_t from, std::string_view name) {
  std::size_t pos = from;
  while (true) {
    pos = html.find("</", pos);
    if (pos == std::string_view::npos) return html.size();
    if (iequals_at(html, pos + 2, name)) {
      std::size_t after = pos + 2 + name.size();
      if (after >= html.size() || html[after] == '>' ||
          std::isspace(static_cast<unsigned char>(html[after]))) {
        auto close = html.find('>', after);
        return close == std::string_view::npos ? html.size() : close + 1;
      }
    }
    pos += 2;
  }
}

// Position just past the '>' closing a tag opened at `from`, skipping quoted
// attribute values.
std::size_t tag_end(std::string_view html, std::size_t from) {
  char quote = 0;
  for (std::size_t i = from; i < html.size(); ++i) {
    char c = html[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      return i + 1;
    }
  }
  return html.size();
}

// Decodes the entity starting at html[pos] == '&'. Returns the code point
// and the number of bytes consumed, or {0, 0} when it is not an entity.
std::pair<char32_t, std::size_t> decode_entity(std::string_view html, std::size_t pos) {
  auto semi = html.find(';', pos + 1);
  if (semi == std::string_view::npos || semi - pos > 32) return {0, 0};
  std::string_view body = html.substr(pos + 1, semi - pos - 1);
  if (body.empty()) return {0, 0};
  if (body.front() == '#') {
    std::string_view digits = body.substr(1);
    int base = 10;
    if (!digits.empty() && (digits.front() == 'x' || digits.front() == 'X')) {
      base = 16;
      digits.remove_prefix(1);
    }
    if (digits.empty()) return {0, 0};
    std::uint32_t value = 0;
    for (char c : digits) {
      int d;
      if (std::isdigit(static_cast<unsigned char>(c))) {
        d = c - '0';
      } else if (base == 16 && std::isxdigit(static_cast<unsigned char>(c))) {
        d = std::tolower(static_cast<unsigned char>(c)) - 'a' + 10;
      } else {
        return {0, 0};
      }
      value = value * static_cast<std::uint32_t>(base) + static_cast<std::uint32_t>(d);
      if (value > 0x10FFFF) value = 0x110000;
    }
    char32_t cp = static_cast<char32_t>(value);
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    return {cp, semi - pos + 1};
  }
  for (const auto& [name, cp] : kNamedEntities) {
    if (body == name) return {cp, semi - pos + 1};
  }
  return {0, 0};
}

}  // namespace

std::string extract_text(std::string_view html) {
  std::string out;
  out.reserve(html.size());
  std::size_t i = 0;
  while (i < html.size()) {
    char c = html[i];
    if (c == '<') {
      if (html.substr(i).starts_with("<!--")) {
        auto end = html.find("-->", i + 4);
        i = end == std::string_view::npos ? html.size() : end + 3;
        continue;
      }
      if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?')) {
        i = tag_end(html, i + 1);
        continue;
      }
      std::size_t j = i + 1;
      bool closing = j < html.size() && html[j] == '/';
      if (closing) ++j;
      if (j >= html.size() || !std::isalpha(static_cast<unsigned char>(html[j]))) {
        out += c;  // a stray '<' is text
        ++i;
        continue;
      }
      std::size_t name_start = j;
      while (j < html.size() && (std::isalnum(static_cast<unsigned char>(html[j])) ||
                                 html[j] == '-')) {
        ++j;
      }
      std::string name(html.substr(name_start, j - name_start));
      for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      std::size_t after = tag_end(html, j);
      bool self_closing = after >= 2 && html[after - 1] == '>' && html[after - 2] == '/';

      if (!closing && !self_closing &&
          std::find(kHiddenElements.begin(), kHiddenElements.end(), name) !=
              kHiddenElements.end()) {
        i = skip_element_body(html, after, name);
        out += ' ';
        continue;
      }
      if (std::find(kBlockElements.begin(), kBlockElements.end(), name) !=
          kBlockElements.end()) {
        out += ' ';
      }
      i = after;
      continue;
    }
    if (c == '&') {
      auto [cp, consumed] = decode_entity(html, i);
      if (consumed > 0) {
        text::append_utf8(out, cp);
        i += consumed;
        continue;
      }
    }
    out += c;
    ++i;
  }
  return text::collapse_whitespace(out);
}

}  // namespace puda
