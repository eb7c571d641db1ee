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

#include "puda/taxonomy.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "puda/text.hpp"

namespace puda {

namespace {

constexpr std::string_view kVersionPrefix = "# version:";

std::string line_error(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

CategoryTaxonomy CategoryTaxonomy::load(std::string_view source) {
  CategoryTaxonomy taxonomy;
  std::unordered_map<std::string, std::size_t> line_of;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    auto end = source.find('\n', pos);
    if (end == std::string_view::npos) end = source.size();
    std::string_view raw = source.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

    if (raw.starts_with(kVersionPrefix)) {
      taxonomy.version_ = text::trim(raw.substr(kVersionPrefix.size()));
      continue;
    }
    std::string trimmed = text::trim(raw);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    if (!text::is_valid_utf8(raw)) {
      throw Error(Errc::MalformedLine, line_error(line_no, "invalid UTF-8"));
    }

    auto path = CategoryPath::parse(trimmed);
    if (!path) {
      throw Error(Errc::MalformedLine,
                  line_error(line_no, "not a canonical path of depth 1-3: " + trimmed));
    }
    std::string canonical = path->canonical();
    if (auto it = line_of.find(canonical); it != line_of.end()) {
      throw Error(Errc::DuplicatePath,
                  line_error(line_no, canonical + " already defined on line " +
                                          std::to_string(it->second)));
    }
    line_of.emplace(canonical, line_no);
    taxonomy.canonical_.insert(canonical);
    taxonomy.tier_counts_[static_cast<std::size_t>(path->depth() - 1)]++;
    taxonomy.paths_.push_back(std::move(*path));
  }

  if (taxonomy.paths_.empty()) {
    throw Error(Errc::EmptyTaxonomy, "taxonomy defines no categories");
  }
  // Prefix closure is checked once everything is read, so the file may
  // list children before their parents.
  for (const auto& path : taxonomy.paths_) {
    if (path.depth() == 1) continue;
    std::string parent = path.parent().canonical();
    if (!taxonomy.canonical_.contains(parent)) {
      throw Error(Errc::OrphanPath,
                  line_error(line_of.at(path.canonical()),
                             path.canonical() + " has no parent " + parent));
    }
  }
  return taxonomy;
}

CategoryTaxonomy CategoryTaxonomy::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open taxonomy file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load(buffer.str());
}

bool CategoryTaxonomy::contains(std::string_view canonical) const {
  return canonical_.contains(std::string(canonical));
}

std::vector<CategoryPath> CategoryTaxonomy::project_tier(int tier) const {
  std::vector<CategoryPath> out;
  if (tier < 1 || tier > 3) return out;
  out.reserve(tier_counts_[static_cast<std::size_t>(tier - 1)]);
  for (const auto& path : paths_) {
    if (path.depth() == tier) out.push_back(path);
  }
  return out;
}

std::vector<CategoryPath> CategoryTaxonomy::validate_subset(
    std::span<const std::string> candidates, int tier) const {
  std::vector<CategoryPath> out;
  std::unordered_set<std::string> seen;
  for (const auto& candidate : candidates) {
    auto path = CategoryPath::parse(candidate);
    if (!path || path->depth() != tier) continue;
    std::string canonical = path->canonical();
    if (!canonical_.contains(canonical)) continue;
    if (!seen.insert(canonical).second) continue;
    out.push_back(std::move(*path));
  }
  return out;
}

std::string CategoryTaxonomy::serialize() const {
  std::string out = std::string(kVersionPrefix) + " " + version_ + "\n";
  for (const auto& path : paths_) {
    out += path.canonical();
    out += '\n';
  }
  return out;
}

}  // namespace puda
