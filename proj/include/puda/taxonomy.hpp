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

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "puda/model.hpp"

namespace puda {

/// The closed three-tier category list. Immutable once loaded, so a single
/// instance can be shared by any number of readers.
///
/// File format: UTF-8, one canonical path per line ("/Travel/Hotels"),
/// blank lines and lines starting with '#' ignored. A comment of the form
/// "# version: <text>" sets the version string.
class CategoryTaxonomy {
 public:
  /// Throws DuplicatePath, OrphanPath, EmptyTaxonomy, or MalformedLine; the
  /// message carries the 1-based line number.
  static CategoryTaxonomy load(std::string_view source);
  static CategoryTaxonomy load_file(const std::filesystem::path& path);

  /// Paths in file order.
  const std::vector<CategoryPath>& paths() const noexcept { return paths_; }
  /// Counts of depth-1, depth-2 and depth-3 paths.
  const std::array<std::size_t, 3>& tier_counts() const noexcept { return tier_counts_; }
  const std::string& version() const noexcept { return version_; }

  bool contains(std::string_view canonical) const;

  /// All paths of exactly the given depth, in file order.
  std::vector<CategoryPath> project_tier(int tier) const;

  /// Keeps, in order and without duplicates, exactly the candidates whose
  /// normalized form names a path of depth `tier`. Everything else is
  /// dropped; the result is always a subset of project_tier(tier).
  std::vector<CategoryPath> validate_subset(std::span<const std::string> candidates,
                                            int tier) const;

  /// Inverse of load(): the version header followed by one path per line.
  std::string serialize() const;

  friend bool operator==(const CategoryTaxonomy& a, const CategoryTaxonomy& b) {
    return a.paths_ == b.paths_ && a.version_ == b.version_;
  }

 private:
  std::vector<CategoryPath> paths_;
  std::unordered_set<std::string> canonical_;
  std::array<std::size_t, 3> tier_counts_{0, 0, 0};
  std::string version_ = "unversioned";
};

}  // namespace puda
