// Copyright 2026 The epig Authors.
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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "epig/detail/text.hpp"
#include "epig/error.hpp"
#include "epig/image_io.hpp"

namespace epig {

struct ManifestEntry {
  std::filesystem::path image;
  std::filesystem::path ground_truth;
  std::size_t line = 0;

  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
};

/// One `<image>\t<ground-truth>` record per line; `#` comment lines and blank
/// lines are skipped. Paths are kept as written.
inline Manifest parse_manifest(std::string_view text) {
  Manifest m;
  std::vector<ParseError::Issue> issues;
  std::map<std::string, std::size_t> seen;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view raw) {
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') return;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos) {
      issues.push_back({line_no, "expected two tab-separated fields"});
      return;
    }
    const auto image = detail::trim(line.substr(0, tab));
    const auto gt = detail::trim(line.substr(tab + 1));
    if (image.empty() || gt.empty()) {
      issues.push_back({line_no, "empty path"});
      return;
    }
    auto [it, inserted] = seen.emplace(std::string(image), line_no);
    if (!inserted) {
      issues.push_back({line_no, "duplicate image path " + std::string(image) + " (first on line " +
                                     std::to_string(it->second) + ")"});
      return;
    }
    m.entries.push_back({std::filesystem::path(image), std::filesystem::path(gt), line_no});
  });
  if (!issues.empty()) throw ParseError(std::move(issues));
  return m;
}

/// Reads a manifest file; relative entries are resolved against its directory.
inline Manifest load_manifest(const std::filesystem::path& path) {
  auto m = parse_manifest(detail::read_file_bytes(path));
  const auto base = path.parent_path();
  for (auto& e : m.entries) {
    if (e.image.is_relative()) e.image = base / e.image;
    if (e.ground_truth.is_relative()) e.ground_truth = base / e.ground_truth;
  }
  return m;
}

}  // namespace epig
