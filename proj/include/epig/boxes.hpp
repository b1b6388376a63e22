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

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epig/error.hpp"
#include "epig/detail/text.hpp"
#include "epig/utf8.hpp"

namespace epig {

/// One training box in engine coordinates (origin at the bottom-left).
struct BoxRecord {
  std::string glyph;
  int left = 0;
  int bottom = 0;
  int right = 0;
  int top = 0;
  int page = 0;

  int width() const noexcept { return right - left; }
  int height() const noexcept { return top - bottom; }

  friend bool operator==(const BoxRecord&, const BoxRecord&) = default;
};

/// Same rectangle with a top-left origin, for drawing and diagnostics.
struct TopLeftRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

inline TopLeftRect to_top_left(const BoxRecord& b, int image_height) {
  return {b.left, image_height - b.top, b.width(), b.height()};
}

/// Parses `<glyph> <left> <bottom> <right> <top> <page>` lines. Every bad
/// line is collected before throwing. When `image_height` is given, boxes
/// must also fit below it.
inline std::vector<BoxRecord> parse_box_file(std::string_view text,
                                             std::optional<int> image_height = std::nullopt) {
  std::vector<BoxRecord> boxes;
  std::vector<ParseError::Issue> issues;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (detail::trim(line).empty()) return;

    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i >= line.size()) break;
      const auto start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
      fields.push_back(line.substr(start, i - start));
    }
    if (fields.size() != 6) {
      issues.push_back({line_no, "expected 6 fields, found " + std::to_string(fields.size())});
      return;
    }
    if (!utf8::valid(fields[0])) {
      issues.push_back({line_no, "glyph is not valid UTF-8"});
      return;
    }
    BoxRecord b;
    b.glyph = std::string(fields[0]);
    int* targets[] = {&b.left, &b.bottom, &b.right, &b.top, &b.page};
    bool ok = true;
    for (std::size_t k = 0; k < 5; ++k) {
      auto v = detail::parse_number<int>(fields[k + 1]);
      if (!v || *v < 0) {
        issues.push_back({line_no, "field " + std::to_string(k + 2) +
                                       " is not a non-negative integer: " + std::string(fields[k + 1])});
        ok = false;
        break;
      }
      *targets[k] = *v;
    }
    if (!ok) return;
    if (b.left >= b.right) {
      issues.push_back({line_no, "left >= right"});
      return;
    }
    if (b.bottom >= b.top) {
      issues.push_back({line_no, "bottom >= top"});
      return;
    }
    if (image_height && b.top > *image_height) {
      issues.push_back({line_no, "top exceeds image height " + std::to_string(*image_height)});
      return;
    }
    boxes.push_back(std::move(b));
  });
  if (!issues.empty()) throw ParseError(std::move(issues));
  return boxes;
}

inline std::string write_box_file(const std::vector<BoxRecord>& boxes) {
  std::string out;
  for (const auto& b : boxes) {
    out += b.glyph + ' ' + std::to_string(b.left) + ' ' + std::to_string(b.bottom) + ' ' +
           std::to_string(b.right) + ' ' + std::to_string(b.top) + ' ' + std::to_string(b.page) + '\n';
  }
  return out;
}

namespace detail {

inline int horizontal_overlap(const BoxRecord& a, const BoxRecord& b) noexcept {
  return std::min(a.right, b.right) - std::max(a.left, b.left);
}

/// Sorted positions by (page, left), stable on input order.
inline std::vector<std::size_t> reading_order(const std::vector<BoxRecord>& boxes) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (boxes[a].page != boxes[b].page) return boxes[a].page < boxes[b].page;
    return boxes[a].left < boxes[b].left;
  });
  return order;
}

}  // namespace detail

/// Joins boxes the engine drew around the parts of one compound letter.
/// Two boxes on the same page are linked when their horizontal overlap is
/// positive and at least `overlap_ratio` times the narrower width; linked
/// groups (transitively) become one box with the union rectangle and the
/// glyphs concatenated left to right.
inline std::vector<BoxRecord> merge_compound_boxes(const std::vector<BoxRecord>& boxes,
                                                   double overlap_ratio) {
  if (!(overlap_ratio >= 0.0 && overlap_ratio <= 1.0)) {
    throw ConfigError("merge_compound_boxes: overlap_ratio must lie in [0,1]");
  }
  const auto order = detail::reading_order(boxes);
  std::vector<std::size_t> parent(boxes.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& a = boxes[order[i]];
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const auto& b = boxes[order[j]];
      if (b.page != a.page || b.left >= a.right) break;  // sorted: nothing further overlaps a
      const int overlap = detail::horizontal_overlap(a, b);
      if (overlap > 0 && overlap >= overlap_ratio * std::min(a.width(), b.width())) {
        const auto ra = find(order[i]);
        const auto rb = find(order[j]);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
    }
  }

  std::vector<BoxRecord> merged;
  std::vector<std::size_t> slot(boxes.size(), static_cast<std::size_t>(-1));
  for (auto idx : order) {  // members visited left to right
    const auto root = find(idx);
    const auto& b = boxes[idx];
    if (slot[root] == static_cast<std::size_t>(-1)) {
      slot[root] = merged.size();
      merged.push_back(b);
      continue;
    }
    auto& m = merged[slot[root]];
    m.glyph += b.glyph;
    m.left = std::min(m.left, b.left);
    m.bottom = std::min(m.bottom, b.bottom);
    m.right = std::max(m.right, b.right);
    m.top = std::max(m.top, b.top);
  }
  return merged;
}

struct BoxDiagnostic {
  std::size_t index;  // position in the input sequence
  std::string message;
};

struct OverlapResolution {
  std::vector<BoxRecord> boxes;
  std::vector<BoxDiagnostic> diagnostics;
};

/// Makes boxes on each page pairwise horizontally disjoint: an overlapping
/// neighbour pair is cut at the midline of the shared span (rounded down),
/// so the left box ends where the right one starts. A box lying entirely
/// within another's horizontal extent cannot be cut that way and is dropped
/// with a diagnostic.
inline OverlapResolution resolve_overlaps(const std::vector<BoxRecord>& boxes) {
  OverlapResolution result;
  struct Kept {
    BoxRecord box;
    std::size_t index;
  };
  std::vector<Kept> kept;
  auto drop = [&](std::size_t index, const std::string& why) {
    result.diagnostics.push_back({index, "box " + std::to_string(index) + " (" +
                                             boxes[index].glyph + ") dropped: " + why});
  };

  for (auto idx : detail::reading_order(boxes)) {
    BoxRecord b = boxes[idx];
    bool keep_b = true;
    while (!kept.empty() && kept.back().box.page == b.page && b.left < kept.back().box.right) {
      auto& a = kept.back();
      if (b.right <= a.box.right) {  // b nested inside a
        drop(idx, "nested inside box " + std::to_string(a.index));
        keep_b = false;
        break;
      }
      if (a.box.left == b.left) {  // a nested inside b
        drop(a.index, "nested inside box " + std::to_string(idx));
        kept.pop_back();
        continue;
      }
      const int mid = (b.left + a.box.right) / 2;  // both non-negative: floor
      a.box.right = mid;
      b.left = mid;
      if (a.box.width() <= 0) {
        drop(a.index, "collapsed to zero width");
        kept.pop_back();
        continue;
      }
      if (b.width() <= 0) {
        drop(idx, "collapsed to zero width");
        keep_b = false;
      }
      break;
    }
    if (keep_b) kept.push_back({std::move(b), idx});
  }
  for (auto& k : kept) result.boxes.push_back(std::move(k.box));
  return result;
}

}  // namespace epig
