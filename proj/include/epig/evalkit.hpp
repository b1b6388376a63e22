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
#include <cstdio>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "epig/segment.hpp"
#include "epig/utf8.hpp"

namespace epig {

/// Unit-cost Levenshtein distance over grapheme clusters.
inline std::size_t edit_distance(const GraphemeSeq& a, const GraphemeSeq& b) {
  const auto& s = a.clusters;
  const auto& t = b.clusters;
  std::vector<std::size_t> prev(t.size() + 1);
  std::vector<std::size_t> cur(t.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= s.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= t.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (s[i - 1] == t[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[t.size()];
}

struct ScoreOptions {
  bool normalize = true;     // compare base characters only
  bool keep_spaces = false;  // otherwise all whitespace is dropped first
};

struct ImageScore {
  std::string image_id;
  std::size_t gt_len = 0;
  std::size_t distance = 0;
  double accuracy = 0.0;  // max(0, 1 - distance / gt_len)
};

struct EvalReport {
  std::vector<ImageScore> scores;
  double weighted_accuracy = 0.0;
  std::size_t total_graphemes = 0;
};

namespace detail {

inline bool is_space(char32_t cp) {
  return cp == ' ' || (cp >= '\t' && cp <= '\r') || cp == 0x00A0 || cp == 0x200B || cp == 0x3000;
}

inline std::string strip_whitespace(std::string_view text, bool keep_inner) {
  const auto cps = utf8::decode(text);
  std::size_t first = 0;
  std::size_t last = cps.size();
  while (first < last && is_space(cps[first].value)) ++first;
  while (last > first && is_space(cps[last - 1].value)) --last;
  std::string out;
  for (std::size_t i = first; i < last; ++i) {
    if (!keep_inner && is_space(cps[i].value)) continue;
    out += text.substr(cps[i].offset, cps[i].length);
  }
  return out;
}

}  // namespace detail

/// Clusters both texts (optionally dropping whitespace and normalizing to
/// base characters) and scores the prediction against the ground truth.
inline ImageScore score_image(std::string_view pred, std::string_view gt,
                              const ScoreOptions& opts = {}, std::string image_id = {}) {
  auto p = split_graphemes(detail::strip_whitespace(pred, opts.keep_spaces));
  auto g = split_graphemes(detail::strip_whitespace(gt, opts.keep_spaces));
  if (g.empty()) throw ConfigError("score_image: empty ground truth");
  if (opts.normalize) {
    p = normalize_base(p);
    g = normalize_base(g);
  }
  ImageScore s;
  s.image_id = std::move(image_id);
  s.gt_len = g.size();
  s.distance = edit_distance(p, g);
  s.accuracy = std::max(0.0, 1.0 - static_cast<double>(s.distance) / static_cast<double>(s.gt_len));
  return s;
}

/// Ground-truth-length weighted mean of per-image accuracies.
inline EvalReport aggregate(std::vector<ImageScore> scores) {
  if (scores.empty()) throw ConfigError("aggregate: no scores");
  EvalReport r;
  double weighted = 0.0;
  for (const auto& s : scores) {
    if (s.gt_len == 0) throw ConfigError("aggregate: score with empty ground truth");
    weighted += static_cast<double>(s.gt_len) * s.accuracy;
    r.total_graphemes += s.gt_len;
  }
  r.weighted_accuracy = weighted / static_cast<double>(r.total_graphemes);
  r.scores = std::move(scores);
  return r;
}

inline std::string metric_description(const ScoreOptions& opts) {
  std::string d = "accuracy = max(0, 1 - edit_distance / gt_len) over grapheme clusters";
  d += opts.keep_spaces ? "; spaces kept" : "; whitespace stripped";
  d += opts.normalize ? "; base-character normalization on" : "; no normalization";
  return d;
}

inline std::string format_fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

/// Tab-separated table: header, one row per image, then the weighted summary.
inline std::string format_report_table(const EvalReport& r, const ScoreOptions& opts) {
  std::string out = "# " + metric_description(opts) + "\n";
  out += "image_id\tgt_len\tdistance\taccuracy\n";
  for (const auto& s : r.scores) {
    out += s.image_id + "\t" + std::to_string(s.gt_len) + "\t" + std::to_string(s.distance) + "\t" +
           format_fixed(s.accuracy) + "\n";
  }
  out += "weighted_accuracy\t" + format_fixed(r.weighted_accuracy) + "\ttotal_graphemes\t" +
         std::to_string(r.total_graphemes) + "\n";
  return out;
}

inline nlohmann::ordered_json report_to_json(const EvalReport& r, const ScoreOptions& opts) {
  nlohmann::ordered_json j;
  j["metric"] = {{"definition", metric_description(opts)},
                 {"clamped_at_zero", true},
                 {"normalize", opts.normalize},
                 {"keep_spaces", opts.keep_spaces}};
  auto images = nlohmann::ordered_json::array();
  for (const auto& s : r.scores) {
    images.push_back({{"image_id", s.image_id},
                      {"gt_len", s.gt_len},
                      {"distance", s.distance},
                      {"accuracy", s.accuracy}});
  }
  j["images"] = std::move(images);
  j["weighted_accuracy"] = r.weighted_accuracy;
  j["total_graphemes"] = r.total_graphemes;
  return j;
}

}  // namespace epig
