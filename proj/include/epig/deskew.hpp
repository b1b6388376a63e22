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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "epig/image.hpp"
#include "epig/raster.hpp"

namespace epig {

struct SkewSearchParams {
  double max_angle = 15.0;
  double coarse_step = 1.0;
  double fine_step = 0.1;

  void validate() const {
    if (!(fine_step > 0.0) || !(fine_step <= coarse_step) || !(coarse_step <= max_angle)) {
      throw ConfigError("deskew: need 0 < fine_step <= coarse_step <= max_angle");
    }
  }
};

struct SkewEstimate {
  double angle = 0.0;  // corrective rotation, degrees
  double score = 0.0;
  std::vector<std::pair<double, double>> scores;  // (angle, score) in evaluation order
};

/// Sum of squared differences between adjacent row-projection values.
inline double projection_sharpness(const std::vector<std::uint32_t>& rows) {
  std::uint64_t acc = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::int64_t d = static_cast<std::int64_t>(rows[i]) - rows[i - 1];
    acc += static_cast<std::uint64_t>(d * d);
  }
  return static_cast<double>(acc);
}

inline double skew_score(const BinaryImage& img) { return projection_sharpness(row_projection(img)); }

/// Row projection of `img` rotated by `angle_deg` about its center with
/// nearest-neighbour sampling (same mapping as `rotate`), without
/// materializing the rotated image.
inline std::vector<std::uint32_t> rotated_row_projection(const BinaryImage& img, double angle_deg) {
  const int w = img.width();
  const int h = img.height();
  std::vector<std::uint32_t> rows(static_cast<std::size_t>(h), 0);
  const double rad = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  const double cx = (w - 1) / 2.0;
  const double cy = (h - 1) / 2.0;
  const auto px = img.pixels();
  // Truncation toward zero equals floor once the operand is shifted positive.
  constexpr double kShift = 1 << 20;
  for (int y = 0; y < h; ++y) {
    const double dy = y - cy;
    double sx = cx - cx * c - dy * s + 0.5 + kShift;
    double sy = cy - cx * s + dy * c + 0.5 + kShift;
    std::uint32_t n = 0;
    for (int x = 0; x < w; ++x, sx += c, sy += s) {
      const auto ix = static_cast<unsigned>(static_cast<int>(sx) - (1 << 20));
      const auto iy = static_cast<unsigned>(static_cast<int>(sy) - (1 << 20));
      if (ix >= static_cast<unsigned>(w) || iy >= static_cast<unsigned>(h)) continue;
      n += px[static_cast<std::size_t>(iy) * w + ix];
    }
    rows[static_cast<std::size_t>(y)] = n;
  }
  return rows;
}

namespace detail {

/// Higher score wins; ties go to the smaller |angle|, then to the negative one.
inline bool better_skew(double angle, double score, double best_angle, double best_score) {
  if (score != best_score) return score > best_score;
  if (std::abs(angle) != std::abs(best_angle)) return std::abs(angle) < std::abs(best_angle);
  return angle < best_angle;
}

}  // namespace detail

/// Coarse scan over [-max_angle, max_angle], then a fine scan within
/// +-coarse_step of the coarse winner.
inline SkewEstimate estimate_skew(const BinaryImage& img, const SkewSearchParams& p) {
  p.validate();
  SkewEstimate est;
  bool have = false;
  auto evaluate = [&](double angle) {
    for (const auto& [a, s] : est.scores) {
      if (a == angle) return;
    }
    const double score = projection_sharpness(rotated_row_projection(img, angle));
    est.scores.emplace_back(angle, score);
    if (!have || detail::better_skew(angle, score, est.angle, est.score)) {
      est.angle = angle;
      est.score = score;
      have = true;
    }
  };

  constexpr double kSlack = 1e-9;
  const int coarse_n = static_cast<int>(std::floor(p.max_angle / p.coarse_step + kSlack));
  for (int k = -coarse_n; k <= coarse_n; ++k) evaluate(k * p.coarse_step);

  const double coarse_winner = est.angle;
  const int fine_n = static_cast<int>(std::floor(p.coarse_step / p.fine_step + kSlack));
  for (int j = -fine_n; j <= fine_n; ++j) {
    const double angle = coarse_winner + j * p.fine_step;
    if (std::abs(angle) <= p.max_angle + kSlack) evaluate(angle);
  }
  return est;
}

/// Rotates the grayscale original by the angle that best aligns `bin`.
inline GrayImage deskew(const GrayImage& img, const BinaryImage& bin, const SkewSearchParams& p) {
  if (img.width() != bin.width() || img.height() != bin.height()) {
    throw ConfigError("deskew: grayscale and binary images differ in size");
  }
  return rotate(img, estimate_skew(bin, p).angle, 255);
}

}  // namespace epig
