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

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "epig/image.hpp"

namespace epig {

struct IntensityHistogram {
  std::array<std::uint64_t, 256> bins{};
  std::uint64_t total = 0;

  void add(std::uint8_t v, std::uint64_t count = 1) noexcept {
    bins[v] += count;
    total += count;
  }
};

/// BT.601 luma in exact integer arithmetic: (299 R + 587 G + 114 B) / 1000,
/// rounded half up. Gray inputs (r = g = b) map to themselves.
inline GrayImage to_grayscale(const RgbImage& img) {
  GrayImage out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto& p = src[i];
    const unsigned y = 299u * p.r + 587u * p.g + 114u * p.b;
    dst[i] = static_cast<std::uint8_t>((y + 500u) / 1000u);
  }
  return out;
}

inline RgbImage to_rgb(const GrayImage& img) {
  RgbImage out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = Rgb{src[i], src[i], src[i]};
  return out;
}

namespace detail {

/// Bilinear sample with edge replication; (x, y) in pixel-center coordinates.
inline double sample_replicate(const GrayImage& img, double x, double y) noexcept {
  x = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
  y = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
  const double bottom = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
  return top * (1.0 - fy) + bottom * fy;
}

/// Bilinear sample where taps outside the canvas read `fill`.
inline double sample_constant(const GrayImage& img, double x, double y, double fill) noexcept {
  const double xf = std::floor(x);
  const double yf = std::floor(y);
  if (xf < -1.0 || yf < -1.0 || xf > img.width() || yf > img.height()) return fill;
  const int x0 = static_cast<int>(xf);
  const int y0 = static_cast<int>(yf);
  const double fx = x - xf;
  const double fy = y - yf;
  auto tap = [&](int px, int py) -> double {
    return img.contains(px, py) ? static_cast<double>(img.at(px, py)) : fill;
  };
  const double top = tap(x0, y0) * (1.0 - fx) + tap(x0 + 1, y0) * fx;
  const double bottom = tap(x0, y0 + 1) * (1.0 - fx) + tap(x0 + 1, y0 + 1) * fx;
  return top * (1.0 - fy) + bottom * fy;
}

}  // namespace detail

/// Shrinks so the longer side equals `max_dim`; never enlarges.
inline GrayImage resize(const GrayImage& img, int max_dim) {
  if (max_dim < 1) throw ConfigError("resize: max_dim must be >= 1");
  const int longer = std::max(img.width(), img.height());
  if (longer <= max_dim) return img;

  const double scale = static_cast<double>(max_dim) / longer;
  const int out_w = img.width() >= img.height()
                        ? max_dim
                        : std::max(1, static_cast<int>(std::lround(img.width() * scale)));
  const int out_h = img.height() > img.width()
                        ? max_dim
                        : std::max(1, static_cast<int>(std::lround(img.height() * scale)));

  const double sx = static_cast<double>(img.width()) / out_w;
  const double sy = static_cast<double>(img.height()) / out_h;
  GrayImage out(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    const double src_y = (y + 0.5) * sy - 0.5;
    for (int x = 0; x < out_w; ++x) {
      const double src_x = (x + 0.5) * sx - 0.5;
      out.at(x, y) = to_intensity(detail::sample_replicate(img, src_x, src_y));
    }
  }
  return out;
}

/// Rotates about the canvas center by `angle_deg` (positive turns the
/// content counter-clockwise on screen). The canvas keeps its size; uncovered
/// pixels take `fill`.
inline GrayImage rotate(const GrayImage& img, double angle_deg, std::uint8_t fill) {
  if (!std::isfinite(angle_deg)) throw ConfigError("rotate: angle must be finite");
  if (angle_deg == 0.0) return img;

  const double rad = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  const double cx = (img.width() - 1) / 2.0;
  const double cy = (img.height() - 1) / 2.0;

  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    const double dy = y - cy;
    for (int x = 0; x < img.width(); ++x) {
      const double dx = x - cx;
      const double src_x = cx + dx * c - dy * s;
      const double src_y = cy + dx * s + dy * c;
      out.at(x, y) = to_intensity(detail::sample_constant(img, src_x, src_y, fill));
    }
  }
  return out;
}

inline IntensityHistogram intensity_histogram(const GrayImage& img) {
  IntensityHistogram hist;
  for (auto v : img.pixels()) ++hist.bins[v];
  hist.total = img.size();
  return hist;
}

/// Ink pixels per row, top to bottom.
inline std::vector<std::uint32_t> row_projection(const BinaryImage& img) {
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(img.height()), 0);
  for (int y = 0; y < img.height(); ++y) {
    std::uint32_t n = 0;
    for (auto v : img.row(y)) n += v;
    counts[static_cast<std::size_t>(y)] = n;
  }
  return counts;
}

}  // namespace epig
