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
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "epig/detail/padded.hpp"
#include "epig/image.hpp"
#include "epig/raster.hpp"

namespace epig {

struct BilateralParams {
  int d = 9;
  double sigma_color = 75.0;
  double sigma_space = 75.0;

  void validate() const {
    if (d < 3 || d % 2 == 0) throw ConfigError("bilateral: d must be odd and >= 3");
    if (!(sigma_color > 0.0) || !(sigma_space > 0.0)) {
      throw ConfigError("bilateral: sigmas must be strictly positive");
    }
  }
};

namespace detail {

inline void check_kernel(int k, const char* op) {
  if (k < 3 || k % 2 == 0) {
    throw ConfigError(std::string(op) + ": kernel size must be odd and >= 3, got " +
                      std::to_string(k));
  }
}

}  // namespace detail

/// k x k median with edge replication.
inline GrayImage median_blur(const GrayImage& img, int k) {
  detail::check_kernel(k, "median_blur");
  const int r = k / 2;
  const detail::Padded<std::uint8_t> src(img, r);
  const auto mid = static_cast<std::ptrdiff_t>(k * k / 2);
  std::vector<std::uint8_t> window(static_cast<std::size_t>(k * k));
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      auto it = window.begin();
      for (int dy = -r; dy <= r; ++dy) {
        const std::uint8_t* row = src.at(x - r, y + dy);
        it = std::copy(row, row + k, it);
      }
      std::nth_element(window.begin(), window.begin() + mid, window.end());
      out.at(x, y) = window[static_cast<std::size_t>(mid)];
    }
  }
  return out;
}

/// k x k mean (rounded half up) with edge replication, via a summed-area table.
inline GrayImage box_blur(const GrayImage& img, int k) {
  detail::check_kernel(k, "box_blur");
  const int r = k / 2;
  const detail::Padded<std::uint8_t> src(img, r);
  const int pw = img.width() + 2 * r;
  const int ph = img.height() + 2 * r;

  // sat[(y+1)*(pw+1) + (x+1)] = sum of padded pixels in [0,x] x [0,y]
  std::vector<std::uint64_t> sat(static_cast<std::size_t>(pw + 1) * (ph + 1), 0);
  auto S = [&](int x, int y) -> std::uint64_t& {
    return sat[static_cast<std::size_t>(y) * (pw + 1) + x];
  };
  for (int y = 0; y < ph; ++y) {
    std::uint64_t run = 0;
    const std::uint8_t* row = src.at(-r, y - r);
    for (int x = 0; x < pw; ++x) {
      run += row[x];
      S(x + 1, y + 1) = S(x + 1, y) + run;
    }
  }

  const std::uint64_t n = static_cast<std::uint64_t>(k) * k;
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      // padded window spans [x, x+k) x [y, y+k)
      const std::uint64_t sum = S(x + k, y + k) + S(x, y) - S(x, y + k) - S(x + k, y);
      out.at(x, y) = static_cast<std::uint8_t>((sum + n / 2) / n);
    }
  }
  return out;
}

/// Global histogram equalization:
///   s(v) = round(255 * (cdf(v) - cdf_min) / (N - cdf_min)).
/// A single-intensity image is returned unchanged.
inline GrayImage equalize_histogram(const GrayImage& img) {
  const auto hist = intensity_histogram(img);
  std::array<std::uint64_t, 256> cdf{};
  std::uint64_t run = 0;
  std::uint64_t cdf_min = 0;
  for (int v = 0; v < 256; ++v) {
    run += hist.bins[v];
    cdf[v] = run;
    if (cdf_min == 0 && run > 0) cdf_min = run;
  }
  const std::uint64_t denom = hist.total - cdf_min;
  if (denom == 0) return img;

  std::array<std::uint8_t, 256> lut{};
  for (int v = 0; v < 256; ++v) {
    if (cdf[v] < cdf_min) continue;  // intensity below the darkest present value
    const std::uint64_t num = 255u * (cdf[v] - cdf_min);
    lut[v] = static_cast<std::uint8_t>((2 * num + denom) / (2 * denom));
  }
  GrayImage out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = lut[src[i]];
  return out;
}

/// Edge-preserving smoothing over a d x d window:
///   out(x) = sum_q w(x,q) I(q) / sum_q w(x,q),
///   w(x,q) = exp(-|x-q|^2 / (2 sigma_space^2)) * exp(-(I(x)-I(q))^2 / (2 sigma_color^2)).
inline GrayImage bilateral_filter(const GrayImage& img, const BilateralParams& p) {
  p.validate();
  const int r = p.d / 2;

  std::vector<double> spatial(static_cast<std::size_t>(p.d) * p.d);
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      spatial[static_cast<std::size_t>(dy + r) * p.d + (dx + r)] =
          std::exp(-(dx * dx + dy * dy) / (2.0 * p.sigma_space * p.sigma_space));
    }
  }
  std::array<double, 256> color{};
  for (int delta = 0; delta < 256; ++delta) {
    color[delta] = std::exp(-(delta * delta) / (2.0 * p.sigma_color * p.sigma_color));
  }

  const detail::Padded<std::uint8_t> src(img, r);
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const int center = *src.at(x, y);
      double num = 0.0;
      double den = 0.0;
      const double* ws = spatial.data();
      for (int dy = -r; dy <= r; ++dy) {
        const std::uint8_t* row = src.at(x - r, y + dy);
        for (int i = 0; i < p.d; ++i) {
          const int v = row[i];
          const double w = ws[i] * color[static_cast<std::size_t>(std::abs(v - center))];
          num += w * v;
          den += w;
        }
        ws += p.d;
      }
      out.at(x, y) = to_intensity(num / den);
    }
  }
  return out;
}

}  // namespace epig
