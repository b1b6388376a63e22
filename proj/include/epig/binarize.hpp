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
#include <string>
#include <vector>

#include "epig/detail/padded.hpp"
#include "epig/enhance.hpp"
#include "epig/image.hpp"
#include "epig/raster.hpp"

namespace epig {

struct OtsuStats {
  int threshold = 0;
  double sigma_b2 = 0.0;  // between-class variance at `threshold`
  double w0 = 0.0;        // probability of class 0 (intensities <= threshold)
  double w1 = 0.0;
  double mu0 = 0.0;       // class means; 0 for an empty class
  double mu1 = 0.0;
};

enum class AdaptiveWeighting { mean, gaussian };

struct AdaptiveParams {
  int window = 31;
  int constant_c = 10;
  AdaptiveWeighting weighting = AdaptiveWeighting::gaussian;

  void validate() const {
    if (window < 3 || window % 2 == 0) {
      throw ConfigError("adaptive_threshold: window must be odd and >= 3");
    }
  }
};

namespace detail {

struct ClassMoments {
  double w0, w1, mu0, mu1, sigma_b2;
};

/// Between-class variance for a split given exact integer class moments.
inline ClassMoments otsu_moments(std::uint64_t n0, std::uint64_t s0, std::uint64_t n_total,
                                 std::uint64_t s_total) noexcept {
  const std::uint64_t n1 = n_total - n0;
  const std::uint64_t s1 = s_total - s0;
  const double total = static_cast<double>(n_total);
  ClassMoments m{};
  m.w0 = static_cast<double>(n0) / total;
  m.w1 = static_cast<double>(n1) / total;
  m.mu0 = n0 ? static_cast<double>(s0) / static_cast<double>(n0) : 0.0;
  m.mu1 = n1 ? static_cast<double>(s1) / static_cast<double>(n1) : 0.0;
  const double diff = m.mu0 - m.mu1;
  m.sigma_b2 = (n0 && n1) ? m.w0 * m.w1 * diff * diff : 0.0;
  return m;
}

}  // namespace detail

/// Global Otsu threshold. Class 0 holds intensities <= t; the smallest t
/// maximizing the between-class variance wins.
inline OtsuStats otsu_threshold(const IntensityHistogram& hist) {
  if (hist.total == 0) throw ConfigError("otsu_threshold: empty histogram");

  std::uint64_t n_total = 0;
  std::uint64_t s_total = 0;
  int distinct = 0;
  int only = 0;
  for (int v = 0; v < 256; ++v) {
    n_total += hist.bins[v];
    s_total += hist.bins[v] * static_cast<std::uint64_t>(v);
    if (hist.bins[v]) {
      ++distinct;
      only = v;
    }
  }
  if (distinct == 1) {
    return OtsuStats{only, 0.0, 1.0, 0.0, static_cast<double>(only), 0.0};
  }

  OtsuStats best;
  best.sigma_b2 = -1.0;
  std::uint64_t n0 = 0;
  std::uint64_t s0 = 0;
  for (int t = 0; t < 256; ++t) {
    n0 += hist.bins[t];
    s0 += hist.bins[t] * static_cast<std::uint64_t>(t);
    const auto m = detail::otsu_moments(n0, s0, n_total, s_total);
    if (m.sigma_b2 > best.sigma_b2) best = OtsuStats{t, m.sigma_b2, m.w0, m.w1, m.mu0, m.mu1};
  }
  return best;
}

/// pixel <= t is ink, pixel > t is background.
inline BinaryImage apply_threshold(const GrayImage& img, int t) {
  if (t < 0 || t > 255) throw ConfigError("apply_threshold: threshold outside [0,255]");
  BinaryImage out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] <= t ? 1 : 0;
  return out;
}

/// Gaussian sigma used for a given window, matching the common
/// 0.3 * ((k - 1) / 2 - 1) + 0.8 rule.
inline double gaussian_sigma_for_window(int window) {
  return 0.3 * ((window - 1) * 0.5 - 1.0) + 0.8;
}

inline std::vector<double> gaussian_kernel(int window) {
  const double sigma = gaussian_sigma_for_window(window);
  const int r = window / 2;
  std::vector<double> k(static_cast<std::size_t>(window));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[static_cast<std::size_t>(i + r)] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[static_cast<std::size_t>(i + r)];
  }
  for (auto& v : k) v /= sum;
  return k;
}

/// Local threshold T(x) = weighted neighborhood mean - C; pixel > T(x) is
/// background, otherwise ink. Borders replicate.
inline BinaryImage adaptive_threshold(const GrayImage& img, const AdaptiveParams& p) {
  p.validate();
  const int r = p.window / 2;
  const int w = img.width();
  const int h = img.height();
  BinaryImage out(w, h);

  if (p.weighting == AdaptiveWeighting::mean) {
    const detail::Padded<std::uint8_t> src(img, r);
    const std::int64_t n = static_cast<std::int64_t>(p.window) * p.window;
    // column sums over the vertical window, slid down one row at a time
    std::vector<std::int64_t> cols(static_cast<std::size_t>(w + 2 * r), 0);
    for (int dy = -r; dy <= r; ++dy) {
      const std::uint8_t* row = src.at(-r, dy);
      for (int i = 0; i < w + 2 * r; ++i) cols[static_cast<std::size_t>(i)] += row[i];
    }
    for (int y = 0; y < h; ++y) {
      if (y > 0) {
        const std::uint8_t* leaving = src.at(-r, y - 1 - r);
        const std::uint8_t* entering = src.at(-r, y + r);
        for (int i = 0; i < w + 2 * r; ++i) {
          cols[static_cast<std::size_t>(i)] += entering[i] - leaving[i];
        }
      }
      std::int64_t sum = 0;
      for (int i = 0; i < p.window; ++i) sum += cols[static_cast<std::size_t>(i)];
      for (int x = 0; x < w; ++x) {
        if (x > 0) {
          sum += cols[static_cast<std::size_t>(x + 2 * r)] - cols[static_cast<std::size_t>(x - 1)];
        }
        // pixel > sum/n - C  <=>  (pixel + C) * n > sum
        const bool background = (img.at(x, y) + static_cast<std::int64_t>(p.constant_c)) * n > sum;
        out.set(x, y, !background);
      }
    }
    return out;
  }

  const auto kernel = gaussian_kernel(p.window);
  std::vector<double> horizontal(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += kernel[static_cast<std::size_t>(i + r)] * img.clamped(x + i, y);
      horizontal[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double mean = 0.0;
      for (int i = -r; i <= r; ++i) {
        const int yy = std::clamp(y + i, 0, h - 1);
        mean += kernel[static_cast<std::size_t>(i + r)] * horizontal[static_cast<std::size_t>(yy) * w + x];
      }
      out.set(x, y, !(img.at(x, y) > mean - p.constant_c));
    }
  }
  return out;
}

/// Erosion of the ink set by a k x k square; outside the canvas counts as
/// background, so ink within k/2 of the border never survives.
inline BinaryImage erode(const BinaryImage& img, int k) {
  detail::check_kernel(k, "erode");
  const int r = k / 2;
  const int w = img.width();
  const int h = img.height();

  // horizontal pass: run[x] = all ink in [x-r, x+r] of the row
  BinaryImage horiz(w, h);
  for (int y = 0; y < h; ++y) {
    auto row = img.row(y);
    auto dst = horiz.row(y);
    int streak = 0;  // consecutive ink pixels ending at x + r
    for (int x = -r; x < w; ++x) {
      const int lead = x + r;
      if (lead < w) streak = row[static_cast<std::size_t>(lead)] ? streak + 1 : 0;
      else streak = 0;
      if (x >= 0) dst[static_cast<std::size_t>(x)] = streak >= k ? 1 : 0;
    }
  }
  BinaryImage out(w, h);
  for (int x = 0; x < w; ++x) {
    int streak = 0;
    for (int y = -r; y < h; ++y) {
      const int lead = y + r;
      if (lead < h) streak = horiz.ink(x, lead) ? streak + 1 : 0;
      else streak = 0;
      if (y >= 0) out.set(x, y, streak >= k);
    }
  }
  return out;
}

struct ComponentLabels {
  std::vector<std::int32_t> labels;  // -1 for background, else component index
  std::vector<std::size_t> areas;    // indexed by component
};

inline void check_connectivity(int connectivity) {
  if (connectivity != 4 && connectivity != 8) throw ConfigError("connectivity must be 4 or 8");
}

/// Labels ink components in raster-scan order of their first pixel.
inline ComponentLabels label_components(const BinaryImage& img, int connectivity = 8) {
  check_connectivity(connectivity);
  const int w = img.width();
  const int h = img.height();
  ComponentLabels out;
  out.labels.assign(img.size(), -1);
  std::vector<int> stack;
  auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!img.ink(x, y) || out.labels[idx(x, y)] >= 0) continue;
      const auto label = static_cast<std::int32_t>(out.areas.size());
      std::size_t area = 0;
      out.labels[idx(x, y)] = label;
      stack.assign(1, y * w + x);
      while (!stack.empty()) {
        const int p = stack.back();
        stack.pop_back();
        ++area;
        const int px = p % w;
        const int py = p / w;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (connectivity == 4 && dx != 0 && dy != 0) continue;
            const int nx = px + dx;
            const int ny = py + dy;
            if (!img.contains(nx, ny) || !img.ink(nx, ny)) continue;
            auto& l = out.labels[idx(nx, ny)];
            if (l >= 0) continue;
            l = label;
            stack.push_back(ny * w + nx);
          }
        }
      }
      out.areas.push_back(area);
    }
  }
  return out;
}

/// Area filter: ink components smaller than `min_area` become background.
inline BinaryImage remove_small_components(const BinaryImage& img, int min_area,
                                           int connectivity = 8) {
  if (min_area < 0) throw ConfigError("remove_small_components: min_area must be >= 0");
  check_connectivity(connectivity);
  if (min_area == 0) return img;
  const auto comps = label_components(img, connectivity);
  BinaryImage out = img;
  auto px = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const auto l = comps.labels[i];
    if (l >= 0 && comps.areas[static_cast<std::size_t>(l)] < static_cast<std::size_t>(min_area)) {
      px[i] = 0;
    }
  }
  return out;
}

/// True when (x, y) lies in the outer `band` rows/columns.
inline bool in_border_band(int x, int y, int width, int height, int band) noexcept {
  return x < band || y < band || x >= width - band || y >= height - band;
}

/// Removes every ink component with at least one pixel inside the border band.
inline BinaryImage eliminate_border(const BinaryImage& img, int band, int connectivity = 8) {
  if (band < 0) throw ConfigError("eliminate_border: band must be >= 0");
  if (band == 0) return img;
  const auto comps = label_components(img, connectivity);
  std::vector<bool> touches(comps.areas.size(), false);
  const int w = img.width();
  const int h = img.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto l = comps.labels[static_cast<std::size_t>(y) * w + x];
      if (l >= 0 && in_border_band(x, y, w, h, band)) touches[static_cast<std::size_t>(l)] = true;
    }
  }
  BinaryImage out = img;
  auto px = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const auto l = comps.labels[i];
    if (l >= 0 && touches[static_cast<std::size_t>(l)]) px[i] = 0;
  }
  return out;
}

}  // namespace epig
