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

// Synthetic image generators and independent reference implementations
// shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "epig/image.hpp"

namespace epig::testing {

inline GrayImage random_gray(std::mt19937& rng, int w, int h) {
  std::uniform_int_distribution<int> v(0, 255);
  GrayImage img(w, h);
  for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(v(rng));
  return img;
}

inline BinaryImage random_binary(std::mt19937& rng, int w, int h, double density) {
  std::bernoulli_distribution ink(density);
  BinaryImage img(w, h);
  for (auto& p : img.pixels()) p = ink(rng) ? 1 : 0;
  return img;
}

/// Smooth low-frequency image; bilinear resampling is nearly lossless on it.
inline GrayImage smooth_gray(int w, int h, double phase = 0.0) {
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = 128.0 + 60.0 * std::sin(x * 0.09 + phase) + 50.0 * std::cos(y * 0.07 - phase);
      img.at(x, y) = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    }
  }
  return img;
}

struct TextPageOptions {
  int width = 480;
  int height = 360;
  int margin = 40;
  int line_height = 10;
  int line_pitch = 26;
  std::uint8_t paper = 235;
  std::uint8_t ink = 25;
};

/// Horizontal lines of dark word-like blocks on light paper.
inline GrayImage text_page(std::mt19937& rng, const TextPageOptions& o = {}) {
  GrayImage img(o.width, o.height, o.paper);
  std::uniform_int_distribution<int> word(12, 48);
  std::uniform_int_distribution<int> gap(6, 14);
  for (int top = o.margin; top + o.line_height <= o.height - o.margin; top += o.line_pitch) {
    int x = o.margin;
    while (true) {
      const int len = word(rng);
      if (x + len > o.width - o.margin) break;
      for (int y = top; y < top + o.line_height; ++y) {
        for (int i = x; i < x + len; ++i) img.at(i, y) = o.ink;
      }
      x += len + gap(rng);
    }
  }
  return img;
}

/// Brute-force labeling used to cross-check the library's component code:
/// repeated flood fill by label propagation until a fixed point.
inline std::vector<std::size_t> reference_component_areas(const BinaryImage& img, int connectivity) {
  const int w = img.width();
  const int h = img.height();
  std::vector<int> label(img.size(), -1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (img.ink(x, y)) label[static_cast<std::size_t>(y) * w + x] = y * w + x;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        auto& l = label[static_cast<std::size_t>(y) * w + x];
        if (l < 0) continue;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if ((dx == 0 && dy == 0) || (connectivity == 4 && dx && dy)) continue;
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const int nl = label[static_cast<std::size_t>(ny) * w + nx];
            if (nl >= 0 && nl < l) {
              l = nl;
              changed = true;
            }
          }
        }
      }
    }
  }
  std::vector<int> sorted;
  for (int l : label)
    if (l >= 0) sorted.push_back(l);
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> areas;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    areas.push_back(j - i);
    i = j;
  }
  return areas;
}

}  // namespace epig::testing
