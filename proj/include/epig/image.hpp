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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "epig/error.hpp"

namespace epig {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};
static_assert(sizeof(Rgb) == 3, "Rgb must be tightly packed");

/// Row-major 2-D pixel grid. Dimensions are strictly positive and the
/// buffer length always equals width*height.
template <typename Pixel>
class Raster {
 public:
  using pixel_type = Pixel;

  Raster(int width, int height, Pixel fill = Pixel{})
      : width_(checked(width, "width")), height_(checked(height, "height")),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}

  Raster(int width, int height, std::vector<Pixel> data)
      : width_(checked(width, "width")), height_(checked(height, "height")),
        data_(std::move(data)) {
    if (data_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
      throw ConfigError("raster data length " + std::to_string(data_.size()) +
                        " does not match " + std::to_string(width_) + "x" +
                        std::to_string(height_));
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  Pixel& at(int x, int y) noexcept { return data_[index(x, y)]; }
  const Pixel& at(int x, int y) const noexcept { return data_[index(x, y)]; }

  /// Edge-replicating access: coordinates are clamped into the canvas.
  const Pixel& clamped(int x, int y) const noexcept {
    return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
  }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::span<Pixel> row(int y) noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<const Pixel> row(int y) const noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }

  std::span<Pixel> pixels() noexcept { return data_; }
  std::span<const Pixel> pixels() const noexcept { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static int checked(int v, const char* what) {
    if (v <= 0) throw ConfigError(std::string("raster ") + what + " must be positive");
    return v;
  }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<Pixel> data_;
};

using GrayImage = Raster<std::uint8_t>;
using RgbImage = Raster<Rgb>;

/// Two-level image. `true` is ink (foreground), `false` is background.
/// Stored as 0/1 bytes so rows can be viewed as spans.
class BinaryImage {
 public:
  BinaryImage(int width, int height, bool fill = false)
      : plane_(width, height, static_cast<std::uint8_t>(fill ? 1 : 0)) {}

  int width() const noexcept { return plane_.width(); }
  int height() const noexcept { return plane_.height(); }
  std::size_t size() const noexcept { return plane_.size(); }

  bool ink(int x, int y) const noexcept { return plane_.at(x, y) != 0; }
  void set(int x, int y, bool ink) noexcept { plane_.at(x, y) = ink ? 1 : 0; }
  bool contains(int x, int y) const noexcept { return plane_.contains(x, y); }

  std::span<const std::uint8_t> row(int y) const noexcept { return plane_.row(y); }
  std::span<std::uint8_t> row(int y) noexcept { return plane_.row(y); }
  std::span<const std::uint8_t> pixels() const noexcept { return plane_.pixels(); }
  std::span<std::uint8_t> pixels() noexcept { return plane_.pixels(); }

  std::size_t ink_count() const noexcept {
    return static_cast<std::size_t>(std::count(plane_.pixels().begin(), plane_.pixels().end(), 1));
  }

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  Raster<std::uint8_t> plane_;
};

/// Round half away from zero, then clamp into the 8-bit range.
inline std::uint8_t to_intensity(double v) noexcept {
  const double r = std::round(v);
  if (!(r > 0.0)) return 0;
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

/// Renders ink as black (0) on white (255).
inline GrayImage render(const BinaryImage& img) {
  GrayImage out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 0 : 255;
  return out;
}

/// Inverted bit plane: 1 = background, 0 = foreground.
inline std::vector<std::uint8_t> to_background_ones(const BinaryImage& img) {
  std::vector<std::uint8_t> out(img.size());
  auto src = img.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) out[i] = src[i] ? 0 : 1;
  return out;
}

inline BinaryImage from_background_ones(int width, int height, std::span<const std::uint8_t> bits) {
  BinaryImage out(width, height);
  if (bits.size() != out.size()) throw ConfigError("bit plane length does not match dimensions");
  auto dst = out.pixels();
  for (std::size_t i = 0; i < bits.size(); ++i) dst[i] = bits[i] ? 0 : 1;
  return out;
}

}  // namespace epig
