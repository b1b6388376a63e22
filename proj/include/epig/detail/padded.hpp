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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "epig/image.hpp"

namespace epig::detail {

/// Copy of a plane grown by `radius` on every side with edge replication,
/// so window filters can index without bounds checks.
template <typename Pixel>
class Padded {
 public:
  Padded(const Raster<Pixel>& src, int radius)
      : radius_(radius), stride_(src.width() + 2 * radius),
        data_(static_cast<std::size_t>(stride_) * (src.height() + 2 * radius)) {
    for (int y = -radius; y < src.height() + radius; ++y) {
      Pixel* dst = &data_[static_cast<std::size_t>(y + radius) * stride_];
      for (int x = -radius; x < src.width() + radius; ++x) dst[x + radius] = src.clamped(x, y);
    }
  }

  /// Pointer to source pixel (x, y); valid offsets reach +-radius.
  const Pixel* at(int x, int y) const noexcept {
    return &data_[static_cast<std::size_t>(y + radius_) * stride_ + (x + radius_)];
  }
  int stride() const noexcept { return stride_; }

 private:
  int radius_;
  int stride_;
  std::vector<Pixel> data_;
};

}  // namespace epig::detail
