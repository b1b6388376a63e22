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

#include <png.h>

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "epig/image.hpp"
#include "epig/raster.hpp"

namespace epig {

using AnyImage = std::variant<GrayImage, RgbImage>;

namespace detail {

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

class PnmHeaderReader {
 public:
  explicit PnmHeaderReader(std::string_view bytes) : bytes_(bytes) {}

  int next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      throw IoError("malformed PNM header");
    }
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1'000'000) throw IoError("PNM header value out of range");
    }
    return static_cast<int>(v);
  }

  /// Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw IoError("malformed PNM header");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 2;
};

inline AnyImage decode_pnm(std::string_view bytes) {
  const bool gray = bytes.starts_with("P5");
  if (!gray && !bytes.starts_with("P6")) throw IoError("unsupported PNM variant");
  PnmHeaderReader header(bytes);
  const int w = header.next_int();
  const int h = header.next_int();
  const int maxval = header.next_int();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) throw IoError("unsupported PNM geometry");
  const std::size_t offset = header.raster_offset();
  const std::size_t channels = gray ? 1 : 3;
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * channels;
  if (bytes.size() - offset < need) throw IoError("truncated PNM raster");

  auto scale = [maxval](unsigned char v) -> std::uint8_t {
    if (maxval == 255) return v;
    return to_intensity(std::min<double>(v, maxval) * 255.0 / maxval);
  };
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  if (gray) {
    GrayImage img(w, h);
    auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = scale(raw[i]);
    return img;
  }
  RgbImage img(w, h);
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = Rgb{scale(raw[3 * i]), scale(raw[3 * i + 1]), scale(raw[3 * i + 2])};
  }
  return img;
}

inline AnyImage decode_png(std::string_view bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw IoError(std::string("PNG decode failed: ") + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&image);
    throw IoError(std::string("PNG decode failed: ") + image.message);
  }
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  if (!color) return GrayImage(w, h, std::move(buffer));
  RgbImage img(w, h);
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = Rgb{buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
  }
  return img;
}

inline std::string encode_png(int w, int h, bool color, const void* data) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, data, 0, nullptr)) {
    throw IoError(std::string("PNG encode failed: ") + image.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, data, 0, nullptr)) {
    throw IoError(std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

inline bool has_png_extension(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".png";
}

}  // namespace detail

/// Bit-exact P5 encoding: "P5\n<w> <h>\n255\n" followed by raw bytes.
inline std::string encode_pgm(const GrayImage& img) {
  std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) +
                    "\n255\n";
  out.append(reinterpret_cast<const char*>(img.pixels().data()), img.size());
  return out;
}

inline std::string encode_ppm(const RgbImage& img) {
  std::string out = "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) +
                    "\n255\n";
  out.reserve(out.size() + 3 * img.size());
  for (const auto& p : img.pixels()) {
    out.push_back(static_cast<char>(p.r));
    out.push_back(static_cast<char>(p.g));
    out.push_back(static_cast<char>(p.b));
  }
  return out;
}

/// Accepts PNG, binary PGM (P5) and binary PPM (P6), sniffed by content.
inline AnyImage decode_image(std::string_view bytes) {
  static constexpr std::string_view kPngMagic = "\x89PNG";
  if (bytes.starts_with(kPngMagic)) return detail::decode_png(bytes);
  if (bytes.starts_with("P5") || bytes.starts_with("P6")) return detail::decode_pnm(bytes);
  throw IoError("unrecognized image format");
}

inline AnyImage load_image(const std::filesystem::path& path) {
  try {
    return decode_image(detail::read_file_bytes(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

inline GrayImage load_gray(const std::filesystem::path& path) {
  auto img = load_image(path);
  if (auto* rgb = std::get_if<RgbImage>(&img)) return to_grayscale(*rgb);
  return std::get<GrayImage>(std::move(img));
}

/// Writes PNG when the extension says so, P5 otherwise.
inline void save_image(const std::filesystem::path& path, const GrayImage& img) {
  if (detail::has_png_extension(path)) {
    detail::write_file_bytes(path, detail::encode_png(img.width(), img.height(), false,
                                                      img.pixels().data()));
  } else {
    detail::write_file_bytes(path, encode_pgm(img));
  }
}

inline void save_image(const std::filesystem::path& path, const RgbImage& img) {
  if (detail::has_png_extension(path)) {
    detail::write_file_bytes(path, detail::encode_png(img.width(), img.height(), true,
                                                      img.pixels().data()));
  } else {
    detail::write_file_bytes(path, encode_ppm(img));
  }
}

inline void save_image(const std::filesystem::path& path, const BinaryImage& img) {
  save_image(path, render(img));
}

}  // namespace epig
