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

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "epig/boxes.hpp"
#include "epig/detail/process.hpp"
#include "epig/error.hpp"
#include "epig/image.hpp"
#include "epig/image_io.hpp"
#include "epig/utf8.hpp"

namespace epig {

using OcrImage = std::variant<std::filesystem::path, GrayImage, BinaryImage>;

struct OcrRequest {
  OcrImage image;
  std::string model = "atam";
  int psm = 6;            // page segmentation mode; 6 = uniform block of text
  std::string source_id;  // optional caller label, e.g. the manifest image path

  void validate() const {
    if (model.empty()) throw ConfigError("ocr: model must be non-empty");
    if (psm < 0 || psm > 13) throw ConfigError("ocr: psm must lie in [0,13]");
  }
};

struct OcrResult {
  std::string text;
  std::optional<std::vector<BoxRecord>> boxes;
  std::vector<std::string> engine_diagnostics;
};

class EngineError : public Error {
 public:
  enum class Kind { engine_not_found, model_not_found, engine_failed, timeout, no_fixture };

  EngineError(Kind kind, const std::string& what, std::vector<std::string> diagnostics = {})
      : Error(what), kind_(kind), diagnostics_(std::move(diagnostics)) {}

  Kind kind() const noexcept { return kind_; }
  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  Kind kind_;
  std::vector<std::string> diagnostics_;
};

class OcrEngine {
 public:
  virtual ~OcrEngine() = default;
  virtual OcrResult recognize(const OcrRequest& req) = 0;
};

/// Command line for one recognition call:
///   <engine-binary> <image> <out-base> -l <model> --psm <n>
inline std::vector<std::string> engine_arguments(const std::string& binary,
                                                 const std::string& image_path,
                                                 const std::string& out_base,
                                                 const OcrRequest& req) {
  return {binary, image_path, out_base, "-l", req.model, "--psm", std::to_string(req.psm)};
}

/// FNV-1a 64 over kind, dimensions and pixels, as 16 hex digits.
inline std::string fingerprint(const GrayImage& img) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  mix('G');
  for (int shift = 0; shift < 32; shift += 8) mix(static_cast<std::uint8_t>(img.width() >> shift));
  for (int shift = 0; shift < 32; shift += 8) mix(static_cast<std::uint8_t>(img.height() >> shift));
  for (auto v : img.pixels()) mix(v);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Binary images fingerprint as their rendering, so a binary image and its
/// 0/255 grayscale form share a key.
inline std::string fingerprint(const BinaryImage& img) { return fingerprint(render(img)); }

struct ExternalEngineOptions {
  std::string binary = "tesseract";
  std::optional<std::filesystem::path> model_dir;  // exported as TESSDATA_PREFIX
  std::chrono::milliseconds timeout{120'000};

  /// Reads EPIG_ENGINE_BIN and EPIG_MODEL_DIR over the defaults.
  static ExternalEngineOptions from_env() {
    ExternalEngineOptions o;
    if (const char* bin = std::getenv("EPIG_ENGINE_BIN"); bin && *bin) o.binary = bin;
    if (const char* dir = std::getenv("EPIG_MODEL_DIR"); dir && *dir) o.model_dir = dir;
    return o;
  }
};

/// Runs the engine binary as a child process. Each call owns a scratch
/// directory that is removed on every exit path.
class ExternalEngine final : public OcrEngine {
 public:
  explicit ExternalEngine(ExternalEngineOptions options = ExternalEngineOptions::from_env())
      : options_(std::move(options)) {}

  OcrResult recognize(const OcrRequest& req) override {
    req.validate();
    const auto binary = detail::find_executable(options_.binary);
    if (!binary) {
      throw EngineError(EngineError::Kind::engine_not_found,
                        "OCR engine not found: " + options_.binary);
    }

    detail::ScratchDir scratch("epig-ocr");
    std::string image_path;
    if (const auto* p = std::get_if<std::filesystem::path>(&req.image)) {
      image_path = p->string();
    } else {
      const auto staged = scratch.path() / "input.png";
      if (const auto* g = std::get_if<GrayImage>(&req.image)) save_image(staged, *g);
      else save_image(staged, std::get<BinaryImage>(req.image));
      image_path = staged.string();
    }
    const auto out_base = (scratch.path() / "out").string();

    std::map<std::string, std::string> env;
    if (options_.model_dir) env["TESSDATA_PREFIX"] = options_.model_dir->string();
    const auto run = detail::run_process(engine_arguments(binary->string(), image_path, out_base, req),
                                         scratch.path(), options_.timeout, env);
    auto diagnostics = detail::split_lines(run.err);
    if (run.timed_out) {
      throw EngineError(EngineError::Kind::timeout, "OCR engine timed out", std::move(diagnostics));
    }
    if (run.exit_code != 0) {
      const bool missing_model = run.err.find("Failed loading language") != std::string::npos ||
                                 run.err.find("Error opening data file") != std::string::npos;
      throw EngineError(
          missing_model ? EngineError::Kind::model_not_found : EngineError::Kind::engine_failed,
          (missing_model ? "model not found: " + req.model
                         : "OCR engine exited with status " + std::to_string(run.exit_code)) +
              (run.err.empty() ? "" : "\n" + run.err),
          std::move(diagnostics));
    }
    const auto text_path = std::filesystem::path(out_base + ".txt");
    if (!std::filesystem::exists(text_path)) {
      throw EngineError(EngineError::Kind::engine_failed, "OCR engine produced no text output",
                        std::move(diagnostics));
    }
    OcrResult result;
    result.text = detail::read_file_bytes(text_path);
    result.engine_diagnostics = std::move(diagnostics);
    if (!utf8::valid(result.text)) {
      throw EngineError(EngineError::Kind::engine_failed, "OCR engine returned invalid UTF-8",
                        result.engine_diagnostics);
    }
    return result;
  }

  const ExternalEngineOptions& options() const noexcept { return options_; }

 private:
  ExternalEngineOptions options_;
};

/// In-memory stand-in for the engine. Looks texts up by image fingerprint,
/// then by source id, then by path and file name. Records the argument list
/// each call would have passed to a real engine.
class MockEngine final : public OcrEngine {
 public:
  MockEngine() = default;
  MockEngine(std::map<std::string, std::string> texts, std::set<std::string> models = {})
      : texts_(std::move(texts)), models_(std::move(models)) {}
  MockEngine(MockEngine&& other) noexcept
      : texts_(std::move(other.texts_)),
        models_(std::move(other.models_)),
        calls_(std::move(other.calls_)) {}

  /// Fixture document: {"models": ["atam"], "texts": {"<key>": "<text>", ...}}.
  /// An empty or absent model list accepts any model.
  static MockEngine from_json(const nlohmann::json& j) {
    std::map<std::string, std::string> texts;
    std::set<std::string> models;
    if (j.contains("texts")) {
      for (const auto& [k, v] : j.at("texts").items()) texts[k] = v.get<std::string>();
    }
    if (j.contains("models")) {
      for (const auto& m : j.at("models")) models.insert(m.get<std::string>());
    }
    return MockEngine(std::move(texts), std::move(models));
  }

  static MockEngine from_file(const std::filesystem::path& path) {
    try {
      return from_json(nlohmann::json::parse(detail::read_file_bytes(path)));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("mock fixtures " + path.string() + ": " + e.what());
    }
  }

  void add(std::string key, std::string text) {
    std::lock_guard lock(mutex_);
    texts_[std::move(key)] = std::move(text);
  }

  OcrResult recognize(const OcrRequest& req) override {
    req.validate();
    std::vector<std::string> keys;
    std::string image_label = "<memory>";
    if (const auto* p = std::get_if<std::filesystem::path>(&req.image)) {
      image_label = p->string();
      if (std::filesystem::exists(*p)) keys.push_back(fingerprint(load_gray(*p)));
    } else if (const auto* g = std::get_if<GrayImage>(&req.image)) {
      keys.push_back(fingerprint(*g));
    } else {
      keys.push_back(fingerprint(std::get<BinaryImage>(req.image)));
    }
    if (!req.source_id.empty()) {
      keys.push_back(req.source_id);
      keys.push_back(std::filesystem::path(req.source_id).filename().string());
    }
    if (const auto* p = std::get_if<std::filesystem::path>(&req.image)) {
      keys.push_back(p->string());
      keys.push_back(p->filename().string());
    }

    std::lock_guard lock(mutex_);
    calls_.push_back(engine_arguments("mock", image_label, "<out>", req));
    if (!models_.empty() && !models_.count(req.model)) {
      const std::string err = "Failed loading language '" + req.model + "'";
      throw EngineError(EngineError::Kind::model_not_found, "model not found: " + req.model + "\n" + err,
                        {err});
    }
    for (const auto& k : keys) {
      if (auto it = texts_.find(k); it != texts_.end()) return OcrResult{it->second, std::nullopt, {}};
    }
    throw EngineError(EngineError::Kind::no_fixture,
                      "mock engine has no fixture for " +
                          (req.source_id.empty() ? image_label : req.source_id));
  }

  /// Argument lists of every call so far, in call order.
  std::vector<std::vector<std::string>> calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
  }

 private:
  std::map<std::string, std::string> texts_;
  std::set<std::string> models_;
  mutable std::mutex mutex_;
  std::vector<std::vector<std::string>> calls_;
};

}  // namespace epig
