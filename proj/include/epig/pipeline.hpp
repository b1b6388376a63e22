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

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "epig/binarize.hpp"
#include "epig/deskew.hpp"
#include "epig/detail/text.hpp"
#include "epig/enhance.hpp"
#include "epig/image.hpp"
#include "epig/image_io.hpp"
#include "epig/raster.hpp"

namespace epig {

namespace stage {

struct Grayscale {
  friend bool operator==(const Grayscale&, const Grayscale&) = default;
};
struct Resize {
  int max_dim = 1600;
  friend bool operator==(const Resize&, const Resize&) = default;
};
struct Equalize {
  friend bool operator==(const Equalize&, const Equalize&) = default;
};
struct MedianBlur {
  int k = 3;
  friend bool operator==(const MedianBlur&, const MedianBlur&) = default;
};
struct BoxBlur {
  int k = 3;
  friend bool operator==(const BoxBlur&, const BoxBlur&) = default;
};
struct Bilateral {
  BilateralParams params;
  friend bool operator==(const Bilateral& a, const Bilateral& b) {
    return a.params.d == b.params.d && a.params.sigma_color == b.params.sigma_color &&
           a.params.sigma_space == b.params.sigma_space;
  }
};
struct AdaptiveThreshold {
  AdaptiveParams params;
  friend bool operator==(const AdaptiveThreshold& a, const AdaptiveThreshold& b) {
    return a.params.window == b.params.window && a.params.constant_c == b.params.constant_c &&
           a.params.weighting == b.params.weighting;
  }
};
struct OtsuThreshold {
  friend bool operator==(const OtsuThreshold&, const OtsuThreshold&) = default;
};
struct Deskew {
  SkewSearchParams params;
  friend bool operator==(const Deskew& a, const Deskew& b) {
    return a.params.max_angle == b.params.max_angle &&
           a.params.coarse_step == b.params.coarse_step && a.params.fine_step == b.params.fine_step;
  }
};
struct Erode {
  int k = 3;
  friend bool operator==(const Erode&, const Erode&) = default;
};
struct RemoveSmall {
  int min_area = 12;
  int connectivity = 8;
  friend bool operator==(const RemoveSmall&, const RemoveSmall&) = default;
};
struct EliminateBorder {
  int band = 2;
  friend bool operator==(const EliminateBorder&, const EliminateBorder&) = default;
};

}  // namespace stage

using Stage = std::variant<stage::Grayscale, stage::Resize, stage::Equalize, stage::MedianBlur,
                           stage::BoxBlur, stage::Bilateral, stage::AdaptiveThreshold,
                           stage::OtsuThreshold, stage::Deskew, stage::Erode, stage::RemoveSmall,
                           stage::EliminateBorder>;

inline std::string_view stage_name(const Stage& s) {
  static constexpr std::string_view kNames[] = {
      "grayscale", "resize",         "equalize", "median_blur", "box_blur",     "bilateral",
      "adaptive_threshold", "otsu_threshold", "deskew", "erode", "remove_small", "eliminate_border"};
  static_assert(std::size(kNames) == std::variant_size_v<Stage>);
  return kNames[s.index()];
}

inline bool is_threshold_stage(const Stage& s) {
  return std::holds_alternative<stage::AdaptiveThreshold>(s) ||
         std::holds_alternative<stage::OtsuThreshold>(s);
}

/// Stages that only make sense on a binary image.
inline bool is_binary_stage(const Stage& s) {
  return std::holds_alternative<stage::Deskew>(s) || std::holds_alternative<stage::Erode>(s) ||
         std::holds_alternative<stage::RemoveSmall>(s) ||
         std::holds_alternative<stage::EliminateBorder>(s);
}

/// Checks parameter ranges of one stage; throws ConfigError.
inline void validate_stage(const Stage& s) {
  std::visit(
      [](const auto& st) {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, stage::Resize>) {
          if (st.max_dim < 1) throw ConfigError("resize: max_dim must be >= 1");
        } else if constexpr (std::is_same_v<T, stage::MedianBlur> ||
                             std::is_same_v<T, stage::BoxBlur> || std::is_same_v<T, stage::Erode>) {
          if (st.k < 3 || st.k % 2 == 0) throw ConfigError("k must be odd and >= 3");
        } else if constexpr (std::is_same_v<T, stage::Bilateral> ||
                             std::is_same_v<T, stage::AdaptiveThreshold> ||
                             std::is_same_v<T, stage::Deskew>) {
          st.params.validate();
        } else if constexpr (std::is_same_v<T, stage::RemoveSmall>) {
          if (st.min_area < 0) throw ConfigError("remove_small: min_area must be >= 0");
          check_connectivity(st.connectivity);
        } else if constexpr (std::is_same_v<T, stage::EliminateBorder>) {
          if (st.band < 0) throw ConfigError("eliminate_border: band must be >= 0");
        }
      },
      s);
}

/// An ordered, validated stage list. Construction enforces the ordering
/// rules, so a PipelineConfig that exists can always be run.
class PipelineConfig {
 public:
  PipelineConfig() = default;

  /// Throws ConfigError naming the offending stage position (0-based).
  static PipelineConfig from_stages(std::vector<Stage> stages) {
    if (auto problem = order_problem(stages)) throw ConfigError(problem->message);
    for (const auto& s : stages) validate_stage(s);
    PipelineConfig cfg;
    cfg.stages_ = std::move(stages);
    return cfg;
  }

  /// grayscale, resize(1600), equalize, median_blur(3), bilateral(9,75,75),
  /// adaptive_threshold(31,10,gaussian), deskew(15,1.0,0.1), erode(3),
  /// remove_small(12,8), eliminate_border(2).
  static PipelineConfig defaults() {
    return from_stages({stage::Grayscale{}, stage::Resize{}, stage::Equalize{},
                        stage::MedianBlur{}, stage::Bilateral{}, stage::AdaptiveThreshold{},
                        stage::Deskew{}, stage::Erode{}, stage::RemoveSmall{},
                        stage::EliminateBorder{}});
  }

  const std::vector<Stage>& stages() const noexcept { return stages_; }
  bool empty() const noexcept { return stages_.empty(); }

  struct OrderProblem {
    std::size_t index;  // offending stage
    std::string message;
  };

  /// First ordering violation, if any: a second threshold stage, or a
  /// binary-only stage before the threshold.
  static std::optional<OrderProblem> order_problem(const std::vector<Stage>& stages) {
    bool thresholded = false;
    for (std::size_t i = 0; i < stages.size(); ++i) {
      const auto& s = stages[i];
      if (is_threshold_stage(s)) {
        if (thresholded) {
          return OrderProblem{i, "stage " + std::to_string(i) + " (" + std::string(stage_name(s)) +
                                     "): at most one threshold stage is allowed"};
        }
        thresholded = true;
      } else if (is_binary_stage(s) && !thresholded) {
        return OrderProblem{i, "stage " + std::to_string(i) + " (" + std::string(stage_name(s)) +
                                   "): binary-only stage must follow a threshold stage"};
      }
    }
    return std::nullopt;
  }

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;

 private:
  std::vector<Stage> stages_;
};

namespace detail {

/// Parameter binding for one stage: key -> setter/getter pair.
struct ParamBinding {
  std::function<bool(Stage&, std::string_view)> set;  // false on malformed value
  std::function<std::string(const Stage&)> get;
};

template <typename S, typename Field>
ParamBinding bind(Field S::*field) {
  return {[field](Stage& s, std::string_view text) {
            auto v = parse_number<Field>(text);
            if (!v) return false;
            std::get<S>(s).*field = *v;
            return true;
          },
          [field](const Stage& s) {
            if constexpr (std::is_floating_point_v<Field>) {
              return format_double(std::get<S>(s).*field);
            } else {
              return std::to_string(std::get<S>(s).*field);
            }
          }};
}

template <typename S, typename P, typename Field>
ParamBinding bind_nested(P S::*params, Field P::*field) {
  return {[params, field](Stage& s, std::string_view text) {
            auto v = parse_number<Field>(text);
            if (!v) return false;
            (std::get<S>(s).*params).*field = *v;
            return true;
          },
          [params, field](const Stage& s) {
            const Field v = (std::get<S>(s).*params).*field;
            if constexpr (std::is_floating_point_v<Field>) {
              return format_double(v);
            } else {
              return std::to_string(v);
            }
          }};
}

struct StageSchema {
  Stage prototype;
  std::vector<std::pair<std::string, ParamBinding>> params;  // in canonical order
};

inline const std::map<std::string, StageSchema, std::less<>>& stage_schemas() {
  static const std::map<std::string, StageSchema, std::less<>> schemas = [] {
    std::map<std::string, StageSchema, std::less<>> m;
    m["grayscale"] = {stage::Grayscale{}, {}};
    m["resize"] = {stage::Resize{}, {{"max_dim", bind(&stage::Resize::max_dim)}}};
    m["equalize"] = {stage::Equalize{}, {}};
    m["median_blur"] = {stage::MedianBlur{}, {{"k", bind(&stage::MedianBlur::k)}}};
    m["box_blur"] = {stage::BoxBlur{}, {{"k", bind(&stage::BoxBlur::k)}}};
    m["bilateral"] = {
        stage::Bilateral{},
        {{"d", bind_nested(&stage::Bilateral::params, &BilateralParams::d)},
         {"sigma_color", bind_nested(&stage::Bilateral::params, &BilateralParams::sigma_color)},
         {"sigma_space", bind_nested(&stage::Bilateral::params, &BilateralParams::sigma_space)}}};
    ParamBinding weighting{
        [](Stage& s, std::string_view text) {
          auto& p = std::get<stage::AdaptiveThreshold>(s).params;
          if (text == "gaussian") p.weighting = AdaptiveWeighting::gaussian;
          else if (text == "mean") p.weighting = AdaptiveWeighting::mean;
          else return false;
          return true;
        },
        [](const Stage& s) -> std::string {
          return std::get<stage::AdaptiveThreshold>(s).params.weighting ==
                         AdaptiveWeighting::gaussian
                     ? "gaussian"
                     : "mean";
        }};
    m["adaptive_threshold"] = {
        stage::AdaptiveThreshold{},
        {{"window", bind_nested(&stage::AdaptiveThreshold::params, &AdaptiveParams::window)},
         {"constant_c",
          bind_nested(&stage::AdaptiveThreshold::params, &AdaptiveParams::constant_c)},
         {"weighting", weighting}}};
    m["otsu_threshold"] = {stage::OtsuThreshold{}, {}};
    m["deskew"] = {
        stage::Deskew{},
        {{"max_angle", bind_nested(&stage::Deskew::params, &SkewSearchParams::max_angle)},
         {"coarse_step", bind_nested(&stage::Deskew::params, &SkewSearchParams::coarse_step)},
         {"fine_step", bind_nested(&stage::Deskew::params, &SkewSearchParams::fine_step)}}};
    m["erode"] = {stage::Erode{}, {{"k", bind(&stage::Erode::k)}}};
    m["remove_small"] = {stage::RemoveSmall{},
                         {{"min_area", bind(&stage::RemoveSmall::min_area)},
                          {"connectivity", bind(&stage::RemoveSmall::connectivity)}}};
    m["eliminate_border"] = {stage::EliminateBorder{},
                             {{"band", bind(&stage::EliminateBorder::band)}}};
    return m;
  }();
  return schemas;
}

}  // namespace detail

/// Parses the line-oriented stage document:
///
///     # comment
///     [median_blur]
///     k = 3
///
/// Stages run in file order; omitted keys keep their defaults. Unknown
/// stages or keys, malformed values and ordering violations are rejected.
inline PipelineConfig parse_config(std::string_view text) {
  std::vector<ParseError::Issue> issues;
  std::vector<Stage> stages;
  std::vector<std::size_t> stage_lines;
  std::vector<std::string> seen_keys;
  const detail::StageSchema* schema = nullptr;
  bool saw_header = false;

  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) return;

    if (line.front() == '[') {
      saw_header = true;
      if (line.back() != ']') {
        issues.push_back({line_no, "malformed stage header"});
        schema = nullptr;
        return;
      }
      const auto name = detail::trim(line.substr(1, line.size() - 2));
      const auto& schemas = detail::stage_schemas();
      auto it = schemas.find(name);
      if (it == schemas.end()) {
        issues.push_back({line_no, "unknown stage \"" + std::string(name) + "\""});
        schema = nullptr;
        return;
      }
      schema = &it->second;
      stages.push_back(schema->prototype);
      stage_lines.push_back(line_no);
      seen_keys.clear();
      return;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back({line_no, "expected `key = value`"});
      return;
    }
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (!schema) {
      if (!saw_header) issues.push_back({line_no, "parameter outside of a stage section"});
      return;  // otherwise the bad header was already reported
    }
    auto param = std::find_if(schema->params.begin(), schema->params.end(),
                              [&](const auto& p) { return p.first == key; });
    if (param == schema->params.end()) {
      issues.push_back({line_no, "unknown key \"" + std::string(key) + "\" for stage " +
                                     std::string(stage_name(stages.back()))});
      return;
    }
    if (std::find(seen_keys.begin(), seen_keys.end(), key) != seen_keys.end()) {
      issues.push_back({line_no, "duplicate key \"" + std::string(key) + "\""});
      return;
    }
    seen_keys.emplace_back(key);
    if (!param->second.set(stages.back(), value)) {
      issues.push_back({line_no, "malformed value \"" + std::string(value) + "\" for " +
                                     std::string(key)});
    }
  });

  if (!issues.empty()) throw ParseError(std::move(issues));

  for (std::size_t i = 0; i < stages.size(); ++i) {
    try {
      validate_stage(stages[i]);
    } catch (const ConfigError& e) {
      issues.push_back({stage_lines[i], std::string("malformed value: ") + e.what()});
    }
  }
  if (auto problem = PipelineConfig::order_problem(stages)) {
    issues.push_back({stage_lines[problem->index], "ordering violation: " + problem->message});
  }
  if (!issues.empty()) throw ParseError(std::move(issues));
  return PipelineConfig::from_stages(std::move(stages));
}

/// Canonical document: every stage with every parameter spelled out.
inline std::string to_config_text(const PipelineConfig& cfg) {
  std::string out;
  for (const auto& s : cfg.stages()) {
    const auto& schema = detail::stage_schemas().at(std::string(stage_name(s)));
    if (!out.empty()) out += '\n';
    out += "[" + std::string(stage_name(s)) + "]\n";
    for (const auto& [key, binding] : schema.params) out += key + " = " + binding.get(s) + "\n";
  }
  return out;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  return parse_config(detail::read_file_bytes(path));
}

// ---------------------------------------------------------------------------
// Running

using StageImage = std::variant<GrayImage, RgbImage, BinaryImage>;

struct Artifact {
  std::string name;  // "<index>_<stage>", index 00 is the input
  StageImage image;
};

struct PipelineResult {
  std::vector<Artifact> artifacts;
  std::optional<BinaryImage> binary;  // set once a threshold stage ran
  std::optional<double> skew_angle;   // set by a deskew stage

  const StageImage& final_image() const { return artifacts.back().image; }

  /// What goes to the recognizer: the binary result, else the last gray.
  GrayImage recognition_input() const {
    if (binary) return render(*binary);
    return std::visit(
        [](const auto& img) -> GrayImage {
          using T = std::decay_t<decltype(img)>;
          if constexpr (std::is_same_v<T, GrayImage>) return img;
          else if constexpr (std::is_same_v<T, RgbImage>) return to_grayscale(img);
          else return render(img);
        },
        final_image());
  }
};

namespace detail {

inline std::string artifact_name(std::size_t index, std::string_view stage) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02zu_", index);
  return buf + std::string(stage);
}

inline GrayImage apply_gray_stage(const Stage& s, const GrayImage& img) {
  return std::visit(
      [&](const auto& st) -> GrayImage {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, stage::Resize>) return resize(img, st.max_dim);
        else if constexpr (std::is_same_v<T, stage::Equalize>) return equalize_histogram(img);
        else if constexpr (std::is_same_v<T, stage::MedianBlur>) return median_blur(img, st.k);
        else if constexpr (std::is_same_v<T, stage::BoxBlur>) return box_blur(img, st.k);
        else if constexpr (std::is_same_v<T, stage::Bilateral>) return bilateral_filter(img, st.params);
        else return img;  // grayscale on an already-gray image
      },
      s);
}

inline BinaryImage apply_threshold_stage(const Stage& s, const GrayImage& img) {
  if (const auto* a = std::get_if<stage::AdaptiveThreshold>(&s)) {
    return adaptive_threshold(img, a->params);
  }
  return apply_threshold(img, otsu_threshold(intensity_histogram(img)).threshold);
}

/// Grayscale-domain stage placed after thresholding: runs on the rendered
/// binary (ink 0, paper 255) and re-binarizes at the midpoint.
inline BinaryImage apply_gray_stage_to_binary(const Stage& s, const BinaryImage& bin) {
  return apply_threshold(apply_gray_stage(s, render(bin)), 127);
}

inline BinaryImage apply_binary_stage(const Stage& s, const BinaryImage& bin) {
  if (const auto* e = std::get_if<stage::Erode>(&s)) return erode(bin, e->k);
  if (const auto* r = std::get_if<stage::RemoveSmall>(&s)) {
    return remove_small_components(bin, r->min_area, r->connectivity);
  }
  if (const auto* b = std::get_if<stage::EliminateBorder>(&s)) return eliminate_border(bin, b->band);
  return apply_gray_stage_to_binary(s, bin);
}

}  // namespace detail

/// Applies the stages in order. Artifact 00 is the input; each stage adds
/// one artifact. Deskew estimates the angle on the current binary image,
/// rotates the pre-threshold grayscale image (fill 255), re-thresholds it
/// and replays the binary stages that ran since the threshold.
inline PipelineResult run_pipeline(const std::variant<GrayImage, RgbImage>& input,
                                   const PipelineConfig& cfg) {
  PipelineResult result;
  std::visit([&](const auto& img) { result.artifacts.push_back({"00_input", img}); }, input);

  std::optional<GrayImage> gray;
  if (const auto* g = std::get_if<GrayImage>(&input)) gray = *g;
  const auto ensure_gray = [&]() -> GrayImage& {
    if (!gray) gray = to_grayscale(std::get<RgbImage>(input));
    return *gray;
  };

  std::optional<Stage> threshold_stage;
  std::optional<GrayImage> pre_threshold;
  std::vector<const Stage*> since_threshold;

  for (std::size_t i = 0; i < cfg.stages().size(); ++i) {
    const Stage& s = cfg.stages()[i];
    const auto name = detail::artifact_name(i + 1, stage_name(s));

    if (is_threshold_stage(s)) {
      pre_threshold = ensure_gray();
      threshold_stage = s;
      result.binary = detail::apply_threshold_stage(s, *pre_threshold);
    } else if (const auto* d = std::get_if<stage::Deskew>(&s)) {
      const auto estimate = estimate_skew(*result.binary, d->params);
      result.skew_angle = estimate.angle;
      pre_threshold = rotate(*pre_threshold, estimate.angle, 255);
      auto rebinarized = detail::apply_threshold_stage(*threshold_stage, *pre_threshold);
      for (const Stage* replay : since_threshold) {
        rebinarized = detail::apply_binary_stage(*replay, rebinarized);
      }
      result.binary = std::move(rebinarized);
    } else if (result.binary) {
      result.binary = detail::apply_binary_stage(s, *result.binary);
    } else {
      gray = detail::apply_gray_stage(s, ensure_gray());
    }

    if (result.binary) {
      if (!is_threshold_stage(s) && !std::holds_alternative<stage::Deskew>(s)) {
        since_threshold.push_back(&s);
      }
      result.artifacts.push_back({name, *result.binary});
    } else {
      result.artifacts.push_back({name, *gray});
    }
  }
  return result;
}

/// Writes every artifact as `<name>.pgm` (`.ppm` for color input).
inline void dump_intermediates(const PipelineResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& a : result.artifacts) {
    std::visit(
        [&](const auto& img) {
          using T = std::decay_t<decltype(img)>;
          const char* ext = std::is_same_v<T, RgbImage> ? ".ppm" : ".pgm";
          save_image(dir / (a.name + ext), img);
        },
        a.image);
  }
}

}  // namespace epig
