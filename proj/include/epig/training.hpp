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
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "epig/detail/process.hpp"
#include "epig/error.hpp"

namespace epig {

struct TrainingStep {
  std::string program;
  std::vector<std::string> args;
  std::vector<std::string> outputs;  // file names created in the work directory

  bool operator==(const TrainingStep&) const = default;
};

struct FileRename {
  std::string from;
  std::string to;

  bool operator==(const FileRename&) const = default;
};

/// Legacy-engine training sequence. Every command runs inside `work_dir`
/// (the box directory); file arguments are names relative to it, except the
/// font properties file which is passed as given.
///
/// `prerequisites` produce the per-sample .tr feature files, `steps` are the
/// four training tools in order, and `renames` prefix the clustered outputs
/// with the language code before the combine step reads them.
struct TrainingPlan {
  std::filesystem::path work_dir;
  std::string lang;
  std::vector<TrainingStep> prerequisites;
  std::vector<TrainingStep> steps;
  std::vector<FileRename> renames;
  std::vector<std::string> produced_artifacts;

  bool operator==(const TrainingPlan&) const = default;
};

inline const std::vector<std::string>& training_image_extensions() {
  static const std::vector<std::string> exts{".tif", ".tiff", ".png", ".jpg", ".jpeg",
                                             ".pgm", ".ppm", ".bmp"};
  return exts;
}

namespace detail {

inline std::string lower_ascii(std::string s) {
  for (auto& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

}  // namespace detail

/// Lists `box_dir` and pairs every `<stem>.box` with exactly one image of the
/// same stem. Samples are ordered by stem so the plan is reproducible.
inline TrainingPlan plan_training(const std::filesystem::path& box_dir, const std::string& lang,
                                  const std::filesystem::path& font_props) {
  namespace fs = std::filesystem;
  if (lang.empty()) throw ConfigError("train-plan: language code must be non-empty");
  if (!fs::is_directory(box_dir)) throw IoError("train-plan: not a directory: " + box_dir.string());
  if (!fs::is_regular_file(font_props)) {
    throw IoError("train-plan: font properties file not found: " + font_props.string());
  }

  std::map<std::string, std::string> boxes;
  std::map<std::string, std::vector<std::string>> images;
  const auto& exts = training_image_extensions();
  for (const auto& entry : fs::directory_iterator(box_dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    const auto stem = entry.path().stem().string();
    const auto ext = detail::lower_ascii(entry.path().extension().string());
    if (ext == ".box") boxes[stem] = name;
    else if (std::find(exts.begin(), exts.end(), ext) != exts.end()) images[stem].push_back(name);
  }
  if (boxes.empty() && images.empty()) {
    throw ConfigError("train-plan: no box/image pairs in " + box_dir.string());
  }

  std::vector<std::string> problems;
  for (const auto& [stem, name] : boxes) {
    auto it = images.find(stem);
    if (it == images.end()) problems.push_back(name + " has no matching image");
    else if (it->second.size() > 1) problems.push_back(name + " matches several images");
  }
  for (const auto& [stem, names] : images) {
    if (!boxes.count(stem)) {
      for (const auto& n : names) problems.push_back(n + " has no matching box file");
    }
  }
  if (!problems.empty()) {
    std::string msg = "train-plan: unpaired inputs in " + box_dir.string();
    std::sort(problems.begin(), problems.end());
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }

  TrainingPlan plan;
  plan.work_dir = box_dir;
  plan.lang = lang;

  std::vector<std::string> box_files;
  std::vector<std::string> tr_files;
  for (const auto& [stem, box] : boxes) {
    const auto& image = images.at(stem).front();
    plan.prerequisites.push_back({"tesseract", {image, stem, "box.train"}, {stem + ".tr"}});
    box_files.push_back(box);
    tr_files.push_back(stem + ".tr");
  }

  TrainingStep unicharset{"unicharset_extractor", box_files, {"unicharset"}};

  TrainingStep mf{"mftraining",
                  {"-F", font_props.string(), "-U", "unicharset", "-O", lang + ".unicharset"},
                  {"inttemp", "pffmtable", "shapetable", lang + ".unicharset"}};
  mf.args.insert(mf.args.end(), tr_files.begin(), tr_files.end());

  TrainingStep cn{"cntraining", tr_files, {"normproto"}};

  for (const char* base : {"inttemp", "normproto", "pffmtable", "shapetable"}) {
    plan.renames.push_back({base, lang + "." + base});
  }

  TrainingStep combine{"combine_tessdata", {lang + "."}, {lang + ".traineddata"}};

  plan.steps = {std::move(unicharset), std::move(mf), std::move(cn), std::move(combine)};
  for (const auto& s : plan.prerequisites) {
    plan.produced_artifacts.insert(plan.produced_artifacts.end(), s.outputs.begin(), s.outputs.end());
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& out = plan.steps[i].outputs;
    plan.produced_artifacts.insert(plan.produced_artifacts.end(), out.begin(), out.end());
  }
  for (const auto& r : plan.renames) plan.produced_artifacts.push_back(r.to);
  plan.produced_artifacts.push_back(lang + ".traineddata");
  return plan;
}

/// Shell-style rendering of the plan, one command per line.
inline std::string format_plan(const TrainingPlan& plan) {
  auto quote = [](const std::string& s) {
    if (!s.empty() && s.find_first_of(" \t'\"\\$`") == std::string::npos) return s;
    std::string q = "'";
    for (char c : s) q += (c == '\'') ? std::string("'\\''") : std::string(1, c);
    return q + "'";
  };
  auto line = [&](const std::string& program, const std::vector<std::string>& args) {
    std::string out = program;
    for (const auto& a : args) out += " " + quote(a);
    return out + "\n";
  };
  std::string text = "cd " + quote(plan.work_dir.string()) + "\n";
  for (const auto& s : plan.prerequisites) text += line(s.program, s.args);
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    if (i + 1 == plan.steps.size()) {
      for (const auto& r : plan.renames) text += line("mv", {r.from, r.to});
    }
    text += line(plan.steps[i].program, plan.steps[i].args);
  }
  return text;
}

inline nlohmann::ordered_json plan_to_json(const TrainingPlan& plan) {
  auto step_json = [](const TrainingStep& s) {
    return nlohmann::ordered_json{{"program", s.program}, {"args", s.args}, {"outputs", s.outputs}};
  };
  nlohmann::ordered_json j;
  j["work_dir"] = plan.work_dir.string();
  j["lang"] = plan.lang;
  j["prerequisites"] = nlohmann::ordered_json::array();
  for (const auto& s : plan.prerequisites) j["prerequisites"].push_back(step_json(s));
  j["steps"] = nlohmann::ordered_json::array();
  for (const auto& s : plan.steps) j["steps"].push_back(step_json(s));
  j["renames"] = nlohmann::ordered_json::array();
  for (const auto& r : plan.renames) j["renames"].push_back({{"from", r.from}, {"to", r.to}});
  j["produced_artifacts"] = plan.produced_artifacts;
  return j;
}

/// Runs the plan. Tool names are resolved on PATH; the first failing command
/// aborts with its stderr attached.
inline void execute_plan(const TrainingPlan& plan) {
  namespace fs = std::filesystem;
  detail::ScratchDir scratch("epig-train");
  const auto work_dir = fs::absolute(plan.work_dir);
  auto run = [&](const TrainingStep& s) {
    const auto bin = detail::find_executable(s.program);
    if (!bin) throw IoError("training tool not found: " + s.program);
    std::vector<std::string> argv{fs::absolute(*bin).string()};
    argv.insert(argv.end(), s.args.begin(), s.args.end());
    const auto r = detail::run_process(argv, scratch.path(), std::nullopt, {}, work_dir);
    if (r.exit_code != 0) {
      throw Error(s.program + " exited with status " + std::to_string(r.exit_code) +
                  (r.err.empty() ? "" : "\n" + r.err));
    }
  };
  for (const auto& s : plan.prerequisites) run(s);
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    if (i + 1 == plan.steps.size()) {
      for (const auto& r : plan.renames) fs::rename(work_dir / r.from, work_dir / r.to);
    }
    run(plan.steps[i]);
  }
}

}  // namespace epig
