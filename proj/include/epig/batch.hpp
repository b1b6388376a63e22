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
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "epig/engine.hpp"
#include "epig/evalkit.hpp"
#include "epig/image_io.hpp"
#include "epig/manifest.hpp"
#include "epig/pipeline.hpp"
#include "epig/segment.hpp"

namespace epig {

struct BatchOptions {
  PipelineConfig config = PipelineConfig::defaults();
  std::string model = "atam";
  int psm = 6;
  const Lexicon* lexicon = nullptr;  // word-break step skipped when null
  ScoreOptions score;
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> intermediates_dir;  // defaults to out_dir/intermediates
  unsigned jobs = 1;
};

struct BatchEntryResult {
  std::string image_id;  // the manifest's image path
  std::string stem;      // "<NNN>_<file stem>", names this entry's outputs
  std::optional<ImageScore> score;
  std::string raw_text;
  std::string final_text;
  std::string error;  // non-empty iff the entry failed

  bool failed() const { return !error.empty(); }
};

struct BatchReport {
  std::vector<BatchEntryResult> entries;  // manifest order
  std::optional<EvalReport> eval;         // over the entries that succeeded

  std::size_t failures() const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.failed(); }));
  }
};

namespace detail {

inline std::string entry_stem(std::size_t index, const std::filesystem::path& image) {
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "%03zu_", index + 1);
  return prefix + image.stem().string();
}

inline void process_entry(const ManifestEntry& entry, std::size_t index, const BatchOptions& opts,
                          OcrEngine& engine, BatchEntryResult& out) {
  out.image_id = entry.image.string();
  out.stem = entry_stem(index, entry.image);
  try {
    const auto gt = read_file_bytes(entry.ground_truth);
    const auto image = load_image(entry.image);
    const auto result = run_pipeline(image, opts.config);
    const auto dir = opts.intermediates_dir.value_or(opts.out_dir / "intermediates") / out.stem;
    dump_intermediates(result, dir);

    OcrRequest req;
    req.image = result.recognition_input();
    req.model = opts.model;
    req.psm = opts.psm;
    req.source_id = out.image_id;
    out.raw_text = engine.recognize(req).text;
    out.final_text = out.raw_text;
    if (opts.lexicon) {
      std::string spaced;
      for_each_line(out.raw_text, [&](std::size_t, std::string_view line) {
        spaced += segment_text(strip_whitespace(line, false), *opts.lexicon);
        spaced += '\n';
      });
      out.final_text = spaced;
    }
    write_file_bytes(opts.out_dir / "text" / (out.stem + ".txt"), out.final_text);
    out.score = score_image(out.final_text, gt, opts.score, out.image_id);
  } catch (const std::exception& e) {
    out.error = e.what();
    out.score.reset();
    if (out.error.empty()) out.error = "unknown failure";
  }
}

}  // namespace detail

/// Table report: the scored table, then one `failed` row per failed entry.
inline std::string format_batch_report(const BatchReport& r, const ScoreOptions& opts) {
  std::string out;
  if (r.eval) {
    out = format_report_table(*r.eval, opts);
  } else {
    out = "# " + metric_description(opts) + "\nimage_id\tgt_len\tdistance\taccuracy\n";
    out += "weighted_accuracy\tn/a\ttotal_graphemes\t0\n";
  }
  for (const auto& e : r.entries) {
    if (!e.failed()) continue;
    auto msg = e.error;
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::replace(msg.begin(), msg.end(), '\t', ' ');
    out += "failed\t" + e.image_id + "\t" + msg + "\n";
  }
  return out;
}

inline nlohmann::ordered_json batch_report_to_json(const BatchReport& r, const ScoreOptions& opts) {
  nlohmann::ordered_json j;
  if (r.eval) {
    j = report_to_json(*r.eval, opts);
  } else {
    j = report_to_json(EvalReport{}, opts);
    j["weighted_accuracy"] = nullptr;
  }
  auto failures = nlohmann::ordered_json::array();
  for (const auto& e : r.entries) {
    if (e.failed()) failures.push_back({{"image_id", e.image_id}, {"error", e.error}});
  }
  j["failures"] = std::move(failures);
  return j;
}

/// Preprocess, recognize, word-break and score every manifest entry. An entry
/// that fails is recorded and the run continues. Up to `jobs` entries are in
/// flight at once; results keep manifest order.
inline BatchReport run_batch(const Manifest& manifest, const BatchOptions& opts, OcrEngine& engine) {
  BatchReport report;
  report.entries.resize(manifest.entries.size());
  std::filesystem::create_directories(opts.out_dir / "text");

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < manifest.entries.size(); i = next++) {
      detail::process_entry(manifest.entries[i], i, opts, engine, report.entries[i]);
    }
  };
  const auto jobs = std::clamp<std::size_t>(opts.jobs, 1, std::max<std::size_t>(1, manifest.entries.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }

  std::vector<ImageScore> scores;
  for (const auto& e : report.entries) {
    if (e.score) scores.push_back(*e.score);
  }
  if (!scores.empty()) report.eval = aggregate(std::move(scores));

  detail::write_file_bytes(opts.out_dir / "report.txt", format_batch_report(report, opts.score));
  detail::write_file_bytes(opts.out_dir / "report.json",
                           batch_report_to_json(report, opts.score).dump(2) + "\n");
  return report;
}

}  // namespace epig
