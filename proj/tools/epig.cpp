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


#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "epig/epig.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

struct EngineFlags {
  std::string engine = "external";
  std::string model = "atam";
  int psm = 6;
  double timeout_s = 120.0;
};

void add_engine_flags(CLI::App* cmd, EngineFlags& f) {
  cmd->add_option("--engine", f.engine, "external, or mock:<fixtures.json>")->capture_default_str();
  cmd->add_option("--model", f.model, "recognition model name")->capture_default_str();
  cmd->add_option("--psm", f.psm, "page segmentation mode")->capture_default_str()->check(CLI::Range(0, 13));
  cmd->add_option("--timeout", f.timeout_s, "engine timeout in seconds")->capture_default_str()
      ->check(CLI::PositiveNumber);
}

std::unique_ptr<epig::OcrEngine> make_engine(const EngineFlags& f) {
  if (f.engine == "external") {
    auto opts = epig::ExternalEngineOptions::from_env();
    opts.timeout = std::chrono::milliseconds(static_cast<long long>(f.timeout_s * 1000.0));
    return std::make_unique<epig::ExternalEngine>(opts);
  }
  if (f.engine.rfind("mock:", 0) == 0) {
    return std::make_unique<epig::MockEngine>(epig::MockEngine::from_file(f.engine.substr(5)));
  }
  throw epig::ConfigError("--engine must be 'external' or 'mock:<path>', got '" + f.engine + "'");
}

epig::PipelineConfig config_or_default(const std::string& path) {
  return path.empty() ? epig::PipelineConfig::defaults() : epig::load_config(path);
}

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  return epig::detail::read_file_bytes(path);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else epig::detail::write_file_bytes(path, text);
}

void print_diagnostics(const std::vector<epig::BoxDiagnostic>& diags) {
  for (const auto& d : diags) std::cerr << "warning: " << d.message << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preprocessing, OCR orchestration, word-break and evaluation for Tamil inscriptions",
               "epig"};
  app.require_subcommand(1);
  int exit_code = kExitOk;

  // preprocess
  std::string pre_in, pre_out, pre_cfg, pre_dump;
  auto* preprocess = app.add_subcommand("preprocess", "run the preprocessing pipeline on one image");
  preprocess->add_option("input", pre_in, "input image (PNG, PGM or PPM)")->required();
  preprocess->add_option("-o,--output", pre_out, "final image (.png, or .pgm/.ppm)")->required();
  preprocess->add_option("--config", pre_cfg, "pipeline configuration file");
  preprocess->add_option("--dump-intermediates", pre_dump, "directory for every stage output");
  preprocess->callback([&] {
    const auto cfg = config_or_default(pre_cfg);
    const auto result = epig::run_pipeline(epig::load_image(pre_in), cfg);
    std::visit([&](const auto& img) { epig::save_image(pre_out, img); }, result.final_image());
    if (!pre_dump.empty()) epig::dump_intermediates(result, pre_dump);
    if (result.skew_angle) std::cerr << "skew correction: " << *result.skew_angle << " deg\n";
  });

  // ocr
  std::string ocr_in, ocr_cfg, ocr_out;
  EngineFlags ocr_engine;
  bool ocr_raw = false;
  auto* ocr = app.add_subcommand("ocr", "recognize text in one image");
  ocr->add_option("input", ocr_in, "input image")->required();
  ocr->add_option("--config", ocr_cfg, "preprocess with this pipeline configuration first");
  ocr->add_flag("--raw", ocr_raw, "send the image to the engine without preprocessing");
  ocr->add_option("-o,--output", ocr_out, "write text here instead of stdout");
  add_engine_flags(ocr, ocr_engine);
  ocr->callback([&] {
    auto engine = make_engine(ocr_engine);
    epig::OcrRequest req;
    req.model = ocr_engine.model;
    req.psm = ocr_engine.psm;
    req.source_id = ocr_in;
    if (ocr_raw) {
      req.image = fs::path(ocr_in);
    } else {
      req.image = epig::run_pipeline(epig::load_image(ocr_in), config_or_default(ocr_cfg))
                      .recognition_input();
    }
    write_output(ocr_out, engine->recognize(req).text);
  });

  // segment
  std::string seg_in, seg_lex, seg_out;
  bool seg_keep_spaces = false;
  auto* segment = app.add_subcommand("segment", "insert word breaks into space-less text");
  segment->add_option("input", seg_in, "text file (default: standard input)");
  segment->add_option("--lexicon", seg_lex, "word list, one word per line")->required();
  segment->add_option("-o,--output", seg_out, "write here instead of stdout");
  segment->add_flag("--keep-spaces", seg_keep_spaces, "segment each space-separated chunk on its own");
  segment->callback([&] {
    const auto lex = epig::parse_lexicon(epig::detail::read_file_bytes(seg_lex));
    std::string out;
    epig::detail::for_each_line(read_input(seg_in), [&](std::size_t, std::string_view line) {
      if (!seg_keep_spaces) {
        out += epig::segment_text(epig::detail::strip_whitespace(line, false), lex) + "\n";
        return;
      }
      std::string joined;
      std::size_t pos = 0;
      while (pos <= line.size()) {
        auto sp = line.find(' ', pos);
        if (sp == std::string_view::npos) sp = line.size();
        const auto chunk = line.substr(pos, sp - pos);
        if (!chunk.empty()) {
          if (!joined.empty()) joined += ' ';
          joined += epig::segment_text(chunk, lex);
        }
        pos = sp + 1;
      }
      out += joined + "\n";
    });
    write_output(seg_out, out);
  });

  // eval
  std::string ev_pairs, ev_pred, ev_gt, ev_json;
  bool ev_no_normalize = false, ev_keep_spaces = false;
  auto* eval = app.add_subcommand("eval", "score predicted text against ground truth");
  eval->add_option("pairs", ev_pairs, "file of '<prediction>\\t<ground-truth>' path pairs");
  eval->add_option("--pred", ev_pred, "single prediction file");
  eval->add_option("--gt", ev_gt, "single ground-truth file");
  eval->add_option("--json", ev_json, "also write the report as JSON");
  eval->add_flag("--no-normalize", ev_no_normalize, "compare full clusters, not base characters");
  eval->add_flag("--keep-spaces", ev_keep_spaces, "keep inner whitespace when scoring");
  eval->callback([&] {
    epig::ScoreOptions opts{!ev_no_normalize, ev_keep_spaces};
    epig::Manifest pairs;
    if (!ev_pairs.empty()) {
      pairs = epig::load_manifest(ev_pairs);
    } else if (!ev_pred.empty() && !ev_gt.empty()) {
      pairs.entries.push_back({ev_pred, ev_gt, 0});
    } else {
      throw epig::ConfigError("eval: give a pairs file or both --pred and --gt");
    }
    std::vector<epig::ImageScore> scores;
    for (const auto& e : pairs.entries) {
      scores.push_back(epig::score_image(epig::detail::read_file_bytes(e.image),
                                         epig::detail::read_file_bytes(e.ground_truth), opts,
                                         e.image.string()));
    }
    const auto report = epig::aggregate(std::move(scores));
    std::cout << epig::format_report_table(report, opts);
    if (!ev_json.empty()) {
      epig::detail::write_file_bytes(ev_json, epig::report_to_json(report, opts).dump(2) + "\n");
    }
  });

  // pipeline
  std::string pl_manifest, pl_out, pl_cfg, pl_lex, pl_dump;
  unsigned pl_jobs = 1;
  bool pl_no_normalize = false, pl_keep_spaces = false;
  EngineFlags pl_engine;
  auto* pipeline = app.add_subcommand("pipeline", "preprocess, recognize, segment and score a manifest");
  pipeline->add_option("manifest", pl_manifest, "'<image>\\t<ground-truth>' manifest")->required();
  pipeline->add_option("-o,--out", pl_out, "output directory")->required();
  pipeline->add_option("--config", pl_cfg, "pipeline configuration file");
  pipeline->add_option("--lexicon", pl_lex, "word list for word-break");
  pipeline->add_option("--jobs", pl_jobs, "entries processed concurrently")->capture_default_str()
      ->check(CLI::PositiveNumber);
  pipeline->add_option("--dump-intermediates", pl_dump, "stage outputs (default: <out>/intermediates)");
  pipeline->add_flag("--no-normalize", pl_no_normalize, "compare full clusters, not base characters");
  pipeline->add_flag("--keep-spaces", pl_keep_spaces, "keep inner whitespace when scoring");
  add_engine_flags(pipeline, pl_engine);
  pipeline->callback([&] {
    epig::BatchOptions opts;
    opts.config = config_or_default(pl_cfg);
    opts.model = pl_engine.model;
    opts.psm = pl_engine.psm;
    opts.score = {!pl_no_normalize, pl_keep_spaces};
    opts.out_dir = pl_out;
    if (!pl_dump.empty()) opts.intermediates_dir = fs::path(pl_dump);
    opts.jobs = pl_jobs;
    std::optional<epig::Lexicon> lex;
    if (!pl_lex.empty()) lex = epig::parse_lexicon(epig::detail::read_file_bytes(pl_lex));
    opts.lexicon = lex ? &*lex : nullptr;
    const auto manifest = epig::load_manifest(pl_manifest);
    auto engine = make_engine(pl_engine);

    const auto report = epig::run_batch(manifest, opts, *engine);
    std::cout << epig::format_batch_report(report, opts.score);
    if (report.failures() > 0) exit_code = kExitPartial;
  });

  // train-plan
  std::string tp_dir, tp_lang = "atam", tp_props;
  bool tp_json = false, tp_execute = false;
  auto* train = app.add_subcommand("train-plan", "print the legacy training command sequence");
  train->add_option("box_dir", tp_dir, "directory of matched image/box pairs")->required();
  train->add_option("--lang", tp_lang, "language code of the trained model")->capture_default_str();
  train->add_option("--font-properties", tp_props, "font properties file")->required();
  train->add_flag("--json", tp_json, "print the plan as JSON");
  train->add_flag("--execute", tp_execute, "run the plan after printing it");
  train->callback([&] {
    const auto plan = epig::plan_training(tp_dir, tp_lang, tp_props);
    std::cout << (tp_json ? epig::plan_to_json(plan).dump(2) + "\n" : epig::format_plan(plan));
    if (tp_execute) epig::execute_plan(plan);
  });

  // boxes
  auto* boxes = app.add_subcommand("boxes", "box file tools");
  boxes->require_subcommand(1);
  std::string bx_in, bx_out;
  std::optional<int> bx_height;
  double bx_ratio = 0.5;
  auto add_box_io = [&](CLI::App* cmd) {
    cmd->add_option("input", bx_in, "box file (default: standard input)");
    cmd->add_option("-o,--output", bx_out, "write here instead of stdout");
    cmd->add_option("--image-height", bx_height, "reject boxes above this height");
  };
  auto load_boxes = [&] { return epig::parse_box_file(read_input(bx_in), bx_height); };
  auto* bx_parse = boxes->add_subcommand("parse", "validate and rewrite in canonical form");
  add_box_io(bx_parse);
  bx_parse->callback([&] { write_output(bx_out, epig::write_box_file(load_boxes())); });
  auto* bx_merge = boxes->add_subcommand("merge", "merge boxes split across a compound letter");
  add_box_io(bx_merge);
  bx_merge->add_option("--ratio", bx_ratio, "minimum overlap as a fraction of the narrower box")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  bx_merge->callback([&] {
    write_output(bx_out, epig::write_box_file(epig::merge_compound_boxes(load_boxes(), bx_ratio)));
  });
  auto* bx_resolve = boxes->add_subcommand("resolve", "cut overlapping boxes at the overlap midline");
  add_box_io(bx_resolve);
  bx_resolve->callback([&] {
    const auto r = epig::resolve_overlaps(load_boxes());
    print_diagnostics(r.diagnostics);
    write_output(bx_out, epig::write_box_file(r.boxes));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return exit_code;
}
