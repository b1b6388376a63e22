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


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "epig/batch.hpp"
#include "support.hpp"

#ifndef EPIG_CLI_PATH
#error "EPIG_CLI_PATH must name the built command-line tool"
#endif

namespace {

namespace fs = std::filesystem;

TEST(Manifest, Examples) {
  EXPECT_TRUE(epig::parse_manifest("").entries.empty());
  const auto m = epig::parse_manifest("# header\na.png\ta.txt\n\n");
  ASSERT_EQ(m.entries.size(), 1u);
  EXPECT_EQ(m.entries[0].image, "a.png");
  EXPECT_EQ(m.entries[0].ground_truth, "a.txt");
  EXPECT_EQ(m.entries[0].line, 2u);
}

TEST(Manifest, ErrorsCarryLineNumbers) {
  try {
    epig::parse_manifest("a.png\ta.txt\nb.png b.txt\na.png\tc.txt\nx\ty\tz\n");
    FAIL();
  } catch (const epig::ParseError& e) {
    ASSERT_EQ(e.issues().size(), 3u);
    EXPECT_EQ(e.issues()[0].line, 2u);
    EXPECT_EQ(e.issues()[1].line, 3u);
    EXPECT_NE(e.issues()[1].message.find("duplicate"), std::string::npos);
    EXPECT_EQ(e.issues()[2].line, 4u);
  }
}

TEST(Manifest, RelativePathsResolveAgainstManifestDir) {
  epig::detail::ScratchDir dir("epig-manifest-test");
  std::ofstream(dir.path() / "m.tsv") << "img/a.png\t/abs/a.txt\n";
  const auto m = epig::load_manifest(dir.path() / "m.tsv");
  EXPECT_EQ(m.entries[0].image, dir.path() / "img/a.png");
  EXPECT_EQ(m.entries[0].ground_truth, "/abs/a.txt");
}

/// Small data set on disk: `n` images with ground truth of ten clusters each.
class BatchFixture : public ::testing::Test {
 protected:
  static std::string ten(const std::string& cluster) {
    std::string s;
    for (int i = 0; i < 10; ++i) s += cluster;
    return s;
  }

  void make(int n) {
    std::mt19937 rng(101);
    std::string manifest;
    for (int i = 0; i < n; ++i) {
      const auto name = "img" + std::to_string(i) + ".png";
      epig::testing::TextPageOptions o;
      o.width = 160;
      o.height = 120;
      o.margin = 15;
      epig::save_image(dir_.path() / name, epig::testing::text_page(rng, o));
      std::ofstream(dir_.path() / ("gt" + std::to_string(i) + ".txt")) << ten("க") << "\n";
      manifest += name + "\tgt" + std::to_string(i) + ".txt\n";
      texts_[name] = ten("க");
    }
    std::ofstream(dir_.path() / "manifest.tsv") << manifest;
  }

  epig::BatchOptions options(const std::string& out) {
    epig::BatchOptions o;
    o.out_dir = dir_.path() / out;
    return o;
  }

  epig::Manifest manifest() { return epig::load_manifest(dir_.path() / "manifest.tsv"); }

  epig::detail::ScratchDir dir_{"epig-batch-test"};
  std::map<std::string, std::string> texts_;
};

TEST_F(BatchFixture, ExactMockTextScoresOne) {
  make(2);
  epig::MockEngine mock(texts_);
  const auto report = epig::run_batch(manifest(), options("out"), mock);
  ASSERT_TRUE(report.eval);
  EXPECT_EQ(report.eval->weighted_accuracy, 1.0);
  EXPECT_EQ(report.failures(), 0u);
  EXPECT_TRUE(fs::exists(dir_.path() / "out/report.txt"));
  EXPECT_TRUE(fs::exists(dir_.path() / "out/report.json"));
  EXPECT_TRUE(fs::exists(dir_.path() / "out/text/001_img0.txt"));
  EXPECT_TRUE(fs::exists(dir_.path() / "out/intermediates/002_img1/10_eliminate_border.pgm"));
  for (const auto& call : mock.calls()) {
    EXPECT_EQ(call[5], "--psm");
    EXPECT_EQ(call[6], "6");
  }
}

TEST_F(BatchFixture, OneWrongClusterOfTwenty) {
  make(2);
  auto texts = texts_;
  texts["img1.png"] = ten("க").replace(0, std::string("க").size(), "வ");
  epig::MockEngine mock(texts);
  const auto report = epig::run_batch(manifest(), options("out"), mock);
  ASSERT_TRUE(report.eval);
  EXPECT_DOUBLE_EQ(report.eval->weighted_accuracy, (10 * 1.0 + 10 * 0.9) / 20);
}

TEST_F(BatchFixture, FailSoftOnUnreadableImage) {
  make(3);
  std::ofstream(dir_.path() / "img1.png") << "not an image";
  epig::MockEngine mock(texts_);
  const auto report = epig::run_batch(manifest(), options("out"), mock);
  ASSERT_EQ(report.entries.size(), 3u);
  EXPECT_FALSE(report.entries[0].failed());
  EXPECT_TRUE(report.entries[1].failed());
  EXPECT_FALSE(report.entries[2].failed());
  EXPECT_EQ(report.failures(), 1u);
  ASSERT_TRUE(report.eval);
  EXPECT_EQ(report.eval->scores.size(), 2u);
  const auto table = epig::detail::read_file_bytes(dir_.path() / "out/report.txt");
  EXPECT_NE(table.find("failed\t" + (dir_.path() / "img1.png").string()), std::string::npos);
}

TEST_F(BatchFixture, WordBreakAppliedWithLexicon) {
  make(1);
  epig::MockEngine mock(std::map<std::string, std::string>{{"img0.png", "அவன்வந்தான்"}});
  std::ofstream(dir_.path() / "gt0.txt") << "அவன்வந்தான்";
  const auto lex = epig::build_lexicon({"அவன்", "வந்தான்"});
  auto opts = options("out");
  opts.lexicon = &lex;
  const auto report = epig::run_batch(manifest(), opts, mock);
  EXPECT_EQ(report.entries[0].final_text, "அவன் வந்தான்\n");
  EXPECT_EQ(report.eval->weighted_accuracy, 1.0);
}

TEST_F(BatchFixture, ParallelRunMatchesSerial) {
  make(5);
  auto texts = texts_;
  texts["img3.png"] = "கக";
  epig::MockEngine a(texts), b(texts);
  auto serial = options("serial");
  auto parallel = options("parallel");
  parallel.jobs = 4;
  epig::run_batch(manifest(), serial, a);
  epig::run_batch(manifest(), parallel, b);
  for (const char* f : {"report.txt", "report.json", "text/004_img3.txt"}) {
    EXPECT_EQ(epig::detail::read_file_bytes(dir_.path() / "serial" / f),
              epig::detail::read_file_bytes(dir_.path() / "parallel" / f))
        << f;
  }
}

int run_cli(const std::vector<std::string>& args, const fs::path& scratch) {
  std::vector<std::string> argv{EPIG_CLI_PATH};
  argv.insert(argv.end(), args.begin(), args.end());
  return epig::detail::run_process(argv, scratch).exit_code;
}

TEST_F(BatchFixture, CliExitCodes) {
  make(2);
  std::ofstream(dir_.path() / "mock.json") << R"({"texts": {"img0.png": "கககககககககக", "img1.png": "க"}})";
  const auto mock = "mock:" + (dir_.path() / "mock.json").string();
  const auto m = (dir_.path() / "manifest.tsv").string();
  EXPECT_EQ(run_cli({"pipeline", m, "-o", (dir_.path() / "o1").string(), "--engine", mock}, dir_.path()), 0);
  std::ofstream(dir_.path() / "img1.png") << "broken";
  EXPECT_EQ(run_cli({"pipeline", m, "-o", (dir_.path() / "o2").string(), "--engine", mock}, dir_.path()), 2);
  std::ofstream(dir_.path() / "bad.cfg") << "[sharpen]\n";
  EXPECT_EQ(run_cli({"pipeline", m, "-o", (dir_.path() / "o3").string(), "--engine", mock, "--config",
                     (dir_.path() / "bad.cfg").string()},
                    dir_.path()),
            1);
  EXPECT_EQ(run_cli({"pipeline", m, "-o", (dir_.path() / "o4").string(), "--engine", "bogus"}, dir_.path()), 1);
  EXPECT_EQ(run_cli({"pipeline", m, "-o", (dir_.path() / "o5").string(), "--psm", "20"}, dir_.path()), 1);
}

TEST_F(BatchFixture, CliSegmentAndBoxes) {
  std::ofstream(dir_.path() / "lex.txt") << "அவன்\nவந்தான்\n";
  std::ofstream(dir_.path() / "in.txt") << "அவன்வந்தான்\nவந்தான் அவன்\n";
  std::ofstream(dir_.path() / "b.box") << "க 10 0 30 40 0\nா 14 5 22 30 0\n";
  const auto out = dir_.path() / "seg.txt";
  ASSERT_EQ(run_cli({"segment", (dir_.path() / "in.txt").string(), "--lexicon", (dir_.path() / "lex.txt").string(),
                     "-o", out.string()},
                    dir_.path()),
            0);
  EXPECT_EQ(epig::detail::read_file_bytes(out), "அவன் வந்தான்\nவந்தான் அவன்\n");
  ASSERT_EQ(run_cli({"boxes", "merge", (dir_.path() / "b.box").string(), "-o", (dir_.path() / "m.box").string()},
                    dir_.path()),
            0);
  EXPECT_EQ(epig::detail::read_file_bytes(dir_.path() / "m.box"), "கா 10 0 30 40 0\n");
  std::ofstream(dir_.path() / "bad.box") << "க 40 30 12 80 0\n";
  EXPECT_EQ(run_cli({"boxes", "parse", (dir_.path() / "bad.box").string()}, dir_.path()), 1);
}

}  // namespace
