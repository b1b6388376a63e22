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

#include <sys/stat.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "epig/detail/process.hpp"
#include "epig/training.hpp"

namespace {

namespace fs = std::filesystem;

class TrainingDir : public ::testing::Test {
 protected:
  void touch(const std::string& name, const std::string& content = "") {
    std::ofstream(dir_.path() / name) << content;
  }
  fs::path props() const { return dir_.path() / "font_properties"; }

  void SetUp() override {
    fs::create_directory(dir_.path() / "boxes");
    touch("font_properties", "tamilfont 0 0 0 0 0\n");
  }
  fs::path boxes() const { return dir_.path() / "boxes"; }
  void sample(const std::string& stem, const std::string& ext = ".tif") {
    touch("boxes/" + stem + ".box", "க 1 1 5 5 0\n");
    touch("boxes/" + stem + ext);
  }

  epig::detail::ScratchDir dir_{"epig-train-test"};
};

TEST_F(TrainingDir, TwoPairsGiveFourStepPlan) {
  sample("tamilfont.exp1");
  sample("tamilfont.exp0", ".png");
  const auto plan = epig::plan_training(boxes(), "atam", props());

  ASSERT_EQ(plan.steps.size(), 4u);
  EXPECT_EQ(plan.steps[0].program, "unicharset_extractor");
  EXPECT_EQ(plan.steps[1].program, "mftraining");
  EXPECT_EQ(plan.steps[2].program, "cntraining");
  EXPECT_EQ(plan.steps[3].program, "combine_tessdata");
  ASSERT_FALSE(plan.produced_artifacts.empty());
  EXPECT_EQ(plan.produced_artifacts.back(), "atam.traineddata");

  EXPECT_EQ(plan.steps[0].args, (std::vector<std::string>{"tamilfont.exp0.box", "tamilfont.exp1.box"}));
  ASSERT_EQ(plan.prerequisites.size(), 2u);
  EXPECT_EQ(plan.prerequisites[0].args,
            (std::vector<std::string>{"tamilfont.exp0.png", "tamilfont.exp0", "box.train"}));
  EXPECT_EQ(plan.steps[2].args, (std::vector<std::string>{"tamilfont.exp0.tr", "tamilfont.exp1.tr"}));
  EXPECT_EQ(plan.steps[3].args, (std::vector<std::string>{"atam."}));
  for (const char* part : {"inttemp", "normproto", "pffmtable", "shapetable"}) {
    EXPECT_NE(std::find(plan.produced_artifacts.begin(), plan.produced_artifacts.end(),
                        std::string("atam.") + part),
              plan.produced_artifacts.end())
        << part;
  }
}

TEST_F(TrainingDir, ArgumentsReferOnlyToInputsOrEarlierOutputs) {
  sample("a");
  sample("b");
  const auto plan = epig::plan_training(boxes(), "atam", props());
  std::set<std::string> available;
  for (const auto& e : fs::directory_iterator(boxes())) available.insert(e.path().filename().string());
  auto check = [&](const epig::TrainingStep& s) {
    for (std::size_t i = 0; i < s.args.size(); ++i) {
      const auto& a = s.args[i];
      if (i > 0 && s.args[i - 1] == "-O") continue;  // output name
      if (a.starts_with("-") || a == "box.train" || a == props().string()) continue;
      if (a == "a" || a == "b") continue;  // output base names for feature extraction
      if (a == "atam.") continue;          // combine prefix
      EXPECT_TRUE(available.count(a)) << s.program << " uses undeclared " << a;
    }
    for (const auto& o : s.outputs) available.insert(o);
  };
  for (const auto& s : plan.prerequisites) check(s);
  for (std::size_t i = 0; i < 3; ++i) check(plan.steps[i]);
  for (const auto& r : plan.renames) {
    EXPECT_TRUE(available.count(r.from)) << r.from;
    available.insert(r.to);
  }
  check(plan.steps[3]);
  for (const auto& prefix_file : {"atam.inttemp", "atam.normproto", "atam.pffmtable", "atam.shapetable",
                                   "atam.unicharset"}) {
    EXPECT_TRUE(available.count(prefix_file)) << prefix_file;
  }
}

TEST_F(TrainingDir, Deterministic) {
  sample("x");
  sample("y");
  EXPECT_EQ(epig::plan_training(boxes(), "atam", props()), epig::plan_training(boxes(), "atam", props()));
  EXPECT_EQ(epig::format_plan(epig::plan_training(boxes(), "atam", props())),
            epig::format_plan(epig::plan_training(boxes(), "atam", props())));
}

TEST_F(TrainingDir, EmptyDirectoryRejected) {
  EXPECT_THROW(epig::plan_training(boxes(), "atam", props()), epig::ConfigError);
}

TEST_F(TrainingDir, UnpairedInputsRejected) {
  sample("ok");
  touch("boxes/lonely.box");
  try {
    epig::plan_training(boxes(), "atam", props());
    FAIL();
  } catch (const epig::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("lonely.box"), std::string::npos);
  }
  fs::remove(boxes() / "lonely.box");
  touch("boxes/orphan.png");
  EXPECT_THROW(epig::plan_training(boxes(), "atam", props()), epig::ConfigError);
}

TEST_F(TrainingDir, MissingFontPropertiesOrDirectory) {
  sample("a");
  EXPECT_THROW(epig::plan_training(boxes(), "atam", dir_.path() / "nope"), epig::IoError);
  EXPECT_THROW(epig::plan_training(dir_.path() / "missing", "atam", props()), epig::IoError);
  EXPECT_THROW(epig::plan_training(boxes(), "", props()), epig::ConfigError);
}

TEST_F(TrainingDir, PlannerDoesNotWrite) {
  sample("a");
  std::set<std::string> before;
  for (const auto& e : fs::directory_iterator(boxes())) before.insert(e.path().filename().string());
  epig::plan_training(boxes(), "atam", props());
  std::set<std::string> after;
  for (const auto& e : fs::directory_iterator(boxes())) after.insert(e.path().filename().string());
  EXPECT_EQ(before, after);
}

TEST_F(TrainingDir, ExecuteRunsToolsInOrder) {
  sample("a");
  // Fake toolchain on PATH: every tool appends its name to a log and creates
  // the files the planner declared for it.
  const auto bin = dir_.path() / "bin";
  fs::create_directory(bin);
  const auto log = dir_.path() / "calls.log";
  auto tool = [&](const std::string& name, const std::string& body) {
    std::ofstream(bin / name) << "#!/bin/sh\necho " << name << " >> '" << log.string() << "'\n" << body;
    ::chmod((bin / name).c_str(), 0755);
  };
  tool("tesseract", "touch \"$2.tr\"\n");
  tool("unicharset_extractor", "touch unicharset\n");
  tool("mftraining", "touch inttemp pffmtable shapetable atam.unicharset\n");
  tool("cntraining", "touch normproto\n");
  tool("combine_tessdata", "test -f atam.inttemp && touch atam.traineddata\n");
  const std::string old_path = std::getenv("PATH") ? std::getenv("PATH") : "";
  ::setenv("PATH", (bin.string() + ":" + old_path).c_str(), 1);
  const auto plan = epig::plan_training(boxes(), "atam", props());
  EXPECT_NO_THROW(epig::execute_plan(plan));
  ::setenv("PATH", old_path.c_str(), 1);
  EXPECT_TRUE(fs::exists(boxes() / "atam.traineddata"));
  EXPECT_EQ(epig::detail::read_file_bytes(log),
            "tesseract\nunicharset_extractor\nmftraining\ncntraining\ncombine_tessdata\n");
}

TEST_F(TrainingDir, JsonAndShellRendering) {
  sample("a");
  const auto plan = epig::plan_training(boxes(), "atam", props());
  const auto j = epig::plan_to_json(plan);
  EXPECT_EQ(j["steps"].size(), 4u);
  EXPECT_EQ(j["produced_artifacts"].back(), "atam.traineddata");
  const auto text = epig::format_plan(plan);
  EXPECT_NE(text.find("mv inttemp atam.inttemp\n"), std::string::npos);
  EXPECT_NE(text.find("combine_tessdata atam.\n"), std::string::npos);
}

}  // namespace
