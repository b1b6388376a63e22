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
#include <random>

#include "epig/engine.hpp"
#include "support.hpp"

namespace {

namespace fs = std::filesystem;
using epig::EngineError;
using epig::GrayImage;
using epig::OcrRequest;

/// Stand-in engine binary: records its arguments and environment, then
/// behaves according to the requested model name.
class FakeEngine : public ::testing::Test {
 protected:
  void SetUp() override {
    script_ = dir_.path() / "fake-ocr";
    log_ = dir_.path() / "args.log";
    std::ofstream(script_) << "#!/bin/sh\n"
                              "printf '%s\\n' \"$@\" > '" << log_.string() << "'\n"
                              "printf '%s\\n' \"$TESSDATA_PREFIX\" >> '" << log_.string() << "'\n"
                              "case \"$4\" in\n"
                              "  missing) echo \"Failed loading language '$4'\" >&2; exit 1 ;;\n"
                              "  crash) echo 'segfault-ish' >&2; exit 3 ;;\n"
                              "  slow) sleep 5 ;;\n"
                              "  silent) exit 0 ;;\n"
                              "esac\n"
                              "test -f \"$1\" || exit 9\n"
                              "printf 'தமிழ்\\n' > \"$2.txt\"\n"
                              "echo 'Estimating resolution' >&2\n";
    ::chmod(script_.c_str(), 0755);
  }

  epig::ExternalEngine engine(std::chrono::milliseconds timeout = std::chrono::seconds(20)) {
    epig::ExternalEngineOptions o;
    o.binary = script_.string();
    o.model_dir = dir_.path() / "models";
    o.timeout = timeout;
    return epig::ExternalEngine(o);
  }

  std::vector<std::string> logged_args() const {
    std::ifstream in(log_);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    return lines;
  }

  epig::detail::ScratchDir dir_{"epig-engine-test"};
  fs::path script_;
  fs::path log_;
};

TEST(OcrRequest, Validation) {
  OcrRequest req;
  req.image = GrayImage(2, 2);
  EXPECT_NO_THROW(req.validate());
  req.psm = 14;
  EXPECT_THROW(req.validate(), epig::ConfigError);
  req.psm = -1;
  EXPECT_THROW(req.validate(), epig::ConfigError);
  req.psm = 6;
  req.model.clear();
  EXPECT_THROW(req.validate(), epig::ConfigError);
}

TEST(EngineArguments, Layout) {
  OcrRequest req;
  req.model = "atam";
  req.psm = 6;
  EXPECT_EQ(epig::engine_arguments("tesseract", "in.png", "out", req),
            (std::vector<std::string>{"tesseract", "in.png", "out", "-l", "atam", "--psm", "6"}));
}

TEST(Fingerprint, DependsOnPixelsAndShape) {
  const GrayImage a(4, 2, 7);
  EXPECT_EQ(epig::fingerprint(a), epig::fingerprint(GrayImage(4, 2, 7)));
  EXPECT_NE(epig::fingerprint(a), epig::fingerprint(GrayImage(2, 4, 7)));
  EXPECT_NE(epig::fingerprint(a), epig::fingerprint(GrayImage(4, 2, 8)));
  EXPECT_EQ(epig::fingerprint(a).size(), 16u);
  epig::BinaryImage b(3, 3);
  b.set(1, 1, true);
  EXPECT_EQ(epig::fingerprint(b), epig::fingerprint(epig::render(b)));
}

TEST(MockEngine, FixturePassthrough) {
  std::mt19937 rng(71);
  const auto img = epig::testing::random_gray(rng, 8, 8);
  epig::MockEngine mock({{epig::fingerprint(img), "தமிழ்"}});
  OcrRequest req;
  req.image = img;
  EXPECT_EQ(mock.recognize(req).text, "தமிழ்");
  req.image = epig::testing::random_gray(rng, 8, 8);
  try {
    mock.recognize(req);
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.kind(), EngineError::Kind::no_fixture);
  }
}

TEST(MockEngine, CapturesPsmArgument) {
  epig::MockEngine mock(std::map<std::string, std::string>{{"page.png", "x"}});
  OcrRequest req;
  req.image = GrayImage(3, 3);
  req.source_id = "scans/page.png";
  mock.recognize(req);
  req.psm = 11;
  mock.recognize(req);
  const auto calls = mock.calls();
  ASSERT_EQ(calls.size(), 2u);
  const auto psm_of = [](const std::vector<std::string>& args) {
    auto it = std::find(args.begin(), args.end(), "--psm");
    return it == args.end() || it + 1 == args.end() ? std::string() : *(it + 1);
  };
  EXPECT_EQ(psm_of(calls[0]), "6");
  EXPECT_EQ(psm_of(calls[1]), "11");
  EXPECT_EQ(calls[0][4], "atam");
}

TEST(MockEngine, MissingModel) {
  epig::MockEngine mock({{"a", "x"}}, {"atam"});
  OcrRequest req;
  req.image = GrayImage(1, 1);
  req.source_id = "a";
  req.model = "eng";
  try {
    mock.recognize(req);
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.kind(), EngineError::Kind::model_not_found);
    ASSERT_FALSE(e.diagnostics().empty());
  }
}

TEST(MockEngine, LoadsJsonFixtures) {
  epig::detail::ScratchDir dir("epig-mock-test");
  std::ofstream(dir.path() / "f.json") << R"({"models": ["atam"], "texts": {"a.png": "அ"}})";
  auto mock = epig::MockEngine::from_file(dir.path() / "f.json");
  OcrRequest req;
  req.image = fs::path("/some/where/a.png");
  EXPECT_EQ(mock.recognize(req).text, "அ");
  std::ofstream(dir.path() / "bad.json") << "{";
  EXPECT_THROW(epig::MockEngine::from_file(dir.path() / "bad.json"), epig::ConfigError);
}

TEST_F(FakeEngine, InvokesWithExpectedArgumentsAndCleansUp) {
  OcrRequest req;
  req.image = GrayImage(5, 4, 200);
  auto e = engine();
  const auto result = e.recognize(req);
  EXPECT_EQ(result.text, "தமிழ்\n");
  EXPECT_EQ(result.engine_diagnostics, (std::vector<std::string>{"Estimating resolution"}));

  const auto args = logged_args();
  ASSERT_EQ(args.size(), 7u);
  EXPECT_EQ(fs::path(args[0]).extension(), ".png");
  EXPECT_EQ(args[2], "-l");
  EXPECT_EQ(args[3], "atam");
  EXPECT_EQ(args[4], "--psm");
  EXPECT_EQ(args[5], "6");
  EXPECT_EQ(args[6], (dir_.path() / "models").string());
  // The staged input and the output base lived in a scratch dir that is gone.
  EXPECT_FALSE(fs::exists(fs::path(args[0]).parent_path()));
}

TEST_F(FakeEngine, PathInputIsPassedThroughUntouched) {
  const auto input = dir_.path() / "page.pgm";
  epig::save_image(input, GrayImage(3, 3, 9));
  const auto before = epig::detail::read_file_bytes(input);
  OcrRequest req;
  req.image = input;
  auto e = engine();
  e.recognize(req);
  EXPECT_EQ(logged_args()[0], input.string());
  EXPECT_EQ(epig::detail::read_file_bytes(input), before);
}

TEST_F(FakeEngine, MissingModelCarriesStderr) {
  OcrRequest req;
  req.image = GrayImage(2, 2);
  req.model = "missing";
  auto e = engine();
  try {
    e.recognize(req);
    FAIL();
  } catch (const EngineError& err) {
    EXPECT_EQ(err.kind(), EngineError::Kind::model_not_found);
    EXPECT_NE(std::string(err.what()).find("Failed loading language 'missing'"), std::string::npos);
    EXPECT_EQ(err.diagnostics().size(), 1u);
  }
}

TEST_F(FakeEngine, NonZeroExitAndNoOutput) {
  OcrRequest req;
  req.image = GrayImage(2, 2);
  req.model = "crash";
  auto e = engine();
  try {
    e.recognize(req);
    FAIL();
  } catch (const EngineError& err) {
    EXPECT_EQ(err.kind(), EngineError::Kind::engine_failed);
    EXPECT_NE(std::string(err.what()).find("status 3"), std::string::npos);
    EXPECT_EQ(err.diagnostics(), (std::vector<std::string>{"segfault-ish"}));
  }
  req.model = "silent";
  try {
    e.recognize(req);
    FAIL();
  } catch (const EngineError& err) {
    EXPECT_EQ(err.kind(), EngineError::Kind::engine_failed);
  }
}

TEST_F(FakeEngine, Timeout) {
  OcrRequest req;
  req.image = GrayImage(2, 2);
  req.model = "slow";
  auto e = engine(std::chrono::milliseconds(200));
  const auto start = std::chrono::steady_clock::now();
  try {
    e.recognize(req);
    FAIL();
  } catch (const EngineError& err) {
    EXPECT_EQ(err.kind(), EngineError::Kind::timeout);
  }
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(4));
}

TEST(ExternalEngine, NotFound) {
  epig::ExternalEngineOptions o;
  o.binary = "epig-no-such-engine-binary";
  epig::ExternalEngine e(o);
  OcrRequest req;
  req.image = GrayImage(2, 2);
  try {
    e.recognize(req);
    FAIL();
  } catch (const EngineError& err) {
    EXPECT_EQ(err.kind(), EngineError::Kind::engine_not_found);
  }
}

TEST(ExternalEngine, OptionsFromEnvironment) {
  ::setenv("EPIG_ENGINE_BIN", "/opt/ocr/bin/engine", 1);
  ::setenv("EPIG_MODEL_DIR", "/opt/ocr/models", 1);
  const auto o = epig::ExternalEngineOptions::from_env();
  EXPECT_EQ(o.binary, "/opt/ocr/bin/engine");
  ASSERT_TRUE(o.model_dir);
  EXPECT_EQ(o.model_dir->string(), "/opt/ocr/models");
  EXPECT_EQ(o.timeout, std::chrono::seconds(120));
  ::unsetenv("EPIG_ENGINE_BIN");
  ::unsetenv("EPIG_MODEL_DIR");
  EXPECT_EQ(epig::ExternalEngineOptions::from_env().binary, "tesseract");
}

}  // namespace
