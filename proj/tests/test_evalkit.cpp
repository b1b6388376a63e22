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

#include <random>

#include "epig/evalkit.hpp"
#include "oracles.hpp"

namespace {

using epig::GraphemeSeq;

GraphemeSeq random_seq(std::mt19937& rng, std::size_t max_len) {
  static const std::vector<std::string> alphabet{"க", "கா", "ன்", "ன", "வ", "அ"};
  GraphemeSeq s;
  const std::size_t n = rng() % (max_len + 1);
  for (std::size_t i = 0; i < n; ++i) s.clusters.push_back(alphabet[rng() % alphabet.size()]);
  return s;
}

TEST(EditDistance, Examples) {
  const auto a = epig::split_graphemes("அவன்வந்தான்");
  EXPECT_EQ(epig::edit_distance(a, a), 0u);
  EXPECT_EQ(epig::edit_distance(epig::split_graphemes("கா"), epig::split_graphemes("க")), 1u);
  EXPECT_EQ(epig::edit_distance(a, GraphemeSeq{}), a.size());
  EXPECT_EQ(epig::edit_distance(GraphemeSeq{}, a), a.size());
}

TEST(EditDistance, MatchesFullMatrixReference) {
  std::mt19937 rng(91);
  for (int i = 0; i < 300; ++i) {
    const auto a = random_seq(rng, 40), b = random_seq(rng, 40);
    ASSERT_EQ(epig::edit_distance(a, b), epig::testing::naive_edit_distance(a.clusters, b.clusters));
  }
}

TEST(EditDistance, IsAMetric) {
  std::mt19937 rng(92);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_seq(rng, 12), b = random_seq(rng, 12), c = random_seq(rng, 12);
    const auto ab = epig::edit_distance(a, b);
    EXPECT_EQ(ab, epig::edit_distance(b, a));
    EXPECT_EQ(ab == 0, a == b);
    EXPECT_LE(epig::edit_distance(a, c), ab + epig::edit_distance(b, c));
  }
}

TEST(ScoreImage, Examples) {
  EXPECT_EQ(epig::score_image("அவன்", "அவன்").accuracy, 1.0);
  std::string gt;
  for (int i = 0; i < 10; ++i) gt += "கா";
  std::string pred = gt;
  pred.replace(0, std::string("கா").size(), "வா");
  const auto s = epig::score_image(pred, gt);
  EXPECT_EQ(s.gt_len, 10u);
  EXPECT_EQ(s.distance, 1u);
  EXPECT_DOUBLE_EQ(s.accuracy, 0.9);
  const auto clamp = epig::score_image("வவவவவவ", "கக");
  EXPECT_EQ(clamp.distance, 6u);
  EXPECT_EQ(clamp.accuracy, 0.0);
  EXPECT_THROW(epig::score_image("x", ""), epig::ConfigError);
  EXPECT_THROW(epig::score_image("x", " \n\t"), epig::ConfigError);
}

TEST(ScoreImage, NormalizationAndWhitespace) {
  EXPECT_EQ(epig::score_image("ன்", "ன").distance, 0u);
  EXPECT_EQ(epig::score_image("ன்", "ன", {false, false}).distance, 1u);
  EXPECT_EQ(epig::score_image("அவன் வந்தான்\n", "அவன்வந்தான்").distance, 0u);
  EXPECT_EQ(epig::score_image("அவன் வந்தான்", "அவன்வந்தான்", {true, true}).distance, 1u);
}

TEST(ScoreImage, NormalizedScoringIgnoresVowelSigns) {
  std::mt19937 rng(93);
  for (int i = 0; i < 100; ++i) {
    const auto p = random_seq(rng, 15), g = random_seq(rng, 15);
    if (g.empty()) continue;
    const auto direct = epig::score_image(p.str(), g.str());
    const auto pre = epig::score_image(epig::normalize_base(p).str(), epig::normalize_base(g).str());
    EXPECT_EQ(direct.distance, pre.distance);
    EXPECT_EQ(direct.accuracy, pre.accuracy);
  }
}

epig::ImageScore score(std::string id, std::size_t len, double acc) {
  epig::ImageScore s;
  s.image_id = std::move(id);
  s.gt_len = len;
  s.accuracy = acc;
  return s;
}

TEST(Aggregate, Examples) {
  EXPECT_EQ(epig::aggregate({score("a", 7, 0.42)}).weighted_accuracy, 0.42);
  const auto r = epig::aggregate({score("a", 10, 1.0), score("b", 30, 0.6)});
  EXPECT_DOUBLE_EQ(r.weighted_accuracy, 0.70);
  EXPECT_EQ(r.total_graphemes, 40u);
  EXPECT_DOUBLE_EQ(epig::aggregate({score("a", 3, 0.5), score("b", 90, 0.5), score("c", 1, 0.5)}).weighted_accuracy,
                   0.5);
  EXPECT_THROW(epig::aggregate({}), epig::ConfigError);
}

TEST(Aggregate, PermutationInvariantAndBounded) {
  std::mt19937 rng(94);
  for (int i = 0; i < 50; ++i) {
    std::vector<epig::ImageScore> scores;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int k = 0; k < n; ++k) scores.push_back(score(std::to_string(k), 1 + rng() % 50, (rng() % 1001) / 1000.0));
    const auto r = epig::aggregate(scores);
    auto shuffled = scores;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_NEAR(epig::aggregate(shuffled).weighted_accuracy, r.weighted_accuracy, 1e-12);
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end(),
                                              [](const auto& a, const auto& b) { return a.accuracy < b.accuracy; });
    EXPECT_GE(r.weighted_accuracy, lo->accuracy - 1e-12);
    EXPECT_LE(r.weighted_accuracy, hi->accuracy + 1e-12);
  }
}

TEST(Report, TableAndJson) {
  const auto r = epig::aggregate({score("a.png", 10, 1.0), score("b.png", 30, 0.6)});
  const auto table = epig::format_report_table(r, {});
  EXPECT_NE(table.find("image_id\tgt_len\tdistance\taccuracy\n"), std::string::npos);
  EXPECT_NE(table.find("a.png\t10\t0\t1.000000\n"), std::string::npos);
  EXPECT_NE(table.find("weighted_accuracy\t0.700000\ttotal_graphemes\t40\n"), std::string::npos);
  EXPECT_EQ(table.rfind("# accuracy = max(0", 0), 0u);
  const auto j = epig::report_to_json(r, {});
  EXPECT_EQ(j["metric"]["clamped_at_zero"], true);
  EXPECT_EQ(j["images"].size(), 2u);
  EXPECT_EQ(j["total_graphemes"], 40);
}

}  // namespace
