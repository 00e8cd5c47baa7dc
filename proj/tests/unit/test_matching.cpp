#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "kfr/error.hpp"
#include "kfr/geometry.hpp"
#include "kfr/matching.hpp"
#include "kfr_tools/oracles.hpp"

using namespace kfr;

namespace {

CostMatrix random_costs(std::mt19937_64& rng, int r, int c) {
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  CostMatrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

BBox random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(0.0, 20.0), ext(1.0, 8.0);
  const double x = pos(rng), y = pos(rng);
  return {x, y, x + ext(rng), y + ext(rng)};
}

}  // namespace

TEST(Hungarian, ZeroDiagonal) {
  const auto a = hungarian(CostMatrix::from_rows({{0, 1}, {1, 0}}));
  EXPECT_EQ(a.pairs, (std::vector<std::pair<int, int>>{{0, 0}, {1, 1}}));
  EXPECT_EQ(a.total_cost, 0.0);
}

TEST(Hungarian, TwoByTwo) { EXPECT_EQ(hungarian(CostMatrix::from_rows({{1, 2}, {2, 1}})).total_cost, 2.0); }

TEST(Hungarian, ThreeByThree) {
  const auto a = hungarian(CostMatrix::from_rows({{4, 1, 3}, {2, 0, 5}, {3, 2, 2}}));
  EXPECT_EQ(a.total_cost, 5.0);
  EXPECT_EQ(a.pairs, (std::vector<std::pair<int, int>>{{0, 1}, {1, 0}, {2, 2}}));
}

TEST(Hungarian, RectangularLeavesSurplusUnmatched) {
  const auto wide = hungarian(CostMatrix::from_rows({{5, 1, 9}}));
  EXPECT_EQ(wide.pairs, (std::vector<std::pair<int, int>>{{0, 1}}));
  const auto tall = hungarian(CostMatrix::from_rows({{5}, {1}, {9}}));
  EXPECT_EQ(tall.pairs, (std::vector<std::pair<int, int>>{{1, 0}}));
  EXPECT_EQ(tall.total_cost, 1.0);
}

TEST(Hungarian, Errors) {
  EXPECT_THROW(hungarian(CostMatrix(0, 3)), PreconditionError);
  auto m = CostMatrix::from_rows({{1, 2}, {3, 4}});
  m(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(hungarian(m), PreconditionError);
  m(1, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(hungarian(m), PreconditionError);
}

TEST(Hungarian, MatchesBruteForceUpToSixBySix) {
  std::mt19937_64 rng(21);
  for (int r = 1; r <= 6; ++r) {
    for (int c = 1; c <= 6; ++c) {
      for (int trial = 0; trial < 40; ++trial) {
        const auto m = random_costs(rng, r, c);
        const auto a = hungarian(m);
        ASSERT_EQ(static_cast<int>(a.pairs.size()), std::min(r, c));
        double recomputed = 0.0;
        std::vector<bool> row_used(r), col_used(c);
        for (auto [i, j] : a.pairs) {
          EXPECT_FALSE(row_used[i] || col_used[j]);
          row_used[i] = col_used[j] = true;
          recomputed += m(i, j);
        }
        EXPECT_EQ(recomputed, a.total_cost);
        EXPECT_NEAR(a.total_cost, oracle::brute_force_assignment(m), 1e-9);
      }
    }
  }
}

TEST(Hungarian, IntegerTiesStillOptimal) {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<int> d(0, 2);
  for (int trial = 0; trial < 300; ++trial) {
    CostMatrix m(4, 5);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 5; ++j) m(i, j) = d(rng);
    EXPECT_EQ(hungarian(m).total_cost, oracle::brute_force_assignment(m));
  }
}

TEST(FrameAlignment, Examples) {
  const std::vector<BBox> gt{{0, 0, 4, 4}, {10, 10, 12, 14}};
  EXPECT_DOUBLE_EQ(frame_alignment_score(gt, gt), 1.0);
  EXPECT_DOUBLE_EQ(frame_alignment_score({}, gt), 0.0);
  const std::vector<BBox> one{{0, 0, 4, 4}};
  const std::vector<BBox> with_spurious{{0, 0, 4, 4}, {20, 20, 22, 22}};
  EXPECT_DOUBLE_EQ(frame_alignment_score(with_spurious, one), 0.5);
  EXPECT_THROW(frame_alignment_score(one, {}), PreconditionError);
}

TEST(FrameAlignment, PermutationInvariantAndSpuriousBoxesNeverHelp) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<BBox> pred(std::uniform_int_distribution<int>(1, 4)(rng)), gt(std::uniform_int_distribution<int>(1, 4)(rng));
    for (auto& b : pred) b = random_box(rng);
    for (auto& b : gt) b = random_box(rng);
    const double s = frame_alignment_score(pred, gt);
    auto p2 = pred, g2 = gt;
    std::shuffle(p2.begin(), p2.end(), rng);
    std::shuffle(g2.begin(), g2.end(), rng);
    EXPECT_NEAR(frame_alignment_score(p2, g2), s, 1e-12);
    auto more = pred;
    more.push_back({100, 100, 101, 101});
    EXPECT_LE(frame_alignment_score(more, gt), s + 1e-12);
  }
}

TEST(FrameAlignment, OneOnlyForEqualMultisets) {
  const std::vector<BBox> gt{{0, 0, 4, 4}, {0, 0, 4, 4}, {5, 5, 9, 9}};
  std::vector<BBox> pred{{5, 5, 9, 9}, {0, 0, 4, 4}, {0, 0, 4, 4}};
  EXPECT_DOUBLE_EQ(frame_alignment_score(pred, gt), 1.0);
  pred[0].x2 = 9.5;
  EXPECT_LT(frame_alignment_score(pred, gt), 1.0);
  pred = {{0, 0, 4, 4}, {5, 5, 9, 9}};
  EXPECT_LT(frame_alignment_score(pred, gt), 1.0);
}

TEST(AlignmentReward, Examples) {
  const BBox g{0, 0, 4, 4};
  EXPECT_DOUBLE_EQ(alignment_reward({{g}, {g}, {g}}, {{g}, {g}, {g}}), 1.0);
  EXPECT_DOUBLE_EQ(alignment_reward({{g}, {g, {20, 20, 21, 21}}}, {{g}, {g}}), 0.75);
  EXPECT_DOUBLE_EQ(alignment_reward({{}, {}}, {{g}, {g}}), 0.0);
  EXPECT_THROW(alignment_reward({}, {}), PreconditionError);
}

TEST(AlignmentReward, TargetAbsentKeyframeScoresZero) {
  const BBox g{0, 0, 4, 4};
  EXPECT_DOUBLE_EQ(alignment_reward({{g}, {g}}, {{g}, {}}), 0.5);
}
