#include <gtest/gtest.h>

#include <random>

#include "anchors.hpp"
#include "kfr/error.hpp"
#include "kfr/metrics.hpp"
#include "kfr/rewards.hpp"

using namespace kfr;

namespace {

BinaryMask random_mask(std::mt19937_64& rng, int n, double p) {
  std::bernoulli_distribution bit(p);
  BinaryMask m(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) m.set(x, y, bit(rng));
  return m;
}

EvalConfig small_eval() {
  EvalConfig cfg;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST(JScore, Examples) {
  const auto a = box_to_mask({0, 0, 2, 4}, 4, 4), b = box_to_mask({0, 0, 4, 2}, 4, 4);
  EXPECT_DOUBLE_EQ(j_score({a, b}, {a, b}), 1.0);
  EXPECT_NEAR(j_score({a, a}, {a, b}), 2.0 / 3.0, 1e-15);
  EXPECT_THROW(j_score({a}, {}), PreconditionError);
}

TEST(JScore, EqualsGlobalConsistency) {
  std::mt19937_64 rng(71);
  for (int i = 0; i < 200; ++i) {
    MaskSequence p, g;
    for (int t = 0; t < 5; ++t) {
      p.push_back(random_mask(rng, 8, 0.3));
      g.push_back(random_mask(rng, 8, 0.3));
    }
    EXPECT_EQ(j_score(p, g), global_consistency_reward(p, g));
  }
}

TEST(FScore, Examples) {
  const auto m = box_to_mask({4, 4, 12, 12}, 16, 16);
  EXPECT_DOUBLE_EQ(f_score({m}, {m}, 1), 1.0);
  EXPECT_DOUBLE_EQ(f_score({BinaryMask(16, 16)}, {BinaryMask(16, 16)}, 0), 1.0);
  EXPECT_DOUBLE_EQ(f_measure(BinaryMask(16, 16), m, 3), 0.0);
  const auto shifted = box_to_mask({5, 4, 13, 12}, 16, 16);
  EXPECT_DOUBLE_EQ(f_score({shifted}, {m}, 1), 1.0);
  EXPECT_LT(f_score({shifted}, {m}, 0), 1.0);
}

TEST(FScore, SymmetricAndBounded) {
  std::mt19937_64 rng(72);
  for (int i = 0; i < 300; ++i) {
    const auto a = random_mask(rng, 10, 0.4), b = random_mask(rng, 10, 0.4);
    for (int tol : {0, 1, 2}) {
      const double ab = f_measure(a, b, tol);
      EXPECT_EQ(ab, f_measure(b, a, tol));
      EXPECT_GE(ab, 0.0);
      EXPECT_LE(ab, 1.0);
    }
  }
}

TEST(Evaluate, HandPlacedAnchorsScoreHigh) {
  const auto seeds = corpus_seeds(3, 20);
  const ActionProvider oracle = [](const Episode& clip, const Episode&) { return oracle::spread_action(clip, 4); };
  EXPECT_GE(evaluate(oracle, seeds, small_eval()).jf_mean, 0.9);
}

TEST(Evaluate, DeterministicReportAndInvariant) {
  const auto seeds = corpus_seeds(4, 12);
  Rng rng(9);
  const auto params = init_params(8, 0.5, rng);
  auto cfg = small_eval();
  const auto a = evaluate(params, seeds, cfg);
  cfg.threads = 4;
  const auto b = evaluate(params, seeds, cfg);
  ASSERT_EQ(a.episodes.size(), seeds.size());
  EXPECT_EQ(a.jf_mean, b.jf_mean);
  for (std::size_t i = 0; i < a.episodes.size(); ++i) {
    EXPECT_EQ(a.episodes[i].jf, b.episodes[i].jf);
    EXPECT_EQ(a.episodes[i].keyframes, b.episodes[i].keyframes);
    EXPECT_NEAR(a.episodes[i].jf, 0.5 * (a.episodes[i].j + a.episodes[i].f), 1e-12);
  }
  EXPECT_NEAR(a.jf_mean, 0.5 * (a.j_mean + a.f_mean), 1e-12);
  EXPECT_THROW(evaluate(params, std::vector<std::uint64_t>{}, cfg), PreconditionError);
}

TEST(Evaluate, SegmentsCovered) {
  Episode e;
  e.frames = 20;
  SimObject t;
  t.visibility = {{0, 5}, {10, 15}, {17, 20}};
  e.objects.push_back(t);
  EXPECT_EQ(segments_covered(e, std::vector<int>{1, 2, 12}), 2);
  EXPECT_EQ(segments_covered(e, std::vector<int>{6, 7}), 0);
  EXPECT_EQ(segments_covered(e, std::vector<int>{4, 10, 19}), 3);
}

TEST(Evaluate, CorpusSeedsAreStable) {
  EXPECT_EQ(corpus_seeds(1, 5), corpus_seeds(1, 5));
  EXPECT_NE(corpus_seeds(1, 5), corpus_seeds(2, 5));
}
