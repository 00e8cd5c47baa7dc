#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "kfr/error.hpp"
#include "kfr/grpo.hpp"
#include "kfr/rng.hpp"

using namespace kfr;

namespace {

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

double pop_std(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size()));
}

// Two frames; frame 1 is the visible one. One rollout per frame choice.
RolloutGroup two_frame_group(const PolicyParams& p, const std::vector<double>& rewards) {
  RolloutGroup g;
  g.observations.resize(2);
  g.observations[1].presence_score = 1.0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    Rollout r;
    r.action.selected = {int(i % 2)};
    r.action.instructions = {LocalInstruction::all()};
    r.logp_old = r.logp_ref = logprob(p, g.observations, r.action);
    r.reward.r_total = rewards[i];
    g.rollouts.push_back(r);
  }
  return g;
}

double objective(const PolicyParams& p, const RolloutGroup& g, const GrpoConfig& cfg) {
  std::vector<double> rewards;
  for (const auto& r : g.rollouts) rewards.push_back(r.reward.r_total);
  const auto adv = group_advantages(rewards, cfg.advantage_epsilon);
  double total = 0.0;
  for (std::size_t i = 0; i < g.rollouts.size(); ++i) {
    const double lp = logprob(p, g.observations, g.rollouts[i].action);
    total += clipped_surrogate(lp, g.rollouts[i].logp_old, adv[i], cfg.clip_eps) -
             cfg.beta * kl_estimate(lp, g.rollouts[i].logp_ref);
  }
  return total / double(g.rollouts.size());
}

}  // namespace

TEST(GroupAdvantages, Examples) {
  EXPECT_EQ(group_advantages(std::vector<double>{0.5, 0.5, 0.5}, 1e-8), (std::vector<double>{0, 0, 0}));
  const auto two = group_advantages(std::vector<double>{0, 1}, 1e-8);
  EXPECT_DOUBLE_EQ(two[0], -1.0);
  EXPECT_DOUBLE_EQ(two[1], 1.0);
  const auto four = group_advantages(std::vector<double>{0.2, 0.4, 0.6, 0.8}, 1e-8);
  const std::vector<double> expect{-1.34164, -0.44721, 0.44721, 1.34164};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(four[i], expect[i], 1e-5);
  EXPECT_THROW(group_advantages(std::vector<double>{1.0}, 1e-8), PreconditionError);
}

TEST(GroupAdvantages, StandardizedShiftInvariantSignEquivariant) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> r(2 + trial % 10);
    for (auto& x : r) x = u(rng);
    const auto a = group_advantages(r, 1e-8);
    EXPECT_NEAR(mean_of(a), 0.0, 1e-9);
    EXPECT_NEAR(pop_std(a), 1.0, 1e-9);
    auto shifted = r, negated = r;
    for (auto& x : shifted) x += 3.25;
    for (auto& x : negated) x = -x;
    const auto as = group_advantages(shifted, 1e-8), an = group_advantages(negated, 1e-8);
    for (std::size_t i = 0; i < r.size(); ++i) {
      EXPECT_NEAR(as[i], a[i], 1e-9);
      EXPECT_NEAR(an[i], -a[i], 1e-12);
    }
  }
}

TEST(ClippedSurrogate, Examples) {
  EXPECT_DOUBLE_EQ(clipped_surrogate(-1.3, -1.3, 0.7, 0.2), 0.7);
  EXPECT_NEAR(clipped_surrogate(std::log(1.5), 0.0, 1.0, 0.2), 1.2, 1e-12);
  EXPECT_NEAR(clipped_surrogate(std::log(0.5), 0.0, -1.0, 0.2), -0.8, 1e-12);
  EXPECT_THROW(clipped_surrogate(800.0, 0.0, 1.0, 0.2), PreconditionError);
}

TEST(ClippedSurrogate, NeverExceedsUnclippedTerm) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 10000; ++i) {
    const double lpn = u(rng), lpo = u(rng), a = u(rng);
    EXPECT_LE(clipped_surrogate(lpn, lpo, a, 0.2), std::exp(lpn - lpo) * a + 1e-15);
  }
}

TEST(KlEstimate, Examples) {
  EXPECT_EQ(kl_estimate(-2.0, -2.0), 0.0);
  EXPECT_NEAR(kl_estimate(0.0, 1.0), std::exp(1.0) - 2.0, 1e-12);
  EXPECT_NEAR(kl_estimate(0.0, -1.0), std::exp(-1.0), 1e-12);
  EXPECT_THROW(kl_estimate(0.0, 1000.0), PreconditionError);
}

TEST(KlEstimate, NonNegativeAndZeroOnlyAtEquality) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = u(rng), b = u(rng);
    EXPECT_GE(kl_estimate(a, b), 0.0);
    if (std::abs(a - b) > 1e-6) EXPECT_GT(kl_estimate(a, b), 0.0);
  }
}

TEST(GrpoStep, ZeroAdvantageWithoutKlIsIdentity) {
  Rng rng(54);
  const auto p = init_params(3, 0.5, rng);
  auto g = two_frame_group(p, {0.3, 0.3, 0.3, 0.3});
  GrpoConfig cfg;
  cfg.beta = 0.0;
  EXPECT_EQ(grpo_step(p, g, cfg).params, p);
}

TEST(GrpoStep, RewardedFeatureWeightIncreases) {
  PolicyParams p(1);
  const auto g = two_frame_group(p, {0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0});
  const auto out = grpo_step(p, g, GrpoConfig{});
  EXPECT_GT(out.params.w_select[0], p.w_select[0]);
  EXPECT_GT(out.diagnostics.grad_norm, 0.0);
  EXPECT_DOUBLE_EQ(out.diagnostics.mean_reward, 0.5);
}

TEST(GrpoStep, LargeBetaAnchorsToReference) {
  Rng rng(55);
  const auto ref = init_params(2, 0.3, rng);
  const auto g = two_frame_group(ref, {0.0, 1.0, 0.0, 1.0});
  auto change = [&](double beta, int epochs) {
    GrpoConfig cfg;
    cfg.beta = beta;
    cfg.epochs_per_group = epochs;
    cfg.learning_rate = 1e-3;
    const auto a = grpo_step(ref, g, cfg).params.flat(), b = ref.flat();
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  };
  // the KL gradient vanishes at logp_new = logp_ref, so the first pass matches
  EXPECT_EQ(change(1e3, 1), change(0.0, 1));
  // once the policy has moved, a heavy KL weight pulls it back
  EXPECT_LT(change(1e3, 4), change(0.0, 4));
}

TEST(GrpoStep, UpdateIsLearningRateTimesObjectiveGradient) {
  Rng rng(56);
  for (int trial = 0; trial < 10; ++trial) {
    const auto ref = init_params(3, 0.5, rng);
    auto cur = ref;
    auto flat = cur.flat();
    for (auto& x : flat) x += 0.05 * (uniform01(rng) - 0.5);
    cur.assign_flat(flat);
    RolloutGroup g;
    g.observations.resize(5);
    for (int t = 0; t < 5; ++t) g.observations[t].presence_score = uniform01(rng);
    for (int i = 0; i < 8; ++i) {
      Rollout r;
      r.action = sample_action(cur, g.observations, rng);
      r.logp_old = r.action.logprob + 0.05 * (uniform01(rng) - 0.5);
      r.logp_ref = logprob(ref, g.observations, r.action);
      r.reward.r_total = uniform01(rng);
      g.rollouts.push_back(r);
    }
    GrpoConfig cfg;
    cfg.learning_rate = 1.0;
    const auto step = grpo_step(cur, g, cfg).params.flat();
    const double h = 1e-6;
    for (std::size_t k = 0; k < flat.size(); ++k) {
      auto tp = flat, tm = flat;
      tp[k] += h;
      tm[k] -= h;
      PolicyParams pp = cur, pm = cur;
      pp.assign_flat(tp);
      pm.assign_flat(tm);
      const double fd = (objective(pp, g, cfg) - objective(pm, g, cfg)) / (2 * h);
      EXPECT_NEAR(step[k] - flat[k], fd, 1e-6) << cur.param_name(k);
    }
  }
}

TEST(GrpoStep, RejectsBadInputs) {
  PolicyParams p(1);
  auto g = two_frame_group(p, {0.0, 1.0});
  GrpoConfig cfg;
  cfg.clip_eps = 0.0;
  EXPECT_THROW(grpo_step(p, g, cfg), PreconditionError);
  g.rollouts.pop_back();
  EXPECT_THROW(grpo_step(p, g, GrpoConfig{}), PreconditionError);
  auto nan_group = two_frame_group(p, {0.0, std::nan("")});
  EXPECT_THROW(grpo_step(p, nan_group, GrpoConfig{}), PreconditionError);
}
