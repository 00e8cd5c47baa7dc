#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kfr/policy.hpp"
#include "kfr/rewards.hpp"

namespace kfr {

struct GrpoConfig {
  int group_size = 8;
  double beta = 0.04;  // KL weight against the frozen reference policy
  double clip_eps = 0.2;
  double learning_rate = 0.05;
  int epochs_per_group = 1;
  double advantage_epsilon = 1e-8;

  void validate() const;
};

struct Rollout {
  KeyframeAction action;
  double logp_old = 0.0;
  double logp_ref = 0.0;
  RewardBreakdown reward;
  bool parse_failed = false;
};

/// N rollouts sampled on one shared episode.
struct RolloutGroup {
  std::uint64_t episode_seed = 0;
  std::vector<FrameObservation> observations;
  std::vector<Rollout> rollouts;

  void validate() const;
};

struct StepDiagnostics {
  double mean_reward = 0.0;
  double mean_abs_advantage = 0.0;
  double mean_kl = 0.0;
  double grad_norm = 0.0;
};

struct StepResult {
  PolicyParams params;
  StepDiagnostics diagnostics;
};

/// (r - mean) / std with the population std; all zeros when std < epsilon.
std::vector<double> group_advantages(std::span<const double> rewards, double advantage_epsilon);

/// min(rho * A, clip(rho, 1 - eps, 1 + eps) * A) with rho = exp(new - old).
double clipped_surrogate(double logp_new, double logp_old, double advantage, double clip_eps);

/// exp(d) - d - 1 with d = logp_ref - logp_new.
double kl_estimate(double logp_new, double logp_ref);

/// Gradient ascent on mean(clipped_surrogate - beta * kl) over the group.
StepResult grpo_step(const PolicyParams& params, const RolloutGroup& group, const GrpoConfig& cfg);

}  // namespace kfr
