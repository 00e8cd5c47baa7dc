#include "kfr/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kfr/error.hpp"

namespace kfr {

void GrpoConfig::validate() const {
  require(group_size >= 2, "grpo: group_size must be at least 2");
  require(std::isfinite(beta) && beta >= 0.0, "grpo: beta must be non-negative");
  require(clip_eps > 0.0 && clip_eps < 1.0, "grpo: clip_eps must lie in (0, 1)");
  require(std::isfinite(learning_rate) && learning_rate > 0.0, "grpo: learning_rate must be positive");
  require(epochs_per_group >= 1, "grpo: epochs_per_group must be at least 1");
  require(std::isfinite(advantage_epsilon) && advantage_epsilon >= 0.0,
          "grpo: advantage_epsilon must be non-negative");
}

void RolloutGroup::validate() const {
  require(rollouts.size() >= 2, "grpo: a group needs at least two rollouts");
  for (const auto& r : rollouts) {
    require(std::isfinite(r.logp_old) && std::isfinite(r.logp_ref),
            "grpo: rollout log-probabilities must be finite");
    require(std::isfinite(r.reward.r_total), "grpo: rollout reward must be finite");
  }
}

std::vector<double> group_advantages(std::span<const double> rewards, double advantage_epsilon) {
  require(rewards.size() >= 2, "group_advantages: need at least two rewards");
  for (double r : rewards) require(std::isfinite(r), "group_advantages: non-finite reward");
  const double n = static_cast<double>(rewards.size());
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / n);
  std::vector<double> adv(rewards.size(), 0.0);
  if (!(sd >= advantage_epsilon) || sd == 0.0) return adv;
  for (std::size_t i = 0; i < rewards.size(); ++i) adv[i] = (rewards[i] - mean) / sd;
  return adv;
}

double clipped_surrogate(double logp_new, double logp_old, double advantage, double clip_eps) {
  const double ratio = std::exp(logp_new - logp_old);
  require(std::isfinite(ratio) && std::isfinite(advantage), "clipped_surrogate: non-finite ratio");
  const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  return std::min(ratio * advantage, clipped * advantage);
}

double kl_estimate(double logp_new, double logp_ref) {
  const double d = logp_ref - logp_new;
  const double e = std::exp(d);
  require(std::isfinite(e), "kl_estimate: exp overflow");
  // expm1 keeps the small-d case non-negative in floating point
  return std::max(0.0, std::expm1(d) - d);
}

StepResult grpo_step(const PolicyParams& params, const RolloutGroup& group, const GrpoConfig& cfg) {
  cfg.validate();
  group.validate();
  params.validate_shape();

  std::vector<double> rewards;
  for (const auto& r : group.rollouts) rewards.push_back(r.reward.r_total);
  const auto adv = group_advantages(rewards, cfg.advantage_epsilon);
  const double n = static_cast<double>(group.rollouts.size());

  StepResult out{params, {}};
  out.diagnostics.mean_reward = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  for (double a : adv) out.diagnostics.mean_abs_advantage += std::abs(a) / n;

  for (int epoch = 0; epoch < cfg.epochs_per_group; ++epoch) {
    std::vector<double> grad(params.size(), 0.0);
    double kl_sum = 0.0;
    for (std::size_t i = 0; i < group.rollouts.size(); ++i) {
      const auto& ro = group.rollouts[i];
      const double lp = logprob(out.params, group.observations, ro.action);
      const double ratio = std::exp(lp - ro.logp_old);
      require(std::isfinite(ratio), "grpo_step: non-finite importance ratio");
      const double clipped = std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
      // d/dlp of the surrogate is A * rho on the unclipped branch, 0 otherwise
      double coef = ratio * adv[i] <= clipped * adv[i] ? adv[i] * ratio : 0.0;
      const double d = ro.logp_ref - lp;
      kl_sum += kl_estimate(lp, ro.logp_ref);
      coef += cfg.beta * std::expm1(d);
      if (coef == 0.0) continue;
      const auto g = grad_logprob(out.params, group.observations, ro.action).flat();
      for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += coef * g[k] / n;
    }
    for (std::size_t k = 0; k < grad.size(); ++k) {
      if (!std::isfinite(grad[k])) {
        throw PreconditionError("grpo_step: non-finite gradient in " + params.param_name(k));
      }
    }
    if (epoch == 0) {
      out.diagnostics.mean_kl = kl_sum / n;
      out.diagnostics.grad_norm = std::sqrt(std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0));
    }
    auto flat = out.params.flat();
    for (std::size_t k = 0; k < flat.size(); ++k) flat[k] += cfg.learning_rate * grad[k];
    out.params.assign_flat(flat);
  }
  return out;
}

}  // namespace kfr
