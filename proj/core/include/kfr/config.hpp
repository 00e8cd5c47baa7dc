#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "kfr/env.hpp"
#include "kfr/grpo.hpp"
#include "kfr/metrics.hpp"
#include "kfr/rewards.hpp"

namespace kfr {

struct TrainSection {
  GrpoConfig step;
  int iterations = 300;
  int eval_every = 0;  // 0 = only the final held-out evaluation
  double corrupt_response_prob = 0.0;
};

struct PolicySection {
  int k_max = 8;
  double init_scale = 0.1;
};

struct EvalSection {
  int corpus_size = 200;
  std::uint64_t seed = 20240601;
  int f_tolerance = 1;
  int threads = 1;
};

struct IoSection {
  std::string out_dir = "runs";
};

/// Everything a command needs. Sections: env, rewards, grpo, policy, eval, io.
struct RunConfig {
  EnvConfig env;
  RewardWeights rewards;
  TrainSection grpo;
  PolicySection policy;
  EvalSection eval;
  IoSection io;

  /// Throws ConfigError naming the offending key.
  void validate() const;

  PipelineConfig pipeline() const;
  EvalConfig eval_config() const;
};

/// Parses a JSON config; absent keys keep defaults, unknown keys are rejected.
RunConfig config_from_text(std::string_view text);
RunConfig load_config(const std::string& path);
std::string config_to_text(const RunConfig& cfg);

/// Applies "section.key=value"; value is JSON (bare words are taken as strings).
void apply_override(RunConfig& cfg, std::string_view assignment);

}  // namespace kfr
