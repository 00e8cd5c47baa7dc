#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kfr/config.hpp"
#include "kfr/env.hpp"
#include "kfr/grpo.hpp"
#include "kfr/policy.hpp"
#include "kfr/protocol.hpp"

namespace kfr {

/// Text response for an action on `clip`: one zero-length span per keyframe,
/// described by the instruction's attribute words.
std::string render_response(const Episode& clip, const KeyframeAction& action);

struct DecodedResponse {
  std::vector<int> frames;
  std::vector<LocalInstruction> instructions;
};

/// Parses a response against `clip`. Throws ParseError for protocol defects;
/// returns nullopt when a description names no known attribute.
std::optional<DecodedResponse> decode_response(const Episode& clip, std::string_view text);

struct LogRecord {
  int iteration = 0;
  int clip_frames = 0;
  double mean_reward = 0.0;
  double r_k = 0.0;
  double r_a = 0.0;
  double r_g = 0.0;
  double mean_kl = 0.0;
  double grad_norm = 0.0;
  int parse_failures = 0;
  std::optional<double> heldout_jf;
};

std::string to_json_line(const LogRecord& r);

/// Resampled training clip of `full` in which the target is visible at least once.
Episode training_clip(const Episode& full, const EnvConfig& env, Rng& rng);

PolicyParams initial_params(const RunConfig& cfg, std::uint64_t seed);

/// Samples and scores one group on `clip` (seeded by seed/iteration/index).
RolloutGroup collect_group(const PolicyParams& params, const PolicyParams& reference,
                           const Episode& clip, const RunConfig& cfg, std::uint64_t seed,
                           int iteration);

struct TrainingResult {
  PolicyParams initial;
  PolicyParams final_params;
  std::vector<LogRecord> log;
};

using LogSink = std::function<void(const LogRecord&)>;

/// Deterministic in (cfg, seed). The reference policy is the frozen initial one.
TrainingResult run_training(const RunConfig& cfg, std::uint64_t seed, const LogSink& sink = {});
TrainingResult run_training(const RunConfig& cfg, const PolicyParams& init, std::uint64_t seed,
                            const LogSink& sink = {});

}  // namespace kfr
