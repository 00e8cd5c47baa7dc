#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kfr/env.hpp"
#include "kfr/geometry.hpp"
#include "kfr/policy.hpp"
#include "kfr/rewards.hpp"

namespace kfr {

/// Region similarity: mean per-frame mask IoU.
double j_score(const MaskSequence& pred, const MaskSequence& gt);

/// Boundary F-measure of one frame. Boundaries match within a Chebyshev
/// distance of `tolerance_px`. Both empty scores 1, one empty scores 0.
double f_measure(const BinaryMask& pred, const BinaryMask& gt, int tolerance_px);

/// Mean of f_measure over frames.
double f_score(const MaskSequence& pred, const MaskSequence& gt, int tolerance_px);

struct EpisodeRecord {
  std::uint64_t seed = 0;
  double j = 0.0;
  double f = 0.0;
  double jf = 0.0;
  RewardBreakdown reward;
  std::vector<int> keyframes;  // indices into the full episode
  int target_segments = 0;
  int segments_covered = 0;  // target visibility segments holding a keyframe
};

struct EvalReport {
  double j_mean = 0.0;
  double f_mean = 0.0;
  double jf_mean = 0.0;
  std::vector<EpisodeRecord> episodes;
};

/// Picks keyframes on `clip`, the inference-time resampling of `full`.
using ActionProvider = std::function<KeyframeAction(const Episode& clip, const Episode& full)>;

struct EvalConfig {
  EnvConfig env;
  PipelineConfig pipeline;
  int f_tolerance = 1;
  std::uint64_t seed = 0;  // grounding jitter stream
  int threads = 1;
};

/// Policy chooses on the resampled clip; grounding, propagation and J/F run on
/// the full episode.
EvalReport evaluate(const ActionProvider& provider, std::span<const std::uint64_t> episode_seeds,
                    const EvalConfig& cfg);

/// Greedy decode of `params`.
EvalReport evaluate(const PolicyParams& params, std::span<const std::uint64_t> episode_seeds,
                    const EvalConfig& cfg);

/// Number of target visibility segments of `e` containing at least one frame.
int segments_covered(const Episode& e, std::span<const int> frames);

/// Seeds of a held-out corpus.
std::vector<std::uint64_t> corpus_seeds(std::uint64_t seed, int count);

}  // namespace kfr
