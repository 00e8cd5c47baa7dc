#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kfr/geometry.hpp"

namespace kfr {

struct RewardWeights {
  // keyframe-quality mix: diversity, count, saliency
  double lambda_diversity = 1.0 / 3.0;
  double lambda_count = 1.0 / 3.0;
  double lambda_saliency = 1.0 / 3.0;
  // total mix: keyframe quality, alignment, global consistency
  double alpha_k = 1.0 / 3.0;
  double alpha_a = 1.0 / 3.0;
  double alpha_g = 1.0 / 3.0;
  double overlap_punish = -0.2;
  double dist_reward = 0.25;
  int k0 = 4;

  void validate() const;
};

struct RewardBreakdown {
  double r_diversity = 0.0;
  double r_num = 0.0;
  double r_saliency = 0.0;
  double r_k = 0.0;
  double r_a = 0.0;
  double r_g = 0.0;
  double r_total = 0.0;
};

/// overlap_punish * |I| + dist_reward * |D| over the sorted selection, where
/// |I| counts consecutive equal indices and |D| = M - |I|.
double diversity_reward(std::span<const int> selected_frames, double overlap_punish,
                        double dist_reward);

/// Triangular count reward max(0, 1 - |K - k0| / k0).
double frame_count_reward(int k, int k0);

/// Mean over the selection of area(frame) / max_t area(t).
double saliency_reward(std::span<const int> selected_frames,
                       std::span<const std::int64_t> gt_areas);

/// Fills r_diversity, r_num, r_saliency and r_k.
RewardBreakdown keyframe_quality_reward(std::span<const int> selected_frames,
                                        std::span<const std::int64_t> gt_areas,
                                        const RewardWeights& w);

/// Mean per-frame mask IoU.
double global_consistency_reward(const MaskSequence& pred, const MaskSequence& gt);

/// Takes the keyframe-quality fields from `keyframe` as they are, stores r_a
/// and r_g, and fills r_total.
RewardBreakdown total_reward(const RewardBreakdown& keyframe, double r_a, double r_g,
                             const RewardWeights& w);

}  // namespace kfr
