#include "kfr/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "kfr/error.hpp"

namespace kfr {

void RewardWeights::validate() const {
  auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  require(nonneg(lambda_diversity) && nonneg(lambda_count) && nonneg(lambda_saliency),
          "reward lambdas must be finite and non-negative");
  require(lambda_diversity + lambda_count + lambda_saliency > 0.0,
          "reward lambdas must not all be zero");
  require(nonneg(alpha_k) && nonneg(alpha_a) && nonneg(alpha_g),
          "reward alphas must be finite and non-negative");
  require(alpha_k + alpha_a + alpha_g > 0.0, "reward alphas must not all be zero");
  require(std::isfinite(overlap_punish), "overlap_punish must be finite");
  require(nonneg(dist_reward), "dist_reward must be non-negative");
  require(k0 >= 1, "k0 must be at least 1");
}

double diversity_reward(std::span<const int> selected_frames, double overlap_punish,
                        double dist_reward) {
  require(!selected_frames.empty(), "diversity_reward: empty selection");
  std::vector<int> sorted(selected_frames.begin(), selected_frames.end());
  std::sort(sorted.begin(), sorted.end());
  int overlaps = 0;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i] == sorted[i + 1]) ++overlaps;
  }
  const int distinct = static_cast<int>(sorted.size()) - overlaps;
  return overlap_punish * overlaps + dist_reward * distinct;
}

double frame_count_reward(int k, int k0) {
  require(k >= 1 && k0 >= 1, "frame_count_reward: K and k0 must be at least 1");
  const double dev = std::abs(k - k0) / static_cast<double>(k0);
  return std::max(0.0, 1.0 - dev);
}

double saliency_reward(std::span<const int> selected_frames,
                       std::span<const std::int64_t> gt_areas) {
  require(!selected_frames.empty(), "saliency_reward: empty selection");
  require(!gt_areas.empty(), "saliency_reward: no GT areas");
  const auto peak = *std::max_element(gt_areas.begin(), gt_areas.end());
  require(peak > 0, "saliency_reward: target never visible");
  double sum = 0.0;
  for (int f : selected_frames) {
    require(f >= 0 && static_cast<std::size_t>(f) < gt_areas.size(),
            "saliency_reward: frame index out of range");
    sum += static_cast<double>(gt_areas[static_cast<std::size_t>(f)]) / static_cast<double>(peak);
  }
  return sum / static_cast<double>(selected_frames.size());
}

RewardBreakdown keyframe_quality_reward(std::span<const int> selected_frames,
                                        std::span<const std::int64_t> gt_areas,
                                        const RewardWeights& w) {
  w.validate();
  RewardBreakdown b;
  b.r_diversity = diversity_reward(selected_frames, w.overlap_punish, w.dist_reward);
  b.r_num = frame_count_reward(static_cast<int>(selected_frames.size()), w.k0);
  b.r_saliency = saliency_reward(selected_frames, gt_areas);
  b.r_k = w.lambda_diversity * b.r_diversity + w.lambda_count * b.r_num +
          w.lambda_saliency * b.r_saliency;
  return b;
}

double global_consistency_reward(const MaskSequence& pred, const MaskSequence& gt) {
  require(pred.size() == gt.size(), "global_consistency_reward: length mismatch");
  validate_sequence(pred);
  validate_sequence(gt);
  double sum = 0.0;
  for (std::size_t t = 0; t < gt.size(); ++t) sum += mask_iou(pred[t], gt[t]);
  return sum / static_cast<double>(gt.size());
}

RewardBreakdown total_reward(const RewardBreakdown& keyframe, double r_a, double r_g,
                             const RewardWeights& w) {
  w.validate();
  RewardBreakdown parts = keyframe;
  parts.r_a = r_a;
  parts.r_g = r_g;
  parts.r_total = w.alpha_k * parts.r_k + w.alpha_a * parts.r_a + w.alpha_g * parts.r_g;
  return parts;
}

}  // namespace kfr
