#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kfr/rng.hpp"

namespace kfr {

/// What the low-resolution pass sees of one frame.
struct FrameObservation {
  double presence_score = 0.0;  // noisy evidence the queried object is visible
  double time_position = 0.0;   // t / T
  double sound_active = 0.0;    // queried object emits sound
  double post_gap = 0.0;        // first frames after a visibility gap
  double crowding = 0.0;        // visible distractors, normalized

  friend bool operator==(const FrameObservation&, const FrameObservation&) = default;
};

inline constexpr int kFeatureDim = 6;  // five observations plus bias
inline constexpr std::array<std::string_view, kFeatureDim> kFeatureNames = {
    "presence_score", "time_position", "sound_active", "post_gap", "crowding", "bias"};

using FeatureVector = std::array<double, kFeatureDim>;
FeatureVector features(const FrameObservation& o);

enum class AttributeKind : int { color = 0, shape = 1, size = 2, position = 3 };
inline constexpr int kNumAttributeKinds = 4;
inline constexpr int kNumInstructionSubsets = (1 << kNumAttributeKinds) - 1;
inline constexpr std::array<std::string_view, kNumAttributeKinds> kAttributeKindNames = {
    "color", "shape", "size", "position"};

/// Which of the target's attributes a local instruction spells out.
struct LocalInstruction {
  std::uint8_t kinds = 0;  // bitmask over AttributeKind, never zero

  bool has(AttributeKind k) const { return (kinds >> static_cast<int>(k)) & 1U; }
  int subset_index() const { return static_cast<int>(kinds) - 1; }
  static LocalInstruction from_subset_index(int i) {
    return LocalInstruction{static_cast<std::uint8_t>(i + 1)};
  }
  static LocalInstruction all() { return LocalInstruction{kNumInstructionSubsets}; }

  friend bool operator==(const LocalInstruction&, const LocalInstruction&) = default;
};

struct KeyframeAction {
  std::vector<int> selected;  // ordered, distinct
  std::vector<LocalInstruction> instructions;
  double logprob = 0.0;

  int k() const { return static_cast<int>(selected.size()); }
};

/// Learnable parameters of the keyframe policy.
struct PolicyParams {
  std::vector<double> w_select;  // [kFeatureDim]
  std::vector<double> w_count;   // [k_max], logit for K = i + 1
  std::vector<double> u_instr;   // [kNumInstructionSubsets][kFeatureDim]

  PolicyParams() = default;
  explicit PolicyParams(int k_max);

  int k_max() const { return static_cast<int>(w_count.size()); }
  std::size_t size() const { return w_select.size() + w_count.size() + u_instr.size(); }

  double& u(int subset, int feature) {
    return u_instr[static_cast<std::size_t>(subset * kFeatureDim + feature)];
  }
  double u(int subset, int feature) const {
    return u_instr[static_cast<std::size_t>(subset * kFeatureDim + feature)];
  }

  /// Flat view in the order w_select, w_count, u_instr.
  std::vector<double> flat() const;
  void assign_flat(std::span<const double> values);
  std::string param_name(std::size_t flat_index) const;

  /// Throws PreconditionError when shapes are inconsistent.
  void validate_shape() const;

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

/// Small Gaussian initialization (std `scale`).
PolicyParams init_params(int k_max, double scale, Rng& rng);

/// Samples K, then K frames by sequential softmax without replacement, then
/// one instruction subset per selected frame. logprob is filled.
KeyframeAction sample_action(const PolicyParams& params,
                             std::span<const FrameObservation> observations, Rng& rng);

/// Argmax at every stage; ties resolve to the lowest index.
KeyframeAction greedy_action(const PolicyParams& params,
                             std::span<const FrameObservation> observations);

double logprob(const PolicyParams& params, std::span<const FrameObservation> observations,
               const KeyframeAction& action);

/// d logprob / d params, shaped like PolicyParams.
PolicyParams grad_logprob(const PolicyParams& params,
                          std::span<const FrameObservation> observations,
                          const KeyframeAction& action);

/// Scores w_select . phi(t) for every frame.
std::vector<double> frame_scores(const PolicyParams& params,
                                 std::span<const FrameObservation> observations);

}  // namespace kfr
