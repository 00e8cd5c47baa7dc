#pragma once

// Slow reference computations. The audit command, the tests and the
// acceptance binary check the library against these.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "kfr/geometry.hpp"
#include "kfr/matching.hpp"
#include "kfr/policy.hpp"

namespace kfr::oracle {

/// Minimum total cost over every injective matching of the smaller side.
inline double brute_force_assignment(const CostMatrix& c) {
  const bool flip = c.rows() > c.cols();
  const CostMatrix m = flip ? c.transposed() : c;
  std::vector<int> cols(static_cast<std::size_t>(m.cols()));
  std::iota(cols.begin(), cols.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  // the first rows() entries of each column permutation form a matching
  do {
    double total = 0.0;
    for (int r = 0; r < m.rows(); ++r) total += m(r, cols[static_cast<std::size_t>(r)]);
    best = std::min(best, total);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

/// Two-term diversity score; an element repeating any earlier one is an overlap.
inline double diversity_by_definition(const std::vector<int>& sel, double overlap_punish, double dist_reward) {
  int overlaps = 0;
  for (std::size_t i = 0; i < sel.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (sel[j] == sel[i]) {
        ++overlaps;
        break;
      }
    }
  }
  const int distinct = static_cast<int>(sel.size()) - overlaps;
  return overlap_punish * overlaps + dist_reward * distinct;
}

/// (overlap_punish - dist_reward) * |I| + dist_reward * M. Equal to the
/// two-term form in exact arithmetic; may differ in the last bit.
inline double diversity_closed_form(const std::vector<int>& sel, double overlap_punish, double dist_reward) {
  int overlaps = 0;
  for (std::size_t i = 0; i < sel.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (sel[j] == sel[i]) {
        ++overlaps;
        break;
      }
    }
  }
  return (overlap_punish - dist_reward) * overlaps + dist_reward * static_cast<double>(sel.size());
}

inline double saliency_direct(std::span<const int> sel, std::span<const std::int64_t> areas) {
  const double peak = static_cast<double>(*std::max_element(areas.begin(), areas.end()));
  double sum = 0.0;
  for (int f : sel) sum += static_cast<double>(areas[static_cast<std::size_t>(f)]) / peak;
  return sum / static_cast<double>(sel.size());
}

inline double mean_mask_iou_direct(const MaskSequence& pred, const MaskSequence& gt) {
  double sum = 0.0;
  for (std::size_t t = 0; t < gt.size(); ++t) {
    std::int64_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < gt[t].bits().size(); ++i) {
      inter += pred[t].bits()[i] & gt[t].bits()[i];
      uni += pred[t].bits()[i] | gt[t].bits()[i];
    }
    sum += uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  }
  return sum / static_cast<double>(gt.size());
}

/// Every action the policy can emit on a clip of `frames` frames.
template <class F>
void for_each_action(int frames, int k_max, F&& fn) {
  const int k_top = std::min(frames, k_max);
  for (int k = 1; k <= k_top; ++k) {
    std::vector<int> digits(static_cast<std::size_t>(k), 0);
    std::vector<int> ins(static_cast<std::size_t>(k), 0);
    while (true) {
      bool distinct = true;
      for (int i = 0; i < k && distinct; ++i)
        for (int j = 0; j < i; ++j) distinct = distinct && digits[i] != digits[j];
      if (distinct) {
        std::fill(ins.begin(), ins.end(), 0);
        while (true) {
          KeyframeAction a;
          a.selected = digits;
          for (int s : ins) a.instructions.push_back(LocalInstruction::from_subset_index(s));
          fn(a);
          int p = 0;
          while (p < k && ++ins[static_cast<std::size_t>(p)] == kNumInstructionSubsets) ins[static_cast<std::size_t>(p++)] = 0;
          if (p == k) break;
        }
      }
      int p = 0;
      while (p < k && ++digits[static_cast<std::size_t>(p)] == frames) digits[static_cast<std::size_t>(p++)] = 0;
      if (p == k) break;
    }
  }
}

/// Sum of exp(logprob) over every action.
inline double total_probability(const PolicyParams& params, std::span<const FrameObservation> obs) {
  double total = 0.0;
  for_each_action(static_cast<int>(obs.size()), params.k_max(),
                  [&](const KeyframeAction& a) { total += std::exp(logprob(params, obs, a)); });
  return total;
}

/// Central differences of logprob in every parameter.
inline std::vector<double> fd_gradient(const PolicyParams& params, std::span<const FrameObservation> obs,
                                       const KeyframeAction& action, double h) {
  const auto theta = params.flat();
  std::vector<double> g(theta.size());
  PolicyParams probe = params;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    auto t = theta;
    t[k] = theta[k] + h;
    probe.assign_flat(t);
    const double up = logprob(probe, obs, action);
    t[k] = theta[k] - h;
    probe.assign_flat(t);
    g[k] = (up - logprob(probe, obs, action)) / (2 * h);
  }
  return g;
}

/// Largest |a - b| / max(1, |b|).
inline double max_relative_error(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
  return worst;
}

}  // namespace kfr::oracle
