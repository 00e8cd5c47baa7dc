#pragma once

// Hand-placed keyframes used as an upper-bound policy in tests.

#include <algorithm>
#include <vector>

#include "kfr/env.hpp"

namespace kfr::oracle {

/// `k` distinct frames spread over the target's visibility segments: every
/// segment gets one, longer segments take the rest, and each segment's anchors
/// sit at the centres of equal sub-blocks.
inline std::vector<int> spread_anchors(const Episode& e, int k) {
  const auto& segs = e.target_object().visibility;
  std::vector<int> per(segs.size(), segs.empty() ? 0 : 1);
  int left = k - static_cast<int>(segs.size());
  while (left > 0) {
    // the segment with the most frames per anchor takes the next one
    std::size_t best = 0;
    for (std::size_t i = 1; i < segs.size(); ++i) {
      if (segs[i].length() * per[best] > segs[best].length() * per[i]) best = i;
    }
    if (per[best] >= segs[best].length()) break;
    ++per[best];
    --left;
  }
  std::vector<int> frames;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (int j = 0; j < per[i]; ++j) {
      frames.push_back(segs[i].begin + ((2 * j + 1) * segs[i].length()) / (2 * per[i]));
    }
  }
  std::sort(frames.begin(), frames.end());
  return frames;
}

inline KeyframeAction spread_action(const Episode& e, int k) {
  KeyframeAction a;
  a.selected = spread_anchors(e, k);
  a.instructions.assign(a.selected.size(), LocalInstruction::all());
  return a;
}

}  // namespace kfr::oracle
