#include "kfr/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kfr/error.hpp"

namespace kfr {

namespace {

double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

std::vector<double> softmax(std::span<const double> v) {
  const double lse = log_sum_exp(v);
  std::vector<double> p(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) p[i] = std::exp(v[i] - lse);
  return p;
}

int sample_categorical(std::span<const double> probs, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  // rounding left u above the final cumulative sum
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return static_cast<int>(i);
  }
  return 0;
}

int argmax(std::span<const double> v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

int count_support(const PolicyParams& params, std::size_t frames) {
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(params.k_max()), frames));
}

std::vector<double> count_logits(const PolicyParams& params, std::size_t frames) {
  const int n = count_support(params, frames);
  return {params.w_count.begin(), params.w_count.begin() + n};
}

std::vector<double> instr_logits(const PolicyParams& params, const FeatureVector& phi) {
  std::vector<double> z(kNumInstructionSubsets, 0.0);
  for (int s = 0; s < kNumInstructionSubsets; ++s) {
    for (int f = 0; f < kFeatureDim; ++f) z[static_cast<std::size_t>(s)] += params.u(s, f) * phi[static_cast<std::size_t>(f)];
  }
  return z;
}

void check_observations(std::span<const FrameObservation> observations) {
  require(!observations.empty(), "policy: episode has no frames");
}

void check_feasible(const PolicyParams& params, std::span<const FrameObservation> observations,
                    const KeyframeAction& action) {
  check_observations(observations);
  const int t = static_cast<int>(observations.size());
  require(action.k() >= 1 && action.k() <= count_support(params, observations.size()),
          "policy: action size outside the count support");
  require(action.instructions.size() == action.selected.size(),
          "policy: one instruction per selected frame required");
  std::vector<char> seen(static_cast<std::size_t>(t), 0);
  for (int f : action.selected) {
    require(f >= 0 && f < t, "policy: selected frame out of range");
    require(!seen[static_cast<std::size_t>(f)], "policy: selected frames must be distinct");
    seen[static_cast<std::size_t>(f)] = 1;
  }
  for (const auto& ins : action.instructions) {
    require(ins.kinds >= 1 && ins.kinds <= kNumInstructionSubsets,
            "policy: instruction subset out of range");
  }
}

}  // namespace

FeatureVector features(const FrameObservation& o) {
  return {o.presence_score, o.time_position, o.sound_active, o.post_gap, o.crowding, 1.0};
}

PolicyParams::PolicyParams(int k_max)
    : w_select(kFeatureDim, 0.0),
      w_count(static_cast<std::size_t>(k_max), 0.0),
      u_instr(static_cast<std::size_t>(kNumInstructionSubsets * kFeatureDim), 0.0) {
  require(k_max >= 1, "policy: k_max must be at least 1");
}

std::vector<double> PolicyParams::flat() const {
  std::vector<double> out;
  out.reserve(size());
  out.insert(out.end(), w_select.begin(), w_select.end());
  out.insert(out.end(), w_count.begin(), w_count.end());
  out.insert(out.end(), u_instr.begin(), u_instr.end());
  return out;
}

void PolicyParams::assign_flat(std::span<const double> values) {
  require(values.size() == size(), "policy: flat parameter size mismatch");
  auto it = values.begin();
  std::copy_n(it, w_select.size(), w_select.begin());
  it += static_cast<std::ptrdiff_t>(w_select.size());
  std::copy_n(it, w_count.size(), w_count.begin());
  it += static_cast<std::ptrdiff_t>(w_count.size());
  std::copy_n(it, u_instr.size(), u_instr.begin());
}

std::string PolicyParams::param_name(std::size_t i) const {
  if (i < w_select.size()) return "w_select[" + std::string(kFeatureNames[i]) + "]";
  i -= w_select.size();
  if (i < w_count.size()) return "w_count[K=" + std::to_string(i + 1) + "]";
  i -= w_count.size();
  const auto subset = i / kFeatureDim;
  const auto feature = i % kFeatureDim;
  return "u_instr[" + std::to_string(subset) + "][" + std::string(kFeatureNames[feature]) + "]";
}

void PolicyParams::validate_shape() const {
  require(w_select.size() == kFeatureDim, "policy: w_select has the wrong length");
  require(!w_count.empty(), "policy: w_count is empty");
  require(u_instr.size() == static_cast<std::size_t>(kNumInstructionSubsets * kFeatureDim),
          "policy: u_instr has the wrong shape");
}

PolicyParams init_params(int k_max, double scale, Rng& rng) {
  require(std::isfinite(scale) && scale >= 0.0, "policy: init scale must be non-negative");
  PolicyParams p(k_max);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto* v : {&p.w_select, &p.w_count, &p.u_instr}) {
    for (auto& x : *v) x = scale * normal(rng);
  }
  return p;
}

std::vector<double> frame_scores(const PolicyParams& params,
                                 std::span<const FrameObservation> observations) {
  std::vector<double> s(observations.size(), 0.0);
  for (std::size_t t = 0; t < observations.size(); ++t) {
    const auto phi = features(observations[t]);
    for (int f = 0; f < kFeatureDim; ++f) s[t] += params.w_select[static_cast<std::size_t>(f)] * phi[static_cast<std::size_t>(f)];
  }
  return s;
}

KeyframeAction sample_action(const PolicyParams& params,
                             std::span<const FrameObservation> observations, Rng& rng) {
  check_observations(observations);
  KeyframeAction a;
  const auto pk = softmax(count_logits(params, observations.size()));
  const int k = sample_categorical(pk, rng) + 1;

  const auto scores = frame_scores(params, observations);
  std::vector<int> remaining(observations.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = static_cast<int>(i);
  for (int step = 0; step < k; ++step) {
    std::vector<double> z;
    z.reserve(remaining.size());
    for (int f : remaining) z.push_back(scores[static_cast<std::size_t>(f)]);
    const int pick = sample_categorical(softmax(z), rng);
    a.selected.push_back(remaining[static_cast<std::size_t>(pick)]);
    remaining.erase(remaining.begin() + pick);
  }
  for (int f : a.selected) {
    const auto q = softmax(instr_logits(params, features(observations[static_cast<std::size_t>(f)])));
    a.instructions.push_back(LocalInstruction::from_subset_index(sample_categorical(q, rng)));
  }
  a.logprob = logprob(params, observations, a);
  return a;
}

KeyframeAction greedy_action(const PolicyParams& params,
                             std::span<const FrameObservation> observations) {
  check_observations(observations);
  KeyframeAction a;
  const int k = argmax(count_logits(params, observations.size())) + 1;
  const auto scores = frame_scores(params, observations);
  std::vector<int> order(observations.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return scores[static_cast<std::size_t>(x)] > scores[static_cast<std::size_t>(y)];
  });
  a.selected.assign(order.begin(), order.begin() + k);
  for (int f : a.selected) {
    const auto z = instr_logits(params, features(observations[static_cast<std::size_t>(f)]));
    a.instructions.push_back(LocalInstruction::from_subset_index(argmax(z)));
  }
  a.logprob = logprob(params, observations, a);
  return a;
}

double logprob(const PolicyParams& params, std::span<const FrameObservation> observations,
               const KeyframeAction& action) {
  check_feasible(params, observations, action);
  const auto zk = count_logits(params, observations.size());
  double lp = zk[static_cast<std::size_t>(action.k() - 1)] - log_sum_exp(zk);

  const auto scores = frame_scores(params, observations);
  std::vector<char> taken(observations.size(), 0);
  for (int f : action.selected) {
    std::vector<double> z;
    for (std::size_t t = 0; t < observations.size(); ++t) {
      if (!taken[t]) z.push_back(scores[t]);
    }
    lp += scores[static_cast<std::size_t>(f)] - log_sum_exp(z);
    taken[static_cast<std::size_t>(f)] = 1;
  }
  for (std::size_t i = 0; i < action.selected.size(); ++i) {
    const auto z = instr_logits(params, features(observations[static_cast<std::size_t>(action.selected[i])]));
    lp += z[static_cast<std::size_t>(action.instructions[i].subset_index())] - log_sum_exp(z);
  }
  return lp;
}

PolicyParams grad_logprob(const PolicyParams& params,
                          std::span<const FrameObservation> observations,
                          const KeyframeAction& action) {
  check_feasible(params, observations, action);
  PolicyParams g(params.k_max());

  const auto pk = softmax(count_logits(params, observations.size()));
  for (std::size_t i = 0; i < pk.size(); ++i) g.w_count[i] -= pk[i];
  g.w_count[static_cast<std::size_t>(action.k() - 1)] += 1.0;

  std::vector<FeatureVector> phi(observations.size());
  for (std::size_t t = 0; t < observations.size(); ++t) phi[t] = features(observations[t]);
  const auto scores = frame_scores(params, observations);
  std::vector<char> taken(observations.size(), 0);
  for (int f : action.selected) {
    std::vector<double> z;
    std::vector<std::size_t> idx;
    for (std::size_t t = 0; t < observations.size(); ++t) {
      if (!taken[t]) {
        z.push_back(scores[t]);
        idx.push_back(t);
      }
    }
    const auto p = softmax(z);
    for (int d = 0; d < kFeatureDim; ++d) {
      double expect = 0.0;
      for (std::size_t j = 0; j < idx.size(); ++j) expect += p[j] * phi[idx[j]][static_cast<std::size_t>(d)];
      g.w_select[static_cast<std::size_t>(d)] += phi[static_cast<std::size_t>(f)][static_cast<std::size_t>(d)] - expect;
    }
    taken[static_cast<std::size_t>(f)] = 1;
  }

  for (std::size_t i = 0; i < action.selected.size(); ++i) {
    const auto& x = phi[static_cast<std::size_t>(action.selected[i])];
    const auto q = softmax(instr_logits(params, x));
    const int chosen = action.instructions[i].subset_index();
    for (int s = 0; s < kNumInstructionSubsets; ++s) {
      const double coef = (s == chosen ? 1.0 : 0.0) - q[static_cast<std::size_t>(s)];
      for (int d = 0; d < kFeatureDim; ++d) g.u(s, d) += coef * x[static_cast<std::size_t>(d)];
    }
  }
  return g;
}

}  // namespace kfr
