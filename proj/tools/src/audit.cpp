#include "kfr_tools/audit.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "kfr/error.hpp"
#include "kfr/grpo.hpp"
#include "kfr/metrics.hpp"
#include "kfr/protocol.hpp"
#include "kfr/rewards.hpp"
#include "kfr/rng.hpp"
#include "kfr_tools/generators.hpp"
#include "kfr_tools/oracles.hpp"

namespace kfr::audit {

namespace {

int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

PropertyResult check(const std::string& name, int cases, double tol, const std::function<double(int)>& error_of) {
  PropertyResult r{name, cases, 0.0, tol, true};
  for (int i = 0; i < cases; ++i) {
    const double e = error_of(i);
    if (!(e <= tol)) r.passed = false;  // NaN fails too
    if (!(e <= r.max_error)) r.max_error = e;
  }
  return r;
}

std::vector<FrameObservation> random_observations(Rng& rng, int frames) {
  std::vector<FrameObservation> obs(static_cast<std::size_t>(frames));
  for (int t = 0; t < frames; ++t) {
    auto& o = obs[static_cast<std::size_t>(t)];
    o.presence_score = uniform01(rng);
    o.time_position = double(t) / frames;
    o.sound_active = uniform01(rng) < 0.5 ? 1.0 : 0.0;
    o.post_gap = uniform01(rng) < 0.3 ? 1.0 : 0.0;
    o.crowding = uniform01(rng);
  }
  return obs;
}

BinaryMask random_mask(Rng& rng, int n) {
  BinaryMask m(n, n);
  const double p = uniform01(rng);
  for (auto& b : m.bits()) b = uniform01(rng) < p ? 1 : 0;
  return m;
}

}  // namespace

bool Report::passed() const {
  for (const auto& p : properties) {
    if (!p.passed) return false;
  }
  return true;
}

Report run(std::uint64_t seed, int cases, Fault fault) {
  require(cases >= 1, "audit: cases must be at least 1");
  Report rep;
  auto stream = [&](std::uint64_t id) { return make_rng(seed, Stream::audit, {id}); };

  {
    Rng rng = stream(1);
    rep.properties.push_back(check("hungarian_vs_permutations", cases, 1e-9, [&](int) {
      CostMatrix m(pick(rng, 1, 6), pick(rng, 1, 6));
      for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) m(r, c) = 20.0 * uniform01(rng) - 10.0;
      CostMatrix solver_input = m;
      if (fault == Fault::hungarian) solver_input(0, 0) = -1e6;
      return std::abs(hungarian(solver_input).total_cost - oracle::brute_force_assignment(m));
    }));
  }
  {
    Rng rng = stream(2);
    rep.properties.push_back(check("diversity_closed_form", cases, 1e-12, [&](int) {
      std::vector<int> sel(static_cast<std::size_t>(pick(rng, 1, 12)));
      for (auto& s : sel) s = pick(rng, 0, 8);
      const double v = diversity_reward(sel, -0.2, 0.25);
      // the two-term form must agree bit for bit
      if (v != oracle::diversity_by_definition(sel, -0.2, 0.25)) return 1.0;
      return std::abs(v - oracle::diversity_closed_form(sel, -0.2, 0.25));
    }));
  }
  {
    Rng rng = stream(3);
    rep.properties.push_back(check("saliency_direct", cases, 1e-12, [&](int) {
      std::vector<std::int64_t> areas(static_cast<std::size_t>(pick(rng, 1, 48)));
      for (auto& a : areas) a = pick(rng, 0, 400);
      areas[static_cast<std::size_t>(pick(rng, 0, int(areas.size()) - 1))] = 401;
      std::vector<int> sel(static_cast<std::size_t>(pick(rng, 1, 8)));
      for (auto& s : sel) s = pick(rng, 0, int(areas.size()) - 1);
      return std::abs(saliency_reward(sel, areas) - oracle::saliency_direct(sel, areas));
    }));
  }
  {
    Rng rng = stream(4);
    rep.properties.push_back(check("global_consistency_direct", cases, 1e-12, [&](int) {
      MaskSequence p, g;
      const int frames = pick(rng, 1, 6);
      for (int t = 0; t < frames; ++t) {
        p.push_back(random_mask(rng, 12));
        g.push_back(random_mask(rng, 12));
      }
      return std::abs(global_consistency_reward(p, g) - oracle::mean_mask_iou_direct(p, g));
    }));
  }
  {
    Rng rng = stream(5);
    rep.properties.push_back(check("total_reward_projection", cases, 0.0, [&](int) {
      RewardBreakdown k;
      k.r_k = uniform01(rng);
      const double ra = uniform01(rng), rg = uniform01(rng);
      double worst = 0.0;
      for (int axis = 0; axis < 3; ++axis) {
        RewardWeights w;
        w.alpha_k = axis == 0;
        w.alpha_a = axis == 1;
        w.alpha_g = axis == 2;
        const double want = axis == 0 ? k.r_k : axis == 1 ? ra : rg;
        worst = std::max(worst, std::abs(total_reward(k, ra, rg, w).r_total - want));
      }
      return worst;
    }));
  }
  {
    Rng rng = stream(6);
    rep.properties.push_back(check("policy_normalization", cases, 1e-9, [&](int) {
      const auto params = init_params(pick(rng, 1, 2), 1.0, rng);
      const auto obs = random_observations(rng, pick(rng, 1, 3));
      return std::abs(oracle::total_probability(params, obs) - 1.0);
    }));
  }
  {
    Rng rng = stream(7);
    rep.properties.push_back(check("grad_logprob_finite_differences", cases, 1e-5, [&](int) {
      const auto params = init_params(pick(rng, 1, 8), 0.8, rng);
      const auto obs = random_observations(rng, pick(rng, 1, 16));
      const auto a = sample_action(params, obs, rng);
      return oracle::max_relative_error(grad_logprob(params, obs, a).flat(), oracle::fd_gradient(params, obs, a, 1e-5));
    }));
  }
  {
    Rng rng = stream(8);
    rep.properties.push_back(check("group_advantage_moments", cases, 1e-9, [&](int) {
      std::vector<double> r(static_cast<std::size_t>(pick(rng, 2, 16)));
      for (auto& x : r) x = uniform01(rng);
      const auto a = group_advantages(r, 1e-8);
      double mean = 0.0, var = 0.0;
      for (double x : a) mean += x / double(a.size());
      for (double x : a) var += (x - mean) * (x - mean) / double(a.size());
      std::vector<double> flat(r.size(), r[0]);
      double degenerate = 0.0;
      for (double x : group_advantages(flat, 1e-8)) degenerate = std::max(degenerate, std::abs(x));
      return std::max({std::abs(mean), std::abs(std::sqrt(var) - 1.0), degenerate == 0.0 ? 0.0 : 1.0});
    }));
  }
  {
    Rng rng = stream(9);
    rep.properties.push_back(check("protocol_round_trip", cases, 0.0, [&](int) {
      const int duration = pick(rng, 1, 3599);
      const auto a = gen::random_answer(rng, duration);
      try {
        return parse_response(serialize_answer(a), duration) == a ? 0.0 : 1.0;
      } catch (const ParseError&) {
        return 1.0;
      }
    }));
  }
  return rep;
}

void print(const Report& r, std::ostream& out) {
  char line[256];
  for (const auto& p : r.properties) {
    std::snprintf(line, sizeof line, "%s %-32s cases=%-6d max_error=%.3e tolerance=%.0e\n", p.passed ? "PASS" : "FAIL",
                  p.name.c_str(), p.cases, p.max_error, p.tolerance);
    out << line;
  }
  out << (r.passed() ? "audit passed\n" : "audit FAILED\n");
}

}  // namespace kfr::audit
