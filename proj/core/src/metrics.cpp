#include "kfr/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "kfr/error.hpp"
#include "kfr/rng.hpp"

namespace kfr {

namespace {

void check_aligned(const MaskSequence& pred, const MaskSequence& gt) {
  require(pred.size() == gt.size(), "metrics: sequence length mismatch");
  validate_sequence(pred);
  validate_sequence(gt);
  require(pred.front().same_shape(gt.front()), "metrics: mask dimension mismatch");
}

EpisodeRecord evaluate_one(const ActionProvider& provider, std::uint64_t seed, const EvalConfig& cfg) {
  const Episode full = generate_episode(cfg.env, seed);
  const Episode clip = resample(full, cfg.env.eval_frames);
  const KeyframeAction action = provider(clip, full);
  std::vector<int> frames;
  for (int f : action.selected) {
    require(f >= 0 && f < clip.frames, "evaluate: provider picked a frame outside the clip");
    frames.push_back(clip.source_frames[static_cast<std::size_t>(f)]);
  }
  Rng rng = make_rng(cfg.seed, Stream::eval, {seed});
  const auto result = rollout_pipeline(full, frames, action.instructions, 0, cfg.pipeline, rng);

  EpisodeRecord rec;
  rec.seed = seed;
  rec.j = j_score(result.propagation.masks, full.gt_masks);
  rec.f = f_score(result.propagation.masks, full.gt_masks, cfg.f_tolerance);
  rec.jf = 0.5 * (rec.j + rec.f);
  rec.reward = result.reward;
  rec.keyframes = frames;
  rec.target_segments = static_cast<int>(full.target_object().visibility.size());
  rec.segments_covered = segments_covered(full, frames);
  return rec;
}

}  // namespace

double j_score(const MaskSequence& pred, const MaskSequence& gt) {
  check_aligned(pred, gt);
  double sum = 0.0;
  for (std::size_t t = 0; t < gt.size(); ++t) sum += mask_iou(pred[t], gt[t]);
  return sum / static_cast<double>(gt.size());
}

double f_measure(const BinaryMask& pred, const BinaryMask& gt, int tolerance_px) {
  require(pred.same_shape(gt), "f_measure: dimension mismatch");
  require(tolerance_px >= 0, "f_measure: tolerance must be non-negative");
  const auto pb = boundary(pred);
  const auto gb = boundary(gt);
  const auto np = mask_area(pb);
  const auto ng = mask_area(gb);
  if (np == 0 && ng == 0) return 1.0;
  if (np == 0 || ng == 0) return 0.0;
  const double precision = static_cast<double>(mask_area(mask_intersection(pb, dilate(gb, tolerance_px)))) / np;
  const double recall = static_cast<double>(mask_area(mask_intersection(gb, dilate(pb, tolerance_px)))) / ng;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double f_score(const MaskSequence& pred, const MaskSequence& gt, int tolerance_px) {
  check_aligned(pred, gt);
  double sum = 0.0;
  for (std::size_t t = 0; t < gt.size(); ++t) sum += f_measure(pred[t], gt[t], tolerance_px);
  return sum / static_cast<double>(gt.size());
}

int segments_covered(const Episode& e, std::span<const int> frames) {
  int covered = 0;
  for (const auto& seg : e.target_object().visibility) {
    if (std::any_of(frames.begin(), frames.end(), [&](int f) { return seg.contains(f); })) ++covered;
  }
  return covered;
}

EvalReport evaluate(const ActionProvider& provider, std::span<const std::uint64_t> episode_seeds,
                    const EvalConfig& cfg) {
  require(!episode_seeds.empty(), "evaluate: corpus is empty");
  cfg.env.validate();
  EvalReport report;
  report.episodes.resize(episode_seeds.size());
  const int workers = std::clamp(cfg.threads, 1, static_cast<int>(episode_seeds.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < episode_seeds.size(); ++i) {
      report.episodes[i] = evaluate_one(provider, episode_seeds[i], cfg);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < episode_seeds.size() && !failed; i = next++) {
          try {
            report.episodes[i] = evaluate_one(provider, episode_seeds[i], cfg);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  for (const auto& r : report.episodes) {
    report.j_mean += r.j;
    report.f_mean += r.f;
  }
  const double n = static_cast<double>(report.episodes.size());
  report.j_mean /= n;
  report.f_mean /= n;
  report.jf_mean = 0.5 * (report.j_mean + report.f_mean);
  return report;
}

EvalReport evaluate(const PolicyParams& params, std::span<const std::uint64_t> episode_seeds,
                    const EvalConfig& cfg) {
  return evaluate(
      [&params](const Episode& clip, const Episode&) { return greedy_action(params, clip.observations); },
      episode_seeds, cfg);
}

std::vector<std::uint64_t> corpus_seeds(std::uint64_t seed, int count) {
  require(count >= 0, "corpus_seeds: count must be non-negative");
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(derive_seed(seed, Stream::corpus, {static_cast<std::uint64_t>(i)}));
  return out;
}

}  // namespace kfr
