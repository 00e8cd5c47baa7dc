#include "kfr/training.hpp"

#include "json.hpp"
#include "kfr/error.hpp"
#include "kfr/metrics.hpp"

namespace kfr {

namespace {

using nlohmann::json;

std::string corrupt(std::string text, Rng& rng) {
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: {  // truncated before the closing tag
      const auto pos = text.rfind("</answer>");
      return text.substr(0, pos);
    }
    case 1: {  // broken JSON
      const auto pos = text.find('[');
      if (pos != std::string::npos) text[pos] = '(';
      return text;
    }
    default: {  // reversed span
      return "<answer>{\"start_time\":\"00:09\",\"end_time\":\"00:01\",\"description\":\"x\"}</answer>";
    }
  }
}

}  // namespace

Episode training_clip(const Episode& full, const EnvConfig& env, Rng& rng) {
  // A short clip can step over every visible frame of the target; redraw a few
  // times, then fall back to the longest training length.
  for (int attempt = 0; attempt < 8; ++attempt) {
    Episode clip = resample(full, train_clip_length(env, rng));
    for (const auto a : clip.gt_areas()) {
      if (a > 0) return clip;
    }
  }
  return resample(full, env.train_frames_max);
}

std::string render_response(const Episode& clip, const KeyframeAction& action) {
  KeyframeAnswer answer;
  answer.think = " query " + std::string(to_string(clip.query.type)) + "; " +
                 std::to_string(action.k()) + " moments ";
  for (std::size_t i = 0; i < action.selected.size(); ++i) {
    const int f = action.selected[i];
    const auto ts = format_timestamp(frame_to_second(f, clip.frames, clip.duration_s));
    answer.entries.push_back({ts, ts, describe_instruction(clip, f, action.instructions[i])});
  }
  return serialize_answer(answer);
}

std::optional<DecodedResponse> decode_response(const Episode& clip, std::string_view text) {
  const auto answer = parse_response(text, clip.duration_s);
  DecodedResponse out;
  out.frames = answer_to_frames(answer, clip.frames, clip.duration_s);
  for (const auto& e : answer.entries) {
    const auto ins = instruction_from_description(clip.vocabulary, e.description);
    if (!ins) return std::nullopt;
    out.instructions.push_back(*ins);
  }
  return out;
}

std::string to_json_line(const LogRecord& r) {
  json j{{"iteration", r.iteration},
         {"clip_frames", r.clip_frames},
         {"mean_reward", r.mean_reward},
         {"r_k", r.r_k},
         {"r_a", r.r_a},
         {"r_g", r.r_g},
         {"mean_kl", r.mean_kl},
         {"grad_norm", r.grad_norm},
         {"parse_failures", r.parse_failures}};
  if (r.heldout_jf) j["heldout_jf"] = *r.heldout_jf;
  return j.dump();
}

PolicyParams initial_params(const RunConfig& cfg, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::policy);
  return init_params(cfg.policy.k_max, cfg.policy.init_scale, rng);
}

RolloutGroup collect_group(const PolicyParams& params, const PolicyParams& reference,
                           const Episode& clip, const RunConfig& cfg, std::uint64_t seed,
                           int iteration) {
  RolloutGroup group;
  group.episode_seed = clip.seed;
  group.observations = clip.observations;
  const auto pipeline = cfg.pipeline();
  for (int n = 0; n < cfg.grpo.step.group_size; ++n) {
    Rng rng = make_rng(seed, Stream::rollout,
                       {static_cast<std::uint64_t>(iteration), static_cast<std::uint64_t>(n)});
    Rollout ro;
    ro.action = sample_action(params, clip.observations, rng);
    ro.logp_old = ro.action.logprob;
    ro.logp_ref = logprob(reference, clip.observations, ro.action);

    std::string text = render_response(clip, ro.action);
    if (cfg.grpo.corrupt_response_prob > 0.0 && uniform01(rng) < cfg.grpo.corrupt_response_prob) {
      text = corrupt(std::move(text), rng);
    }
    std::optional<DecodedResponse> decoded;
    try {
      decoded = decode_response(clip, text);
    } catch (const ParseError&) {
      decoded.reset();
    }
    if (decoded) {
      ro.reward = rollout_pipeline(clip, decoded->frames, decoded->instructions, n, pipeline, rng).reward;
    } else {
      ro.parse_failed = true;  // scored as all-zero reward
    }
    group.rollouts.push_back(std::move(ro));
  }
  return group;
}

TrainingResult run_training(const RunConfig& cfg, std::uint64_t seed, const LogSink& sink) {
  return run_training(cfg, initial_params(cfg, seed), seed, sink);
}

TrainingResult run_training(const RunConfig& cfg, const PolicyParams& init, std::uint64_t seed,
                            const LogSink& sink) {
  cfg.validate();
  init.validate_shape();
  require(init.k_max() == cfg.policy.k_max, "run_training: initial parameters do not match policy.k_max");
  TrainingResult result{init, init, {}};
  const PolicyParams& reference = result.initial;
  std::vector<std::uint64_t> heldout;
  if (cfg.grpo.eval_every > 0) heldout = corpus_seeds(cfg.eval.seed, cfg.eval.corpus_size);
  const auto eval_cfg = cfg.eval_config();

  for (int it = 0; it < cfg.grpo.iterations; ++it) {
    const auto episode_seed = derive_seed(seed, Stream::env, {static_cast<std::uint64_t>(it)});
    const Episode full = generate_episode(cfg.env, episode_seed);
    Rng clip_rng = make_rng(seed, Stream::env, {static_cast<std::uint64_t>(it), 1});
    const Episode clip = training_clip(full, cfg.env, clip_rng);

    const auto group = collect_group(result.final_params, reference, clip, cfg, seed, it);
    auto step = grpo_step(result.final_params, group, cfg.grpo.step);
    result.final_params = std::move(step.params);

    LogRecord rec;
    rec.iteration = it;
    rec.clip_frames = clip.frames;
    rec.mean_reward = step.diagnostics.mean_reward;
    rec.mean_kl = step.diagnostics.mean_kl;
    rec.grad_norm = step.diagnostics.grad_norm;
    const double n = static_cast<double>(group.rollouts.size());
    for (const auto& ro : group.rollouts) {
      rec.r_k += ro.reward.r_k / n;
      rec.r_a += ro.reward.r_a / n;
      rec.r_g += ro.reward.r_g / n;
      rec.parse_failures += ro.parse_failed ? 1 : 0;
    }
    if (cfg.grpo.eval_every > 0 && (it + 1) % cfg.grpo.eval_every == 0) {
      rec.heldout_jf = evaluate(result.final_params, heldout, eval_cfg).jf_mean;
    }
    if (sink) sink(rec);
    result.log.push_back(rec);
  }
  return result;
}

}  // namespace kfr
