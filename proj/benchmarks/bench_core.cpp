#include <benchmark/benchmark.h>

#include <random>

#include "kfr/config.hpp"
#include "kfr/env.hpp"
#include "kfr/grpo.hpp"
#include "kfr/matching.hpp"
#include "kfr/policy.hpp"
#include "kfr/training.hpp"

namespace {

void BM_Hungarian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  kfr::Rng rng = kfr::make_rng(1, kfr::Stream::audit);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<kfr::CostMatrix> pool;
  for (int i = 0; i < 64; ++i) {
    kfr::CostMatrix m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m(r, c) = u(rng);
    pool.push_back(std::move(m));
  }
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(kfr::hungarian(pool[i++ % pool.size()]));
}
BENCHMARK(BM_Hungarian)->Arg(2)->Arg(6)->Arg(16)->Arg(64);

void BM_GenerateEpisode(benchmark::State& state) {
  const kfr::RunConfig cfg;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(kfr::generate_episode(cfg.env, seed++));
}
BENCHMARK(BM_GenerateEpisode);

struct Fixture {
  kfr::RunConfig cfg;
  kfr::Episode episode = kfr::generate_episode(cfg.env, 42);
  kfr::PolicyParams params = kfr::initial_params(cfg, 7);
};

void BM_SampleAction(benchmark::State& state) {
  Fixture f;
  kfr::Rng rng = kfr::make_rng(3, kfr::Stream::rollout);
  for (auto _ : state) benchmark::DoNotOptimize(kfr::sample_action(f.params, f.episode.observations, rng));
}
BENCHMARK(BM_SampleAction);

void BM_GradLogprob(benchmark::State& state) {
  Fixture f;
  kfr::Rng rng = kfr::make_rng(3, kfr::Stream::rollout);
  const auto action = kfr::sample_action(f.params, f.episode.observations, rng);
  for (auto _ : state) benchmark::DoNotOptimize(kfr::grad_logprob(f.params, f.episode.observations, action));
}
BENCHMARK(BM_GradLogprob);

void BM_RolloutPipeline(benchmark::State& state) {
  Fixture f;
  const auto pipeline = f.cfg.pipeline();
  kfr::Rng rng = kfr::make_rng(3, kfr::Stream::rollout);
  const auto action = kfr::sample_action(f.params, f.episode.observations, rng);
  for (auto _ : state) benchmark::DoNotOptimize(kfr::rollout_pipeline(f.episode, action, 0, pipeline, rng));
}
BENCHMARK(BM_RolloutPipeline);

void BM_TrainingIteration(benchmark::State& state) {
  Fixture f;
  int it = 0;
  for (auto _ : state) {
    const auto group = kfr::collect_group(f.params, f.params, f.episode, f.cfg, 11, it++);
    benchmark::DoNotOptimize(kfr::grpo_step(f.params, group, f.cfg.grpo.step));
  }
}
BENCHMARK(BM_TrainingIteration);

}  // namespace

BENCHMARK_MAIN();
