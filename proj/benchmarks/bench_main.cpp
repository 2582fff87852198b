#include <benchmark/benchmark.h>

#include <random>

#include "vnav/envgen.hpp"
#include "vnav/rl/model.hpp"
#include "vnav/train/trainer.hpp"

namespace {

vnav::World make_world() {
  std::mt19937_64 rng(42);
  return vnav::generate_environment({7, 8, 8, 40.0}, {}, rng);
}

void BM_CurrentField(benchmark::State& state) {
  const vnav::World world = make_world();
  double x = 0.0;
  for (auto _ : state) {
    x += 0.1;
    benchmark::DoNotOptimize(
        vnav::current_at(world.vortices, {std::fmod(x, 50.0), std::fmod(2 * x, 50.0)}));
  }
}
BENCHMARK(BM_CurrentField);

void BM_Observe(benchmark::State& state) {
  const vnav::World world = make_world();
  for (auto _ : state) benchmark::DoNotOptimize(vnav::observe(world, 0));
}
BENCHMARK(BM_Observe);

void BM_IqnSelectAction(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const vnav::rl::Model model = vnav::rl::make_model(vnav::rl::ModelKind::Iqn, rng);
  const vnav::World world = make_world();
  const vnav::Observation obs = vnav::observe(world, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(vnav::rl::iqn_select_action(model, obs, 1.0, rng, 32));
}
BENCHMARK(BM_IqnSelectAction);

void BM_IqnLearnStep(benchmark::State& state) {
  vnav::train::TrainConfig config;
  std::mt19937_64 rng(1);
  vnav::rl::Model model = vnav::rl::make_model(vnav::rl::ModelKind::Iqn, rng);
  vnav::rl::Model target = model;
  vnav::nn::Adam optimizer(config.learning_rate);
  vnav::train::ReplayBuffer buffer(1000);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    vnav::train::Transition tr;
    for (auto& v : tr.state) v = unit(rng);
    for (auto& v : tr.next_state) v = unit(rng);
    tr.action = i % vnav::kNumActions;
    tr.reward = unit(rng);
    tr.terminal = i % 10 == 0;
    buffer.push(tr);
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(
        vnav::train::learn_step(buffer, model, target, optimizer, config, rng));
}
BENCHMARK(BM_IqnLearnStep);

}  // namespace

BENCHMARK_MAIN();
