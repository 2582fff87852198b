#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vnav/nn/adam.hpp"
#include "vnav/nn/matrix.hpp"
#include "vnav/rl/checkpoint.hpp"
#include "vnav/train/config.hpp"
#include "vnav/train/replay.hpp"

namespace vnav::train {

struct EvalLevelMetrics {
  int level = 0;  // 1-based curriculum stage
  int episodes = 0;
  double success_rate = 0.0;
  double mean_reward = 0.0;
  double mean_travel_time = 0.0;  // robots in successful episodes
  double mean_energy = 0.0;       // robots in successful episodes
};

struct EvalRecord {
  std::int64_t step = 0;
  std::vector<EvalLevelMetrics> levels;
};

struct TrainResult {
  rl::Checkpoint checkpoint;
  std::vector<EvalRecord> eval_log;
};

// Sampled TD residuals of one transition: deltas(i, j) = r + gamma *
// Z_tau'_j(s', a') - Z_tau_i(s, a), with a' greedy under the target model at
// phi = 1 and the bootstrap dropped on terminal transitions.
struct TdDeltas {
  nn::Matrix deltas;
  std::vector<double> taus;  // the N online tau samples
  int next_action = 0;
};

TdDeltas iqn_td_deltas(const Transition& transition, const rl::Model& model,
                       const rl::Model& target, int n_tau, int n_tau_prime, double gamma,
                       std::mt19937_64& rng);

// One optimization step on a uniformly sampled batch. Returns the loss.
double learn_step(const ReplayBuffer& buffer, rl::Model& model, const rl::Model& target,
                  nn::Adam& optimizer, const TrainConfig& config, std::mt19937_64& rng);

// Fixed evaluation set: per_level environments for each schedule stage,
// reproducible from the seed. Pairs are (1-based level, world).
std::vector<std::pair<int, World>> make_eval_environments(const CurriculumSchedule& schedule,
                                                          const TrainConfig& config,
                                                          std::uint64_t seed, int per_level = 10);

// Greedy rollouts (phi = 1 for IQN) of every evaluation environment, each
// run to termination or l_episode_max. An episode counts as successful only
// if every robot reaches its goal.
EvalRecord evaluate_checkpoint(const rl::Model& model,
                               const std::vector<std::pair<int, World>>& eval_envs,
                               const TrainConfig& config, std::int64_t step);

// The full training loop: shared model over all robots, epsilon-greedy
// exploration, curriculum-scheduled environment resets, periodic
// evaluation and checkpointing (written under out_dir when nonempty).
TrainResult train(const TrainConfig& config, const CurriculumSchedule& schedule,
                  const std::string& out_dir = "");

std::string eval_record_to_json(const EvalRecord& record);

// Energy of one control step: |a| / 0.4 + |w| / 0.52.
double action_energy(const Action& action);

}  // namespace vnav::train
