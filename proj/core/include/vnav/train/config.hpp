#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vnav/envgen.hpp"
#include "vnav/rl/model.hpp"

namespace vnav::train {

struct CurriculumStage {
  std::int64_t step_boundary = 0;  // inclusive end of this stage, strictly increasing
  CurriculumLevel level;
};

struct CurriculumSchedule {
  std::vector<CurriculumStage> stages;
};

// Six-stage schedule with boundaries at fractions 1/6 .. 6/6 of t_total:
// robots 3/5/7/7/7/7, vortices 4/6/8/8/8/8, obstacles 0/0/2/4/6/8,
// min start-goal distance 30/35/40/40/40/40.
CurriculumSchedule default_schedule(std::int64_t t_total);

const CurriculumLevel& stage_for_step(const CurriculumSchedule& schedule, std::int64_t step);

struct TrainConfig {
  std::int64_t t_total = 200000;
  double epsilon_max = 0.6;
  double epsilon_min = 0.05;
  double decay_fraction = 0.25;
  std::int64_t l_episode_max = 1000;
  std::int64_t t_learn_freq = 4;
  std::int64_t t_eval_freq = 60000;
  int batch_size = 64;
  double gamma = 0.99;
  std::size_t buffer_capacity = 100000;
  std::uint64_t seed = 0;
  rl::ModelKind model_kind = rl::ModelKind::Iqn;
  double learning_rate = 1e-4;
  std::int64_t target_sync = 1000;  // learn steps between target-network copies
  int num_tau = 8;                  // N = N'
  int num_tau_action = 32;          // K
  WorldParams world;
};

// Linear decay from epsilon_max at t=0 to epsilon_min at decay_fraction *
// t_total, constant thereafter. Throws on t outside [0, t_total].
double epsilon_at(std::int64_t t, const TrainConfig& config);

TrainConfig train_config_from_json(const std::string& text);
std::string train_config_to_json(const TrainConfig& config);
TrainConfig load_train_config(const std::string& path);

}  // namespace vnav::train
