#include "vnav/train/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace vnav::train {

CurriculumSchedule default_schedule(std::int64_t t_total) {
  const int robots[6] = {3, 5, 7, 7, 7, 7};
  const int vortices[6] = {4, 6, 8, 8, 8, 8};
  const int obstacles[6] = {0, 0, 2, 4, 6, 8};
  const double min_dist[6] = {30.0, 35.0, 40.0, 40.0, 40.0, 40.0};

  CurriculumSchedule schedule;
  for (int i = 0; i < 6; ++i) {
    CurriculumStage stage;
    stage.step_boundary = t_total * (i + 1) / 6;
    stage.level = {robots[i], vortices[i], obstacles[i], min_dist[i]};
    schedule.stages.push_back(stage);
  }
  return schedule;
}

const CurriculumLevel& stage_for_step(const CurriculumSchedule& schedule, std::int64_t step) {
  if (schedule.stages.empty()) throw std::invalid_argument("stage_for_step: empty schedule");
  for (const auto& stage : schedule.stages) {
    if (step <= stage.step_boundary) return stage.level;
  }
  return schedule.stages.back().level;
}

double epsilon_at(std::int64_t t, const TrainConfig& config) {
  if (t < 0 || t > config.t_total) throw std::out_of_range("epsilon_at: t outside [0, t_total]");
  const double decay_end = config.decay_fraction * static_cast<double>(config.t_total);
  if (t >= decay_end) return config.epsilon_min;
  const double frac = static_cast<double>(t) / decay_end;
  return config.epsilon_max + frac * (config.epsilon_min - config.epsilon_max);
}

namespace {
using nlohmann::json;
}

TrainConfig train_config_from_json(const std::string& text) {
  const json j = json::parse(text);
  TrainConfig c;
  c.t_total = j.value("t_total", c.t_total);
  c.epsilon_max = j.value("epsilon_max", c.epsilon_max);
  c.epsilon_min = j.value("epsilon_min", c.epsilon_min);
  c.decay_fraction = j.value("decay_fraction", c.decay_fraction);
  c.l_episode_max = j.value("l_episode_max", c.l_episode_max);
  c.t_learn_freq = j.value("t_learn_freq", c.t_learn_freq);
  c.t_eval_freq = j.value("t_eval_freq", c.t_eval_freq);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.gamma = j.value("gamma", c.gamma);
  c.buffer_capacity = j.value("buffer_capacity", c.buffer_capacity);
  c.seed = j.value("seed", c.seed);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.target_sync = j.value("target_sync", c.target_sync);
  c.num_tau = j.value("num_tau", c.num_tau);
  c.num_tau_action = j.value("num_tau_action", c.num_tau_action);
  const std::string kind = j.value("model_kind", std::string("iqn"));
  if (kind == "iqn") {
    c.model_kind = rl::ModelKind::Iqn;
  } else if (kind == "dqn") {
    c.model_kind = rl::ModelKind::Dqn;
  } else {
    throw std::runtime_error("train config: unknown model_kind " + kind);
  }
  if (j.contains("world")) {
    const json& w = j["world"];
    c.world.dt = w.value("dt", c.world.dt);
    c.world.v_max = w.value("v_max", c.world.v_max);
    c.world.robot_radius = w.value("robot_radius", c.world.robot_radius);
    c.world.goal_threshold = w.value("goal_threshold", c.world.goal_threshold);
    c.world.detection_range = w.value("detection_range", c.world.detection_range);
    c.world.workspace_extent = w.value("workspace_extent", c.world.workspace_extent);
  }
  return c;
}

std::string train_config_to_json(const TrainConfig& c) {
  json j;
  j["t_total"] = c.t_total;
  j["epsilon_max"] = c.epsilon_max;
  j["epsilon_min"] = c.epsilon_min;
  j["decay_fraction"] = c.decay_fraction;
  j["l_episode_max"] = c.l_episode_max;
  j["t_learn_freq"] = c.t_learn_freq;
  j["t_eval_freq"] = c.t_eval_freq;
  j["batch_size"] = c.batch_size;
  j["gamma"] = c.gamma;
  j["buffer_capacity"] = c.buffer_capacity;
  j["seed"] = c.seed;
  j["learning_rate"] = c.learning_rate;
  j["target_sync"] = c.target_sync;
  j["num_tau"] = c.num_tau;
  j["num_tau_action"] = c.num_tau_action;
  j["model_kind"] = c.model_kind == rl::ModelKind::Iqn ? "iqn" : "dqn";
  j["world"] = {{"dt", c.world.dt},
                {"v_max", c.world.v_max},
                {"robot_radius", c.world.robot_radius},
                {"goal_threshold", c.world.goal_threshold},
                {"detection_range", c.world.detection_range},
                {"workspace_extent", c.world.workspace_extent}};
  return j.dump(2);
}

TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_train_config: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return train_config_from_json(text);
}

}  // namespace vnav::train
