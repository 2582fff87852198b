#include "vnav/train/trainer.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "vnav/nn/losses.hpp"

namespace vnav::train {

using nn::Matrix;

double action_energy(const Action& action) {
  return std::abs(action.accel) / 0.4 + std::abs(action.turn_rate) / 0.52;
}

namespace {

int greedy_action(const rl::Model& model, const Observation& obs, std::mt19937_64& rng,
                  int num_tau_action) {
  if (model.kind == rl::ModelKind::Iqn)
    return rl::iqn_select_action(model, obs, 1.0, rng, num_tau_action);
  return rl::dqn_select_action(model, obs);
}

Matrix batch_observations(const ReplayBuffer& buffer, const std::vector<std::size_t>& idx,
                          bool next) {
  Matrix m(static_cast<int>(idx.size()), kObservationSize);
  for (std::size_t s = 0; s < idx.size(); ++s) {
    const Observation& o = next ? buffer[idx[s]].next_state : buffer[idx[s]].state;
    std::copy(o.begin(), o.end(), m.row(static_cast<int>(s)));
  }
  return m;
}

std::vector<double> sample_taus(std::size_t count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> taus(count);
  for (double& t : taus) t = unit(rng);
  return taus;
}

int argmax_mean_row_block(const Matrix& z, int first_row, int rows) {
  std::array<double, kNumActions> mean{};
  for (int k = 0; k < rows; ++k) {
    const double* row = z.row(first_row + k);
    for (int a = 0; a < kNumActions; ++a) mean[a] += row[a];
  }
  int best = 0;
  for (int a = 1; a < kNumActions; ++a) {
    if (mean[a] > mean[best]) best = a;
  }
  return best;
}

double learn_step_iqn(const ReplayBuffer& buffer, const std::vector<std::size_t>& idx,
                      rl::Model& model, const rl::Model& target, nn::Adam& optimizer,
                      const TrainConfig& config, std::mt19937_64& rng) {
  const int batch = static_cast<int>(idx.size());
  const int n_tau = config.num_tau;

  const Matrix obs = batch_observations(buffer, idx, false);
  const Matrix next_obs = batch_observations(buffer, idx, true);
  const std::vector<double> taus = sample_taus(static_cast<std::size_t>(batch) * n_tau, rng);
  const std::vector<double> taus_prime = sample_taus(static_cast<std::size_t>(batch) * n_tau, rng);

  rl::ForwardCache cache;
  const Matrix z = rl::iqn_forward_batch(model, obs, taus, n_tau, 1.0, &cache);
  const Matrix z_next = rl::iqn_forward_batch(target, next_obs, taus_prime, n_tau, 1.0);

  double total_loss = 0.0;
  Matrix upstream(batch * n_tau, kNumActions);
  for (int s = 0; s < batch; ++s) {
    const Transition& tr = buffer[idx[s]];
    const int next_action = argmax_mean_row_block(z_next, s * n_tau, n_tau);

    Matrix deltas(n_tau, n_tau);
    for (int i = 0; i < n_tau; ++i) {
      const double z_sa = z(s * n_tau + i, tr.action);
      for (int j = 0; j < n_tau; ++j) {
        const double bootstrap =
            tr.terminal ? 0.0 : config.gamma * z_next(s * n_tau + j, next_action);
        deltas(i, j) = tr.reward + bootstrap - z_sa;
      }
    }
    const std::vector<double> sample_tau(taus.begin() + s * n_tau,
                                         taus.begin() + (s + 1) * n_tau);
    const nn::MatrixLoss loss = nn::iqn_loss(deltas, sample_tau);
    total_loss += loss.loss / batch;
    for (int i = 0; i < n_tau; ++i) {
      double g = 0.0;
      for (int j = 0; j < n_tau; ++j) g += loss.grad(i, j);
      upstream(s * n_tau + i, tr.action) = -g / batch;
    }
  }

  rl::ModelGrad grad = rl::make_model_grad(model);
  rl::iqn_backward_batch(model, cache, upstream, grad);

  std::vector<double> flat_params = rl::flatten_params(model);
  std::vector<double> flat_grads;
  flat_grads.reserve(flat_params.size());
  rl::visit_grads(grad, [&](double* p, std::size_t n) { flat_grads.insert(flat_grads.end(), p, p + n); });
  optimizer.step(flat_params, flat_grads);
  rl::unflatten_params(model, flat_params);
  return total_loss;
}

double learn_step_dqn(const ReplayBuffer& buffer, const std::vector<std::size_t>& idx,
                      rl::Model& model, const rl::Model& target, nn::Adam& optimizer,
                      const TrainConfig& config) {
  const int batch = static_cast<int>(idx.size());
  const Matrix obs = batch_observations(buffer, idx, false);
  const Matrix next_obs = batch_observations(buffer, idx, true);

  rl::ForwardCache cache;
  const Matrix q = rl::dqn_forward_batch(model, obs, &cache);
  const Matrix q_next = rl::dqn_forward_batch(target, next_obs);

  std::vector<double> taken(batch), targets(batch);
  for (int s = 0; s < batch; ++s) {
    const Transition& tr = buffer[idx[s]];
    taken[s] = q(s, tr.action);
    double best = q_next(s, 0);
    for (int a = 1; a < kNumActions; ++a) best = std::max(best, q_next(s, a));
    targets[s] = tr.reward + (tr.terminal ? 0.0 : config.gamma * best);
  }
  const nn::VectorLoss loss = nn::dqn_loss(taken, targets);

  Matrix upstream(batch, kNumActions);
  for (int s = 0; s < batch; ++s) upstream(s, buffer[idx[s]].action) = loss.grad[s];

  rl::ModelGrad grad = rl::make_model_grad(model);
  rl::dqn_backward_batch(model, cache, upstream, grad);

  std::vector<double> flat_params = rl::flatten_params(model);
  std::vector<double> flat_grads;
  flat_grads.reserve(flat_params.size());
  rl::visit_grads(grad, [&](double* p, std::size_t n) { flat_grads.insert(flat_grads.end(), p, p + n); });
  optimizer.step(flat_params, flat_grads);
  rl::unflatten_params(model, flat_params);
  return loss.loss;
}

}  // namespace

TdDeltas iqn_td_deltas(const Transition& transition, const rl::Model& model,
                       const rl::Model& target, int n_tau, int n_tau_prime, double gamma,
                       std::mt19937_64& rng) {
  TdDeltas result;
  result.taus = sample_taus(n_tau, rng);
  const std::vector<double> taus_prime = sample_taus(n_tau_prime, rng);

  const Matrix z = rl::iqn_forward(model, transition.state, result.taus, 1.0);
  const Matrix z_next = rl::iqn_forward(target, transition.next_state, taus_prime, 1.0);
  result.next_action = argmax_mean_row_block(z_next, 0, n_tau_prime);

  result.deltas = Matrix(n_tau, n_tau_prime);
  for (int i = 0; i < n_tau; ++i) {
    for (int j = 0; j < n_tau_prime; ++j) {
      const double bootstrap =
          transition.terminal ? 0.0 : gamma * z_next(j, result.next_action);
      result.deltas(i, j) = transition.reward + bootstrap - z(i, transition.action);
    }
  }
  return result;
}

double learn_step(const ReplayBuffer& buffer, rl::Model& model, const rl::Model& target,
                  nn::Adam& optimizer, const TrainConfig& config, std::mt19937_64& rng) {
  if (buffer.size() < static_cast<std::size_t>(config.batch_size))
    throw std::runtime_error("learn_step: buffer smaller than batch");
  const auto idx = buffer.sample_indices(config.batch_size, rng);
  if (model.kind == rl::ModelKind::Iqn)
    return learn_step_iqn(buffer, idx, model, target, optimizer, config, rng);
  return learn_step_dqn(buffer, idx, model, target, optimizer, config);
}

std::vector<std::pair<int, World>> make_eval_environments(const CurriculumSchedule& schedule,
                                                          const TrainConfig& config,
                                                          std::uint64_t seed, int per_level) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<int, World>> envs;
  for (std::size_t stage = 0; stage < schedule.stages.size(); ++stage) {
    for (int i = 0; i < per_level; ++i) {
      envs.emplace_back(static_cast<int>(stage) + 1,
                        generate_environment(schedule.stages[stage].level, config.world, rng));
    }
  }
  return envs;
}

EvalRecord evaluate_checkpoint(const rl::Model& model,
                               const std::vector<std::pair<int, World>>& eval_envs,
                               const TrainConfig& config, std::int64_t step) {
  struct LevelAccum {
    int episodes = 0, successes = 0;
    double reward_sum = 0.0;
    int reward_count = 0;
    double time_sum = 0.0, energy_sum = 0.0;
    int success_robots = 0;
  };
  std::map<int, LevelAccum> accum;

  for (std::size_t e = 0; e < eval_envs.size(); ++e) {
    const int level = eval_envs[e].first;
    World world = eval_envs[e].second;
    std::mt19937_64 rng(config.seed ^ (0x9e3779b97f4a7c15ULL * (e + 1)) ^
                        static_cast<std::uint64_t>(step));

    const std::size_t n = world.robots.size();
    std::vector<double> reward_sum(n, 0.0), energy(n, 0.0), goal_time(n, 0.0);
    for (std::int64_t t = 0; t < config.l_episode_max; ++t) {
      bool any_active = false;
      std::vector<Action> actions(n);
      std::vector<RobotState> prev = world.robots;
      for (std::size_t i = 0; i < n; ++i) {
        if (world.robots[i].status != RobotStatus::Active) continue;
        any_active = true;
        const Observation obs = observe(world, i);
        const int a = greedy_action(model, obs, rng, config.num_tau_action);
        actions[i] = action_from_index(a);
        energy[i] += action_energy(actions[i]);
      }
      if (!any_active) break;
      step_world(world, actions);
      for (std::size_t i = 0; i < n; ++i) {
        if (prev[i].status != RobotStatus::Active) continue;
        reward_sum[i] += reward(prev[i], world.robots[i], world.robots[i].status);
        if (world.robots[i].status == RobotStatus::ReachedGoal) goal_time[i] = world.sim_time;
      }
    }

    LevelAccum& acc = accum[level];
    acc.episodes += 1;
    const bool success = std::all_of(world.robots.begin(), world.robots.end(), [](const auto& r) {
      return r.status == RobotStatus::ReachedGoal;
    });
    if (success) {
      acc.successes += 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc.time_sum += goal_time[i];
        acc.energy_sum += energy[i];
        acc.success_robots += 1;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      acc.reward_sum += reward_sum[i];
      acc.reward_count += 1;
    }
  }

  EvalRecord record;
  record.step = step;
  for (const auto& [level, acc] : accum) {
    EvalLevelMetrics m;
    m.level = level;
    m.episodes = acc.episodes;
    m.success_rate = acc.episodes ? static_cast<double>(acc.successes) / acc.episodes : 0.0;
    m.mean_reward = acc.reward_count ? acc.reward_sum / acc.reward_count : 0.0;
    m.mean_travel_time = acc.success_robots ? acc.time_sum / acc.success_robots : 0.0;
    m.mean_energy = acc.success_robots ? acc.energy_sum / acc.success_robots : 0.0;
    record.levels.push_back(m);
  }
  return record;
}

std::string eval_record_to_json(const EvalRecord& record) {
  nlohmann::json j;
  j["step"] = record.step;
  j["levels"] = nlohmann::json::array();
  for (const auto& m : record.levels) {
    j["levels"].push_back({{"level", m.level},
                           {"episodes", m.episodes},
                           {"success_rate", m.success_rate},
                           {"mean_reward", m.mean_reward},
                           {"mean_travel_time", m.mean_travel_time},
                           {"mean_energy", m.mean_energy}});
  }
  return j.dump();
}

TrainResult train(const TrainConfig& config, const CurriculumSchedule& schedule,
                  const std::string& out_dir) {
  std::mt19937_64 rng(config.seed);
  rl::Model model = rl::make_model(config.model_kind, rng);
  rl::Model target = model;
  nn::Adam optimizer(config.learning_rate);
  ReplayBuffer buffer(config.buffer_capacity);

  const auto eval_envs = make_eval_environments(schedule, config, config.seed + 1);

  std::ofstream eval_out;
  if (!out_dir.empty()) eval_out.open(out_dir + "/eval_log.jsonl");

  World world = generate_environment(stage_for_step(schedule, 1), config.world, rng);
  std::int64_t episode_len = 0;
  std::int64_t learn_count = 0;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> uniform_action(0, kNumActions - 1);

  TrainResult result;
  for (std::int64_t t = 1; t <= config.t_total; ++t) {
    const double eps = epsilon_at(t, config);

    const std::size_t n = world.robots.size();
    std::vector<Observation> obs_before(n);
    std::vector<int> action_idx(n, 0);
    std::vector<Action> actions(n);
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n; ++i) {
      if (world.robots[i].status != RobotStatus::Active) continue;
      active.push_back(i);
      obs_before[i] = observe(world, i);
      const int a = unit(rng) < eps
                        ? uniform_action(rng)
                        : greedy_action(model, obs_before[i], rng, config.num_tau_action);
      action_idx[i] = a;
      actions[i] = action_from_index(a);
    }

    const std::vector<RobotState> prev = world.robots;
    step_world(world, actions);
    for (const std::size_t i : active) {
      Transition tr;
      tr.state = obs_before[i];
      tr.action = action_idx[i];
      tr.reward = reward(prev[i], world.robots[i], world.robots[i].status);
      tr.next_state = observe(world, i);
      tr.terminal = world.robots[i].status != RobotStatus::Active;
      buffer.push(tr);
    }
    ++episode_len;

    if (t % config.t_learn_freq == 0 &&
        buffer.size() >= static_cast<std::size_t>(config.batch_size)) {
      learn_step(buffer, model, target, optimizer, config, rng);
      ++learn_count;
      if (learn_count % config.target_sync == 0) target = model;
    }

    if (t % config.t_eval_freq == 0) {
      EvalRecord record = evaluate_checkpoint(model, eval_envs, config, t);
      if (eval_out) eval_out << eval_record_to_json(record) << "\n";
      if (!out_dir.empty()) {
        rl::Checkpoint ckpt{model, t, config.seed};
        rl::save_checkpoint(ckpt, out_dir + "/ckpt_" + std::to_string(t) + ".json");
      }
      result.eval_log.push_back(std::move(record));
    }

    const bool none_active =
        std::none_of(world.robots.begin(), world.robots.end(),
                     [](const auto& r) { return r.status == RobotStatus::Active; });
    if (episode_len > config.l_episode_max || none_active) {
      const std::int64_t next_step = std::min(t + 1, config.t_total);
      world = generate_environment(stage_for_step(schedule, next_step), config.world, rng);
      episode_len = 0;
    }
  }

  result.checkpoint = rl::Checkpoint{std::move(model), config.t_total, config.seed};
  if (!out_dir.empty()) rl::save_checkpoint(result.checkpoint, out_dir + "/ckpt_final.json");
  return result;
}

}  // namespace vnav::train
