#include "vnav/eval/experiment.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "vnav/scenario.hpp"
#include "vnav/train/trainer.hpp"

namespace vnav::eval {

PolicyKind policy_kind_from_string(const std::string& name) {
  if (name == "apf") return PolicyKind::Apf;
  if (name == "rvo") return PolicyKind::Rvo;
  if (name == "dqn") return PolicyKind::Dqn;
  if (name == "iqn") return PolicyKind::IqnGreedy;
  if (name == "iqn-adaptive") return PolicyKind::IqnAdaptive;
  if (name == "random") return PolicyKind::Random;
  throw std::invalid_argument("unknown policy: " + name);
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Apf: return "apf";
    case PolicyKind::Rvo: return "rvo";
    case PolicyKind::Dqn: return "dqn";
    case PolicyKind::IqnGreedy: return "iqn";
    case PolicyKind::IqnAdaptive: return "iqn-adaptive";
    case PolicyKind::Random: return "random";
  }
  return "?";
}

Action policy_action(const PolicyContext& ctx, const World& world, std::size_t robot_id,
                     std::mt19937_64& rng) {
  switch (ctx.kind) {
    case PolicyKind::Apf:
      return apf_policy(make_world_view(world, robot_id), ctx.apf);
    case PolicyKind::Rvo: {
      RvoParams params = ctx.rvo;
      params.preferred_speed = world.params.v_max;
      return rvo_policy(make_world_view(world, robot_id), params);
    }
    case PolicyKind::Dqn:
      return action_from_index(rl::dqn_select_action(*ctx.model, observe(world, robot_id)));
    case PolicyKind::IqnGreedy:
      return action_from_index(rl::iqn_select_action(*ctx.model, observe(world, robot_id), 1.0,
                                                     rng, ctx.num_tau_action));
    case PolicyKind::IqnAdaptive: {
      const double phi =
          rl::adaptive_cvar_threshold(make_world_view(world, robot_id), ctx.adaptive_d0);
      return action_from_index(rl::iqn_select_action(*ctx.model, observe(world, robot_id), phi,
                                                     rng, ctx.num_tau_action));
    }
    case PolicyKind::Random: {
      std::uniform_int_distribution<int> dist(0, kNumActions - 1);
      return action_from_index(dist(rng));
    }
  }
  throw std::logic_error("policy_action: unreachable");
}

EpisodeRecord run_episode(const World& initial, const PolicyContext& ctx, int timeout_steps,
                          std::mt19937_64& rng) {
  if ((ctx.kind == PolicyKind::Dqn || ctx.kind == PolicyKind::IqnGreedy ||
       ctx.kind == PolicyKind::IqnAdaptive) &&
      ctx.model == nullptr)
    throw std::invalid_argument("run_episode: RL policy without a model");

  EpisodeRecord record;
  record.scenario = initial;
  World world = initial;
  const std::size_t n = world.robots.size();
  record.robot_steps.resize(n);
  record.travel_time.assign(n, 0.0);
  record.energy.assign(n, 0.0);

  for (int step = 0; step < timeout_steps; ++step) {
    bool any_active = false;
    std::vector<Action> actions(n);
    const std::vector<RobotState> prev = world.robots;
    for (std::size_t i = 0; i < n; ++i) {
      if (world.robots[i].status != RobotStatus::Active) continue;
      any_active = true;
      actions[i] = policy_action(ctx, world, i, rng);
      record.energy[i] += train::action_energy(actions[i]);
    }
    if (!any_active) break;
    step_world(world, actions);
    for (std::size_t i = 0; i < n; ++i) {
      if (prev[i].status != RobotStatus::Active) continue;
      StepRow row;
      row.t = world.sim_time;
      row.position = world.robots[i].position;
      row.heading = world.robots[i].heading;
      row.speed = world.robots[i].steer_speed;
      row.accel = actions[i].accel;
      row.turn_rate = actions[i].turn_rate;
      row.status = world.robots[i].status;
      row.reward = reward(prev[i], world.robots[i], world.robots[i].status);
      record.robot_steps[i].push_back(row);
      if (world.robots[i].status == RobotStatus::ReachedGoal)
        record.travel_time[i] = world.sim_time;
    }
  }

  record.outcomes.resize(n);
  for (std::size_t i = 0; i < n; ++i) record.outcomes[i] = world.robots[i].status;
  record.success = std::all_of(record.outcomes.begin(), record.outcomes.end(),
                               [](RobotStatus s) { return s == RobotStatus::ReachedGoal; });
  return record;
}

CurriculumLevel suite_level(const ExperimentConfig& config, int level_index) {
  if (level_index < 0 || level_index >= kSuiteLevels)
    throw std::out_of_range("suite_level: level index");
  CurriculumLevel level;
  level.num_robots = 3 + level_index;
  level.num_vortices = level.num_robots + 1;
  level.num_obstacles = config.suite == SuiteKind::Mixed ? level.num_robots + 1 : 0;
  level.min_start_goal_distance = config.min_start_goal_distance;
  return level;
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace

World generate_suite_scenario(const ExperimentConfig& config, int level_index, int episode) {
  std::mt19937_64 rng(mix_seed(config.seed, level_index, episode));
  return generate_environment(suite_level(config, level_index), config.world, rng);
}

SuiteResult run_experiment_suite(const ExperimentConfig& config) {
  PolicyContext ctx;
  ctx.kind = config.policy;
  ctx.num_tau_action = config.num_tau_action;
  ctx.adaptive_d0 = config.adaptive_d0;

  rl::Checkpoint ckpt;
  const bool needs_model = config.policy == PolicyKind::Dqn ||
                           config.policy == PolicyKind::IqnGreedy ||
                           config.policy == PolicyKind::IqnAdaptive;
  if (needs_model) {
    if (config.checkpoint_path.empty())
      throw std::invalid_argument("run_experiment_suite: RL policy requires a checkpoint");
    ckpt = rl::load_checkpoint(config.checkpoint_path);
    ctx.model = &ckpt.model;
  }

  const int timeout_steps =
      static_cast<int>(std::llround(config.timeout_seconds / config.world.dt));

  SuiteResult result;
  for (int level = 0; level < kSuiteLevels; ++level) {
    for (int episode = 0; episode < config.episodes_per_level; ++episode) {
      const World scenario = generate_suite_scenario(config, level, episode);
      std::mt19937_64 episode_rng(mix_seed(config.seed ^ 0xa5a5a5a5a5a5a5a5ULL, level, episode));
      EpisodeRecord record = run_episode(scenario, ctx, timeout_steps, episode_rng);
      record.level = 3 + level;  // robot count is the level key
      record.episode_index = episode;
      record.scenario_json = scenario_to_json(scenario, config.seed);
      result.records.push_back(std::move(record));
    }
  }
  result.metrics = compute_metrics(result.records);
  return result;
}

namespace {

Quartiles quartiles_of(std::vector<double> values) {
  Quartiles q;
  q.count = static_cast<int>(values.size());
  if (values.empty()) return q;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  q.mean = sum / values.size();
  auto at = [&](double p) {
    const double pos = p * (values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - lo;
    return values[lo] * (1.0 - frac) + values[hi] * frac;
  };
  q.q1 = at(0.25);
  q.median = at(0.5);
  q.q3 = at(0.75);
  return q;
}

}  // namespace

MetricsSummary compute_metrics(const std::vector<EpisodeRecord>& records) {
  if (records.empty()) throw std::invalid_argument("compute_metrics: no records");

  std::map<int, std::vector<const EpisodeRecord*>> by_level;
  for (const auto& r : records) by_level[r.level].push_back(&r);

  MetricsSummary summary;
  for (const auto& [level, recs] : by_level) {
    LevelMetrics m;
    m.level = level;
    m.episodes = static_cast<int>(recs.size());
    int successes = 0;
    std::vector<double> times, energies;
    for (const EpisodeRecord* r : recs) {
      if (!r->success) continue;
      ++successes;
      for (std::size_t i = 0; i < r->travel_time.size(); ++i) {
        times.push_back(r->travel_time[i]);
        energies.push_back(r->energy[i]);
      }
    }
    m.success_rate = static_cast<double>(successes) / recs.size();
    m.travel_time = quartiles_of(std::move(times));
    m.energy = quartiles_of(std::move(energies));
    summary.levels.push_back(m);
  }
  return summary;
}

std::string metrics_to_json(const MetricsSummary& metrics) {
  nlohmann::json j;
  j["levels"] = nlohmann::json::array();
  auto quart = [](const Quartiles& q) {
    return nlohmann::json{
        {"mean", q.mean}, {"q1", q.q1}, {"median", q.median}, {"q3", q.q3}, {"count", q.count}};
  };
  for (const auto& m : metrics.levels) {
    j["levels"].push_back({{"level", m.level},
                           {"episodes", m.episodes},
                           {"success_rate", m.success_rate},
                           {"travel_time", quart(m.travel_time)},
                           {"energy", quart(m.energy)}});
  }
  return j.dump(2);
}

}  // namespace vnav::eval
