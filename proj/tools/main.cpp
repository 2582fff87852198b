#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vnav/eval/recording.hpp"
#include "vnav/scenario.hpp"
#include "vnav/train/trainer.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int cmd_train(const std::string& config_path, std::uint64_t seed, bool seed_set,
              const std::string& out_dir) {
  vnav::train::TrainConfig config;
  if (!config_path.empty()) config = vnav::train::load_train_config(config_path);
  if (seed_set) config.seed = seed;

  fs::create_directories(out_dir);
  std::ofstream(out_dir + "/config.json") << vnav::train::train_config_to_json(config) << "\n";

  const auto schedule = vnav::train::default_schedule(config.t_total);
  const auto result = vnav::train::train(config, schedule, out_dir);

  std::cout << "training finished: " << result.checkpoint.training_step << " steps, checkpoint "
            << out_dir << "/ckpt_final.json\n";
  return 0;
}

vnav::eval::ExperimentConfig make_experiment_config(const std::string& policy,
                                                    const std::string& model_path,
                                                    const std::string& suite, int episodes,
                                                    std::uint64_t seed) {
  vnav::eval::ExperimentConfig config;
  config.policy = vnav::eval::policy_kind_from_string(policy);
  config.checkpoint_path = model_path;
  if (suite == "dynamic") {
    config.suite = vnav::eval::SuiteKind::DynamicOnly;
  } else if (suite == "mixed") {
    config.suite = vnav::eval::SuiteKind::Mixed;
  } else {
    throw std::runtime_error("unknown suite: " + suite);
  }
  config.episodes_per_level = episodes;
  config.seed = seed;
  return config;
}

int cmd_eval(const vnav::eval::ExperimentConfig& config, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const auto result = vnav::eval::run_experiment_suite(config);

  std::ofstream(out_dir + "/metrics.json") << vnav::eval::metrics_to_json(result.metrics) << "\n";
  vnav::eval::export_trajectories(result.records, out_dir + "/trajectories.csv");
  vnav::eval::render_metrics_svg(result.metrics, out_dir + "/success_rates.svg");

  std::ofstream scenarios(out_dir + "/scenarios.jsonl");
  for (const auto& record : result.records) {
    scenarios << nlohmann::json::parse(record.scenario_json).dump() << "\n";
  }

  for (const auto& m : result.metrics.levels) {
    std::cout << "level " << m.level << ": success " << m.success_rate << " over " << m.episodes
              << " episodes\n";
  }
  return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& policy,
                 const std::string& model_path, std::uint64_t seed, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const vnav::World world = vnav::load_scenario(scenario_path);

  vnav::eval::PolicyContext ctx;
  ctx.kind = vnav::eval::policy_kind_from_string(policy);
  vnav::rl::Checkpoint ckpt;
  if (ctx.kind == vnav::eval::PolicyKind::Dqn || ctx.kind == vnav::eval::PolicyKind::IqnGreedy ||
      ctx.kind == vnav::eval::PolicyKind::IqnAdaptive) {
    if (model_path.empty()) throw std::runtime_error("RL policy requires --model");
    ckpt = vnav::rl::load_checkpoint(model_path);
    ctx.model = &ckpt.model;
  }

  const int timeout_steps = static_cast<int>(std::llround(180.0 / world.params.dt));
  std::mt19937_64 rng(seed);
  auto record = vnav::eval::run_episode(world, ctx, timeout_steps, rng);
  record.scenario_json = vnav::scenario_to_json(world, seed);

  vnav::eval::export_trajectories(record, out_dir + "/trajectory.csv");
  vnav::eval::render_svg(record, out_dir + "/episode.svg");

  nlohmann::json summary;
  summary["success"] = record.success;
  summary["outcomes"] = nlohmann::json::array();
  for (std::size_t i = 0; i < record.outcomes.size(); ++i) {
    summary["outcomes"].push_back(
        {{"robot", i},
         {"reached_goal", record.outcomes[i] == vnav::RobotStatus::ReachedGoal},
         {"travel_time", record.travel_time[i]},
         {"energy", record.energy[i]}});
  }
  std::ofstream(out_dir + "/summary.json") << summary.dump(2) << "\n";
  std::cout << (record.success ? "success" : "failure") << "\n";
  return 0;
}

int cmd_plot(const std::string& metrics_path, const std::string& out_path) {
  const auto metrics = vnav::eval::metrics_from_json(read_file(metrics_path));
  vnav::eval::render_metrics_svg(metrics, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-robot collision-avoidance simulator and policy suite"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", policy = "apf", model_path, suite = "dynamic";
  std::string scenario_path, metrics_path, out_path;
  std::uint64_t seed = 0;
  int episodes = 100;

  auto* train = app.add_subcommand("train", "train an IQN or DQN policy");
  train->add_option("--config", config_path, "training config JSON");
  auto* train_seed = train->add_option("--seed", seed, "rng seed (overrides config)");
  train->add_option("--out", out_dir, "output directory")->required();

  auto* eval = app.add_subcommand("eval", "run an experiment suite");
  eval->add_option("--policy", policy, "apf|rvo|dqn|iqn|iqn-adaptive|random")->required();
  eval->add_option("--model", model_path, "checkpoint path (RL policies)");
  eval->add_option("--suite", suite, "dynamic|mixed");
  eval->add_option("--episodes-per-level", episodes, "episodes per level");
  eval->add_option("--seed", seed, "rng seed");
  eval->add_option("--out", out_dir, "output directory")->required();

  auto* simulate = app.add_subcommand("simulate", "replay one scenario");
  simulate->add_option("--scenario", scenario_path, "scenario JSON")->required();
  simulate->add_option("--policy", policy, "apf|rvo|dqn|iqn|iqn-adaptive|random")->required();
  simulate->add_option("--model", model_path, "checkpoint path (RL policies)");
  simulate->add_option("--seed", seed, "rng seed");
  simulate->add_option("--out", out_dir, "output directory")->required();

  auto* plot = app.add_subcommand("plot", "render metrics JSON as SVG");
  plot->add_option("--metrics", metrics_path, "metrics JSON path")->required();
  plot->add_option("--out", out_path, "output SVG path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(config_path, seed, train_seed->count() > 0, out_dir);
    if (eval->parsed())
      return cmd_eval(make_experiment_config(policy, model_path, suite, episodes, seed), out_dir);
    if (simulate->parsed()) return cmd_simulate(scenario_path, policy, model_path, seed, out_dir);
    if (plot->parsed()) return cmd_plot(metrics_path, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
