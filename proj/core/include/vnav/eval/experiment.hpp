#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vnav/apf.hpp"
#include "vnav/envgen.hpp"
#include "vnav/rl/model.hpp"
#include "vnav/rvo.hpp"

namespace vnav::eval {

enum class PolicyKind { Apf, Rvo, Dqn, IqnGreedy, IqnAdaptive, Random };

PolicyKind policy_kind_from_string(const std::string& name);
std::string to_string(PolicyKind kind);

struct PolicyContext {
  PolicyKind kind = PolicyKind::Apf;
  const rl::Model* model = nullptr;  // required for Dqn / Iqn*
  ApfParams apf;
  RvoParams rvo;
  double adaptive_d0 = 10.0;
  int num_tau_action = 32;
};

Action policy_action(const PolicyContext& ctx, const World& world, std::size_t robot_id,
                     std::mt19937_64& rng);

struct StepRow {
  double t = 0.0;
  Vec2 position;
  double heading = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  double turn_rate = 0.0;
  double reward = 0.0;
  RobotStatus status = RobotStatus::Active;
};

struct EpisodeRecord {
  int level = 0;
  int episode_index = 0;
  std::string scenario_json;
  World scenario;  // initial world snapshot
  std::vector<std::vector<StepRow>> robot_steps;
  std::vector<RobotStatus> outcomes;
  std::vector<double> travel_time;  // s, time of goal arrival (0 if none)
  std::vector<double> energy;       // sum of normalized action magnitudes
  bool success = false;             // every robot reached its goal in time
};

// Run one scenario to termination or timeout_steps.
EpisodeRecord run_episode(const World& initial, const PolicyContext& ctx, int timeout_steps,
                          std::mt19937_64& rng);

enum class SuiteKind { DynamicOnly, Mixed };

struct ExperimentConfig {
  SuiteKind suite = SuiteKind::DynamicOnly;
  int episodes_per_level = 100;
  double min_start_goal_distance = 40.0;  // m
  double timeout_seconds = 180.0;         // simulated
  PolicyKind policy = PolicyKind::Apf;
  std::string checkpoint_path;  // RL policies only
  std::uint64_t seed = 0;
  WorldParams world;
  int num_tau_action = 32;
  double adaptive_d0 = 10.0;
};

// Levels pair robot count k in {3..7} with k+1 vortices, and k+1 obstacles
// in the Mixed suite. Scenario generation depends only on (config minus
// policy, seed), so suites are paired across policies.
CurriculumLevel suite_level(const ExperimentConfig& config, int level_index);
World generate_suite_scenario(const ExperimentConfig& config, int level_index, int episode);

struct Quartiles {
  double mean = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0;
  int count = 0;
};

struct LevelMetrics {
  int level = 0;  // robot count
  int episodes = 0;
  double success_rate = 0.0;
  Quartiles travel_time;
  Quartiles energy;
};

struct MetricsSummary {
  std::vector<LevelMetrics> levels;
};

inline constexpr int kSuiteLevels = 5;

struct SuiteResult {
  MetricsSummary metrics;
  std::vector<EpisodeRecord> records;
};

SuiteResult run_experiment_suite(const ExperimentConfig& config);

// Success rate and travel-time/energy distributions; robots in failed
// episodes are excluded from the distributions. Throws on empty input.
MetricsSummary compute_metrics(const std::vector<EpisodeRecord>& records);

std::string metrics_to_json(const MetricsSummary& metrics);

}  // namespace vnav::eval
