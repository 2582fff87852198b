#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "vnav/eval/experiment.hpp"
#include "vnav/eval/recording.hpp"
#include "vnav/scenario.hpp"

using namespace vnav;

namespace {

eval::EpisodeRecord synthetic_episode(int level, bool success, double time_a, double time_b,
                                      double energy_a, double energy_b) {
  eval::EpisodeRecord rec;
  rec.level = level;
  rec.success = success;
  rec.outcomes = {success ? RobotStatus::ReachedGoal : RobotStatus::Collided,
                  RobotStatus::ReachedGoal};
  rec.travel_time = {time_a, time_b};
  rec.energy = {energy_a, energy_b};
  rec.robot_steps.resize(2);
  for (int r = 0; r < 2; ++r) {
    for (int k = 0; k < 3; ++k) {
      eval::StepRow row;
      row.t = 0.2 * k;
      row.position = {1.0 * r + 0.1 * k, 2.0 - 0.1 * k};
      row.heading = 0.3 * k;
      row.speed = 1.0;
      rec.robot_steps[r].push_back(row);
    }
  }
  World w;
  for (int r = 0; r < 2; ++r) {
    RobotState s;
    s.position = {1.0 * r, 2.0};
    s.goal = {10.0 + r, 12.0};
    w.robots.push_back(s);
  }
  rec.scenario = w;
  rec.scenario_json = scenario_to_json(w, 0);
  return rec;
}

}  // namespace

TEST_CASE("policy names round-trip") {
  for (const char* name : {"apf", "rvo", "dqn", "iqn", "iqn-adaptive", "random"}) {
    CHECK(eval::to_string(eval::policy_kind_from_string(name)) == name);
  }
  CHECK_THROWS(eval::policy_kind_from_string("unknown"));
}

TEST_CASE("suite levels: robot and vortex counts, mixed adds obstacles") {
  eval::ExperimentConfig config;
  config.suite = eval::SuiteKind::DynamicOnly;
  for (int i = 0; i < eval::kSuiteLevels; ++i) {
    const CurriculumLevel level = eval::suite_level(config, i);
    CHECK(level.num_robots == 3 + i);
    CHECK(level.num_vortices == 4 + i);
    CHECK(level.num_obstacles == 0);
    CHECK(level.min_start_goal_distance == 40.0);
  }
  config.suite = eval::SuiteKind::Mixed;
  for (int i = 0; i < eval::kSuiteLevels; ++i) {
    CHECK(eval::suite_level(config, i).num_obstacles == 4 + i);
  }
}

TEST_CASE("suite scenarios are paired across policies and vary by episode") {
  eval::ExperimentConfig apf_config;
  apf_config.policy = eval::PolicyKind::Apf;
  apf_config.seed = 11;
  eval::ExperimentConfig rvo_config = apf_config;
  rvo_config.policy = eval::PolicyKind::Rvo;

  for (int level = 0; level < 2; ++level) {
    for (int episode = 0; episode < 3; ++episode) {
      const World a = eval::generate_suite_scenario(apf_config, level, episode);
      const World b = eval::generate_suite_scenario(rvo_config, level, episode);
      CHECK(scenario_to_json(a, 0) == scenario_to_json(b, 0));
      for (const auto& r : a.robots) CHECK((r.goal - r.position).norm() >= 40.0);
      for (const auto& o : a.obstacles) CHECK(o.radius == 1.0);
    }
  }

  const World e0 = eval::generate_suite_scenario(apf_config, 0, 0);
  const World e1 = eval::generate_suite_scenario(apf_config, 0, 1);
  CHECK(scenario_to_json(e0, 0) != scenario_to_json(e1, 0));

  eval::ExperimentConfig reseeded = apf_config;
  reseeded.seed = 12;
  const World other = eval::generate_suite_scenario(reseeded, 0, 0);
  CHECK(scenario_to_json(e0, 0) != scenario_to_json(other, 0));
}

TEST_CASE("episode run: bookkeeping, timeout, and deactivation") {
  eval::ExperimentConfig config;
  config.seed = 3;
  const World start = eval::generate_suite_scenario(config, 0, 0);
  eval::PolicyContext ctx;
  ctx.kind = eval::PolicyKind::Apf;
  std::mt19937_64 rng(1);
  const eval::EpisodeRecord rec = eval::run_episode(start, ctx, 50, rng);

  REQUIRE(rec.robot_steps.size() == start.robots.size());
  REQUIRE(rec.outcomes.size() == start.robots.size());
  for (std::size_t r = 0; r < rec.robot_steps.size(); ++r) {
    CHECK(rec.robot_steps[r].size() <= 50);
    CHECK(!rec.robot_steps[r].empty());
    // time stamps advance by dt
    for (std::size_t k = 1; k < rec.robot_steps[r].size(); ++k) {
      CHECK(rec.robot_steps[r][k].t ==
            doctest::Approx(rec.robot_steps[r][k - 1].t + 0.2).epsilon(1e-9));
    }
    if (rec.outcomes[r] == RobotStatus::ReachedGoal) {
      CHECK(rec.travel_time[r] > 0.0);
    }
    CHECK(rec.energy[r] >= 0.0);
  }
  // 50 steps is far too few to cross 40 m at 2 m/s
  CHECK(!rec.success);
}

TEST_CASE("metrics: success rate, exclusion of failed episodes, quartiles") {
  std::vector<eval::EpisodeRecord> records;
  records.push_back(synthetic_episode(3, true, 10.0, 20.0, 1.0, 2.0));
  records.push_back(synthetic_episode(3, true, 30.0, 40.0, 3.0, 4.0));
  records.push_back(synthetic_episode(3, true, 50.0, 60.0, 5.0, 6.0));
  records.push_back(synthetic_episode(3, false, 0.0, 70.0, 9.0, 9.0));

  const eval::MetricsSummary summary = eval::compute_metrics(records);
  REQUIRE(summary.levels.size() == 1);
  const eval::LevelMetrics& m = summary.levels[0];
  CHECK(m.level == 3);
  CHECK(m.episodes == 4);
  CHECK(m.success_rate == doctest::Approx(0.75).epsilon(1e-12));

  // only the six robots from successful episodes contribute
  CHECK(m.travel_time.count == 6);
  CHECK(m.travel_time.mean == doctest::Approx(35.0).epsilon(1e-12));
  CHECK(m.travel_time.median == doctest::Approx(35.0).epsilon(1e-12));
  CHECK(m.energy.mean == doctest::Approx(3.5).epsilon(1e-12));
  // linear interpolation quartiles of {1..6}
  CHECK(m.energy.q1 == doctest::Approx(2.25).epsilon(1e-12));
  CHECK(m.energy.q3 == doctest::Approx(4.75).epsilon(1e-12));

  CHECK_THROWS(eval::compute_metrics({}));
}

TEST_CASE("metrics JSON round-trips") {
  std::vector<eval::EpisodeRecord> records;
  records.push_back(synthetic_episode(4, true, 12.0, 14.0, 2.0, 2.5));
  records.push_back(synthetic_episode(5, false, 0.0, 9.0, 1.0, 1.0));
  const eval::MetricsSummary summary = eval::compute_metrics(records);
  const eval::MetricsSummary loaded = eval::metrics_from_json(eval::metrics_to_json(summary));
  REQUIRE(loaded.levels.size() == summary.levels.size());
  for (std::size_t i = 0; i < loaded.levels.size(); ++i) {
    CHECK(loaded.levels[i].level == summary.levels[i].level);
    CHECK(loaded.levels[i].success_rate ==
          doctest::Approx(summary.levels[i].success_rate).epsilon(1e-12));
    CHECK(loaded.levels[i].travel_time.mean ==
          doctest::Approx(summary.levels[i].travel_time.mean).epsilon(1e-12));
  }
}

TEST_CASE("trajectory CSV export and parse round-trip") {
  const eval::EpisodeRecord rec = synthetic_episode(3, true, 10.0, 12.0, 1.0, 1.5);
  const std::string path = "trajectories_test.csv";
  eval::export_trajectories(rec, path);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "episode_id,robot_id,t,x,y,theta,speed,accel,turn_rate,reward,status");

  int rows = 0;
  std::string line;
  int prev_robot = -1;
  double prev_t = -1.0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() == 11);
    const int robot = std::stoi(fields[1]);
    const double t = std::stod(fields[2]);
    if (robot == prev_robot) {
      CHECK(t > prev_t);  // robot-major, time-minor ordering
    }
    prev_robot = robot;
    prev_t = t;

    const int local = rows % 3;
    const int r = rows / 3;
    CHECK(std::abs(std::stod(fields[3]) - rec.robot_steps[r][local].position.x) < 1e-9);
    CHECK(std::abs(std::stod(fields[5]) - rec.robot_steps[r][local].heading) < 1e-9);
    ++rows;
  }
  in.close();
  std::remove(path.c_str());
  CHECK(rows == 6);
}

TEST_CASE("episode and metrics SVG renderings are well formed") {
  const eval::EpisodeRecord rec = synthetic_episode(3, true, 10.0, 12.0, 1.0, 1.5);
  const std::string path = "episode_test.svg";
  eval::render_svg(rec, path);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  std::remove(path.c_str());
  CHECK(text.find("<svg") != std::string::npos);
  CHECK(text.rfind("</svg>") != std::string::npos);
  CHECK(text.find("polyline") != std::string::npos);

  const eval::MetricsSummary summary = eval::compute_metrics({rec});
  const std::string bars = "metrics_test.svg";
  eval::render_metrics_svg(summary, bars);
  std::ifstream bin(bars);
  std::string btext((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
  bin.close();
  std::remove(bars.c_str());
  CHECK(btext.find("<svg") != std::string::npos);
  CHECK(btext.find("rect") != std::string::npos);
}

TEST_CASE("random policy produces valid actions and respects pairing") {
  eval::ExperimentConfig config;
  config.seed = 5;
  const World start = eval::generate_suite_scenario(config, 0, 0);
  eval::PolicyContext ctx;
  ctx.kind = eval::PolicyKind::Random;
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    const Action a = eval::policy_action(ctx, start, 0, rng);
    CHECK_NOTHROW(action_index(a));
  }
}

TEST_CASE("rl policies require a model") {
  eval::ExperimentConfig config;
  config.seed = 5;
  const World start = eval::generate_suite_scenario(config, 0, 0);
  eval::PolicyContext ctx;
  ctx.kind = eval::PolicyKind::Dqn;
  std::mt19937_64 rng(9);
  CHECK_THROWS_AS(eval::run_episode(start, ctx, 10, rng), std::invalid_argument);
}
