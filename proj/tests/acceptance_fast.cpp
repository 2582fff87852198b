#include <cmath>
#include <random>
#include <vector>

#include "acceptance_util.hpp"
#include "fd_util.hpp"
#include "vnav/apf.hpp"
#include "vnav/envgen.hpp"
#include "vnav/eval/experiment.hpp"
#include "vnav/nn/layers.hpp"
#include "vnav/nn/losses.hpp"
#include "vnav/rvo.hpp"
#include "vnav/scenario.hpp"
#include "vnav/train/trainer.hpp"

using namespace vnav;
using acceptance::require;
using acceptance::require_close;

namespace {

void physics_suite() {
  // tangential-flow continuity across the core boundary
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> gamma_dist(-4.0 * M_PI, 4.0 * M_PI);
  std::uniform_real_distribution<double> radius_dist(0.5, 8.0);
  std::uniform_real_distribution<double> coord(-20.0, 20.0);
  for (int i = 0; i < 50; ++i) {
    double g = gamma_dist(rng);
    if (std::abs(g) < 0.1) g = 0.1;
    const Vortex v{{coord(rng), coord(rng)}, g, radius_dist(rng)};
    const double eps = 1e-6;
    const double inner = rankine_velocity(v, {v.center.x + v.core_radius - eps, v.center.y}).norm();
    const double outer = rankine_velocity(v, {v.center.x + v.core_radius + eps, v.center.y}).norm();
    require(std::abs(inner - outer) < 1e-9, "speed profile discontinuous at the core radius");

    const Vec2 p{coord(rng), coord(rng)};
    const Vec2 radial = p - v.center;
    if (radial.norm() > 1e-9) {
      const double along = rankine_velocity(v, p).dot(radial / radial.norm());
      require(std::abs(along) < 1e-12, "nonzero radial flow component");
    }
  }

  // steering speed saturates at the limits
  WorldParams params;
  RobotState r;
  r.steer_speed = 1.9;
  require(std::abs(step_robot(r, {0.4, 0.0}, {}, params).steer_speed - 1.98) < 1e-12,
          "speed update below the limit is unclamped");
  r.steer_speed = 2.0;
  require(step_robot(r, {0.4, 0.0}, {}, params).steer_speed == 2.0, "speed exceeds v_max");
  r.steer_speed = 0.02;
  require(step_robot(r, {-0.4, 0.0}, {}, params).steer_speed == 0.0, "speed fell below zero");

  // observations are invariant under a global rotation about the ego
  std::uniform_real_distribution<double> ws(5.0, 45.0);
  for (int trial = 0; trial < 10; ++trial) {
    World world;
    for (int k = 0; k < 3; ++k) {
      RobotState robot;
      robot.position = {ws(rng), ws(rng)};
      robot.goal = {ws(rng), ws(rng)};
      robot.heading = coord(rng) / 10.0;
      robot.steer_speed = 1.0;
      world.robots.push_back(robot);
    }
    world.obstacles.push_back({{ws(rng), ws(rng)}, 1.0});
    world.vortices.push_back({{ws(rng), ws(rng)}, 2.0 * M_PI, 3.0});

    const Observation before = observe(world, 0);
    const double alpha = 0.4 + 0.2 * trial;
    const Vec2 pivot = world.robots[0].position;
    auto spin = [&](Vec2 p) { return pivot + rotate(p - pivot, alpha); };
    for (auto& robot : world.robots) {
      robot.position = spin(robot.position);
      robot.goal = spin(robot.goal);
      robot.heading = wrap_angle(robot.heading + alpha);
    }
    for (auto& o : world.obstacles) o.center = spin(o.center);
    for (auto& v : world.vortices) v.center = spin(v.center);
    const Observation after = observe(world, 0);
    for (int i = 0; i < kObservationSize; ++i) {
      require(std::abs(before[i] - after[i]) < 1e-9, "observation changed under frame rotation");
    }
  }
}

void numerics_suite() {
  double worst = 0.0;
  const double h = 1e-5;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    // single linear layer, every parameter
    {
      nn::Linear layer = nn::make_linear(4, 3, rng);
      nn::Matrix x(2, 4);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 4; ++j) x(i, j) = unit(rng);
      auto loss_of = [&](const nn::Linear& l) {
        const nn::Matrix y = nn::relu(nn::linear_forward(l, x));
        double s = 0.0;
        for (int i = 0; i < y.rows(); ++i)
          for (int j = 0; j < y.cols(); ++j) s += 0.5 * y(i, j) * y(i, j);
        return s;
      };
      nn::LinearGrad grad = nn::make_linear_grad(layer);
      const nn::Matrix pre = nn::linear_forward(layer, x);
      // keep the finite-difference window clear of the rectifier kinks
      bool kink_free = true;
      for (int i = 0; i < pre.rows(); ++i)
        for (int j = 0; j < pre.cols(); ++j) kink_free = kink_free && std::abs(pre(i, j)) > 1e-3;
      if (!kink_free) continue;
      nn::linear_backward(layer, x, nn::relu_backward(pre, nn::relu(pre)), grad);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 4; ++j) {
          nn::Linear bumped = layer;
          bumped.weights(i, j) += h;
          const double up = loss_of(bumped);
          bumped.weights(i, j) -= 2.0 * h;
          const double down = loss_of(bumped);
          const double fd = (up - down) / (2.0 * h);
          const double denom = std::max({1e-5, std::abs(fd), std::abs(grad.d_weights(i, j))});
          worst = std::max(worst, std::abs(fd - grad.d_weights(i, j)) / denom);
        }
        nn::Linear bumped = layer;
        bumped.bias[i] += h;
        const double up = loss_of(bumped);
        bumped.bias[i] -= 2.0 * h;
        const double down = loss_of(bumped);
        const double fd = (up - down) / (2.0 * h);
        const double denom = std::max({1e-5, std::abs(fd), std::abs(grad.d_bias[i])});
        worst = std::max(worst, std::abs(fd - grad.d_bias[i]) / denom);
      }
    }

    // quantile Huber derivative
    for (int k = 0; k < 10; ++k) {
      double delta = 3.0 * unit(rng);
      if (std::abs(delta) < 1e-2 || std::abs(std::abs(delta) - 1.0) < 1e-2) delta += 0.05;
      const double tau = 0.05 + 0.45 * (unit(rng) + 1.0);
      const double fd =
          (nn::quantile_huber(delta + h, tau).loss - nn::quantile_huber(delta - h, tau).loss) /
          (2.0 * h);
      const double an = nn::quantile_huber(delta, tau).d_loss;
      worst = std::max(worst, std::abs(fd - an) / std::max({1e-5, std::abs(fd), std::abs(an)}));
    }

    // quantile regression loss equals the explicit double loop
    {
      const int n = 8;
      nn::Matrix deltas(n, n);
      std::vector<double> taus(n);
      for (int i = 0; i < n; ++i) {
        taus[i] = 0.05 + 0.45 * (unit(rng) + 1.0);
        for (int j = 0; j < n; ++j) deltas(i, j) = 2.0 * unit(rng);
      }
      const nn::MatrixLoss loss = nn::iqn_loss(deltas, taus);
      double oracle = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double u = deltas(i, j);
          const double l_k = std::abs(u) <= 1.0 ? 0.5 * u * u : std::abs(u) - 0.5;
          oracle += std::abs(taus[i] - (u < 0.0 ? 1.0 : 0.0)) * l_k;
        }
      }
      oracle /= n;
      require(std::abs(loss.loss - oracle) < 1e-12, "loss differs from the double-loop oracle");
    }

    // mean-squared-error loss gradient
    {
      std::vector<double> q(6), t(6);
      for (int i = 0; i < 6; ++i) {
        q[i] = 2.0 * unit(rng);
        t[i] = 2.0 * unit(rng);
      }
      const nn::VectorLoss loss = nn::dqn_loss(q, t);
      for (int i = 0; i < 6; ++i) {
        std::vector<double> up = q, down = q;
        up[i] += h;
        down[i] -= h;
        const double fd = (nn::dqn_loss(up, t).loss - nn::dqn_loss(down, t).loss) / (2.0 * h);
        worst = std::max(worst,
                         std::abs(fd - loss.grad[i]) /
                             std::max({1e-5, std::abs(fd), std::abs(loss.grad[i])}));
      }
    }

    // full quantile model end to end, random parameter subset
    {
      rl::Model model = rl::make_model(rl::ModelKind::Iqn, rng);
      Observation obs;
      for (auto& v : obs) v = unit(rng);
      const nn::Matrix obs_mat = rl::observation_matrix(obs);
      const std::vector<double> taus = {0.15, 0.4, 0.65, 0.9};
      nn::Matrix targets(1, 4);
      for (int j = 0; j < 4; ++j) targets(0, j) = unit(rng);
      const int action = seed % kNumActions;
      rl::ModelGrad grad = rl::make_model_grad(model);
      testutil::iqn_scalar_loss(model, obs_mat, taus, 0.8, targets, action, &grad);
      const std::vector<double> analytic = testutil::flatten_grads(grad);
      auto loss_fn = [&](rl::Model& m) {
        return testutil::iqn_scalar_loss(m, obs_mat, taus, 0.8, targets, action);
      };
      worst = std::max(worst, testutil::fd_max_rel_error(model, loss_fn, analytic, rng, 20));
    }
  }
  require(worst < 1e-4, "max gradient relative error " + std::to_string(worst));
}

void formula_spot_checks() {
  require_close(nn::quantile_huber(0.5, 0.5).loss, 0.0625, 1e-12, "huber pinball value");
  require_close(nn::quantile_huber(-2.0, 0.9).loss, 0.15, 1e-12, "huber pinball value");

  // sampled TD residual through stub networks with constant outputs
  {
    std::mt19937_64 rng(0);
    rl::Model online = rl::make_model(rl::ModelKind::Iqn, rng);
    rl::unflatten_params(online, std::vector<double>(rl::param_count(online), 0.0));
    rl::Model target = online;
    online.head3.bias.assign(kNumActions, 1.5);
    target.head3.bias.assign(kNumActions, 2.0);
    train::Transition tr;
    tr.action = 2;
    tr.reward = 1.0;
    const train::TdDeltas td = train::iqn_td_deltas(tr, online, target, 4, 4, 0.9, rng);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        require_close(td.deltas(i, j), 1.3, 1e-12, "TD residual");
  }

  // adaptive risk threshold at half the influence distance
  {
    WorldView view;
    view.position = {0.0, 0.0};
    view.statics.push_back({{5.0, 0.0}, 1.0});
    require_close(rl::adaptive_cvar_threshold(view, 10.0), 0.5, 1e-12, "adaptive threshold");
  }

  // exploration schedule endpoints
  {
    train::TrainConfig config;
    config.t_total = 1000000;
    require_close(train::epsilon_at(0, config), 0.6, 1e-12, "epsilon at start");
    require_close(train::epsilon_at(config.t_total, config), 0.05, 1e-12, "epsilon at end");
  }

  // step rewards
  {
    RobotState prev, next;
    prev.goal = next.goal = {10.0, 0.0};
    prev.position = {0.0, 0.0};
    next.position = {0.5, 0.0};
    require_close(reward(prev, next, RobotStatus::Active), -0.5, 1e-12, "step reward");
    next.position = {0.3, 0.0};
    require_close(reward(prev, next, RobotStatus::ReachedGoal), 99.3, 1e-12, "goal reward");
    next.position = {0.2, 0.0};
    require_close(reward(prev, next, RobotStatus::Collided), -50.8, 1e-12, "collision reward");
  }

  const VelocityCone cone = velocity_obstacle({0.0, 0.0}, 0.8, {3.2, 0.0}, 0.8, {0.0, 0.0});
  require_close(cone.half_angle, M_PI / 6.0, 1e-12, "collision cone half-angle");
}

void baseline_behavior() {
  // potential-field run past a single static obstacle, no current
  {
    World world;
    RobotState robot;
    robot.position = {5.0, 25.0};
    robot.heading = 0.0;
    robot.steer_speed = 1.0;
    robot.goal = {45.0, 25.0};
    world.robots.push_back(robot);
    world.obstacles.push_back({{25.0, 25.6}, 1.0});

    bool collided = false;
    for (int step = 0; step < 900 && world.robots[0].status == RobotStatus::Active; ++step) {
      const Action a = apf_policy(make_world_view(world, 0));
      step_world(world, {a});
      collided = collided || world.robots[0].status == RobotStatus::Collided;
    }
    require(!collided, "potential-field robot collided with the obstacle");
    require(world.robots[0].status == RobotStatus::ReachedGoal,
            "potential-field robot did not reach the goal");
  }

  // reciprocal-velocity run: two robots, symmetric head-on, no current
  {
    World world;
    RobotState a;
    a.position = {15.0, 25.0};
    a.heading = 0.0;
    a.steer_speed = 1.0;
    a.goal = {35.0, 25.0};
    world.robots.push_back(a);
    RobotState b;
    b.position = {35.0, 25.0};
    b.heading = -M_PI;
    b.steer_speed = 1.0;
    b.goal = {15.0, 25.0};
    world.robots.push_back(b);

    double min_separation = std::numeric_limits<double>::infinity();
    for (int step = 0; step < 900; ++step) {
      bool any_active = false;
      std::vector<Action> actions(2);
      for (std::size_t i = 0; i < 2; ++i) {
        if (world.robots[i].status != RobotStatus::Active) continue;
        any_active = true;
        actions[i] = rvo_policy(make_world_view(world, i));
      }
      if (!any_active) break;
      step_world(world, actions);
      min_separation = std::min(
          min_separation, (world.robots[0].position - world.robots[1].position).norm());
    }
    require(min_separation > 2.0 * world.params.robot_radius,
            "head-on separation dropped to " + std::to_string(min_separation));
    require(world.robots[0].status == RobotStatus::ReachedGoal &&
                world.robots[1].status == RobotStatus::ReachedGoal,
            "head-on robots did not both reach their goals");
  }
}

void protocol_conformance() {
  for (const eval::SuiteKind suite : {eval::SuiteKind::DynamicOnly, eval::SuiteKind::Mixed}) {
    eval::ExperimentConfig apf_config;
    apf_config.suite = suite;
    apf_config.policy = eval::PolicyKind::Apf;
    apf_config.seed = 2024;
    eval::ExperimentConfig iqn_config = apf_config;
    iqn_config.policy = eval::PolicyKind::IqnGreedy;

    require(apf_config.episodes_per_level == 100, "default episode count is not 100");
    require_close(apf_config.timeout_seconds / apf_config.world.dt, 900.0, 1e-12,
                  "timeout is not 180 simulated seconds");

    for (int level = 0; level < eval::kSuiteLevels; ++level) {
      for (int episode = 0; episode < apf_config.episodes_per_level; ++episode) {
        const World w = eval::generate_suite_scenario(apf_config, level, episode);
        require(static_cast<int>(w.robots.size()) == 3 + level, "robot count");
        require(static_cast<int>(w.vortices.size()) == 4 + level, "vortex count");
        const std::size_t expected_obstacles =
            suite == eval::SuiteKind::Mixed ? static_cast<std::size_t>(4 + level) : 0;
        require(w.obstacles.size() == expected_obstacles, "obstacle count");
        for (const auto& o : w.obstacles) require(o.radius == 1.0, "obstacle radius");
        for (const auto& r : w.robots) {
          require((r.goal - r.position).norm() >= 40.0, "start-goal distance below 40 m");
        }
        const World paired = eval::generate_suite_scenario(iqn_config, level, episode);
        require(scenario_to_json(w, 0) == scenario_to_json(paired, 0),
                "scenario bytes differ across policies");
      }
    }
  }

  // an episode fails exactly when some robot has not reached its goal in time
  eval::ExperimentConfig config;
  config.seed = 5;
  const World scenario = eval::generate_suite_scenario(config, 0, 0);
  eval::PolicyContext ctx;
  ctx.kind = eval::PolicyKind::Apf;
  std::mt19937_64 rng(1);
  const eval::EpisodeRecord rec = eval::run_episode(scenario, ctx, 10, rng);
  bool all_reached = true;
  for (const RobotStatus s : rec.outcomes) all_reached = all_reached && s == RobotStatus::ReachedGoal;
  require(rec.success == all_reached, "success flag does not match the outcomes");
  require(!rec.success, "episode cannot succeed within 10 steps over 40 m");
}

void determinism() {
  train::TrainConfig config;
  config.t_total = 400;
  config.t_eval_freq = 200;
  config.batch_size = 16;
  config.num_tau = 4;
  config.num_tau_action = 8;
  config.l_episode_max = 100;
  config.buffer_capacity = 2000;
  config.seed = 12;
  const train::CurriculumSchedule schedule = train::default_schedule(config.t_total);

  const train::TrainResult a = train::train(config, schedule);
  const train::TrainResult b = train::train(config, schedule);
  require(a.eval_log.size() == b.eval_log.size(), "training eval logs differ in length");
  for (std::size_t i = 0; i < a.eval_log.size(); ++i) {
    require(train::eval_record_to_json(a.eval_log[i]) == train::eval_record_to_json(b.eval_log[i]),
            "training eval metrics differ between identical runs");
  }
  const std::vector<double> pa = rl::flatten_params(a.checkpoint.model);
  const std::vector<double> pb = rl::flatten_params(b.checkpoint.model);
  require(pa == pb, "trained parameters differ between identical runs");

  eval::ExperimentConfig eval_config;
  eval_config.policy = eval::PolicyKind::Rvo;
  eval_config.episodes_per_level = 2;
  eval_config.seed = 77;
  const eval::SuiteResult ra = eval::run_experiment_suite(eval_config);
  const eval::SuiteResult rb = eval::run_experiment_suite(eval_config);
  require(eval::metrics_to_json(ra.metrics) == eval::metrics_to_json(rb.metrics),
          "evaluation metrics differ between identical runs");
}

}  // namespace

int main() {
  acceptance::Reporter reporter;
  reporter.run(1, "physics suite", physics_suite);
  reporter.run(2, "numerics suite", numerics_suite);
  reporter.run(3, "formula spot-checks", formula_spot_checks);
  reporter.run(4, "baseline behavior", baseline_behavior);
  reporter.run(7, "protocol conformance", protocol_conformance);
  reporter.run(8, "determinism", determinism);
  return reporter.exit_code();
}
