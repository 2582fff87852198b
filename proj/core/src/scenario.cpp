#include "vnav/scenario.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace vnav {

namespace {

using nlohmann::json;

json vec_to_json(const Vec2& v) { return json::array({v.x, v.y}); }

Vec2 vec_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::runtime_error("scenario: bad vector");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

std::string scenario_to_json(const World& world, std::uint64_t seed) {
  json j;
  j["params"] = {{"dt", world.params.dt},
                 {"v_max", world.params.v_max},
                 {"robot_radius", world.params.robot_radius},
                 {"goal_threshold", world.params.goal_threshold},
                 {"detection_range", world.params.detection_range},
                 {"workspace_extent", world.params.workspace_extent}};
  j["robots"] = json::array();
  for (const auto& r : world.robots) {
    j["robots"].push_back({{"start", vec_to_json(r.position)}, {"goal", vec_to_json(r.goal)}});
  }
  j["obstacles"] = json::array();
  for (const auto& o : world.obstacles) {
    j["obstacles"].push_back({{"center", vec_to_json(o.center)}, {"radius", o.radius}});
  }
  j["vortices"] = json::array();
  for (const auto& v : world.vortices) {
    j["vortices"].push_back(
        {{"center", vec_to_json(v.center)}, {"gamma", v.circulation_gamma}, {"r0", v.core_radius}});
  }
  j["seed"] = seed;
  return j.dump(2);
}

World scenario_from_json(const std::string& text, std::uint64_t* seed_out) {
  const json j = json::parse(text);
  World world;
  const json& p = j.at("params");
  world.params.dt = p.at("dt").get<double>();
  world.params.v_max = p.at("v_max").get<double>();
  world.params.robot_radius = p.at("robot_radius").get<double>();
  world.params.goal_threshold = p.at("goal_threshold").get<double>();
  world.params.detection_range = p.at("detection_range").get<double>();
  world.params.workspace_extent = p.at("workspace_extent").get<double>();

  for (const auto& rj : j.at("robots")) {
    RobotState r;
    r.position = vec_from_json(rj.at("start"));
    r.goal = vec_from_json(rj.at("goal"));
    r.heading = wrap_angle(std::atan2(r.goal.y - r.position.y, r.goal.x - r.position.x));
    r.steer_speed = std::min(1.0, world.params.v_max);
    r.status = RobotStatus::Active;
    world.robots.push_back(r);
  }
  for (const auto& oj : j.at("obstacles")) {
    world.obstacles.push_back({vec_from_json(oj.at("center")), oj.at("radius").get<double>()});
  }
  for (const auto& vj : j.at("vortices")) {
    Vortex v;
    v.center = vec_from_json(vj.at("center"));
    v.circulation_gamma = vj.at("gamma").get<double>();
    v.core_radius = vj.at("r0").get<double>();
    world.vortices.push_back(v);
  }
  if (seed_out) *seed_out = j.at("seed").get<std::uint64_t>();
  return world;
}

void save_scenario(const World& world, std::uint64_t seed, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_scenario: cannot open " + path);
  out << scenario_to_json(world, seed) << "\n";
}

World load_scenario(const std::string& path, std::uint64_t* seed_out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_scenario: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return scenario_from_json(text, seed_out);
}

}  // namespace vnav
