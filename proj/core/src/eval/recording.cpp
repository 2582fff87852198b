#include "vnav/eval/recording.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace vnav::eval {

namespace {

const char* status_name(RobotStatus s) {
  switch (s) {
    case RobotStatus::Active: return "active";
    case RobotStatus::ReachedGoal: return "reached_goal";
    case RobotStatus::Collided: return "collided";
    case RobotStatus::Deactivated: return "deactivated";
  }
  return "?";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_rows(std::ofstream& out, const EpisodeRecord& record) {
  for (std::size_t robot = 0; robot < record.robot_steps.size(); ++robot) {
    for (const StepRow& row : record.robot_steps[robot]) {
      out << record.episode_index << ',' << robot << ',' << fmt(row.t) << ','
          << fmt(row.position.x) << ',' << fmt(row.position.y) << ',' << fmt(row.heading) << ','
          << fmt(row.speed) << ',' << fmt(row.accel) << ',' << fmt(row.turn_rate) << ','
          << fmt(row.reward) << ',' << status_name(row.status) << '\n';
    }
  }
}

constexpr const char* kCsvHeader =
    "episode_id,robot_id,t,x,y,theta,speed,accel,turn_rate,reward,status";

}  // namespace

void export_trajectories(const EpisodeRecord& record, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_trajectories: cannot open " + path);
  out << kCsvHeader << '\n';
  write_rows(out, record);
  if (!out) throw std::runtime_error("export_trajectories: write failed for " + path);
}

void export_trajectories(const std::vector<EpisodeRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_trajectories: cannot open " + path);
  out << kCsvHeader << '\n';
  for (const auto& record : records) write_rows(out, record);
  if (!out) throw std::runtime_error("export_trajectories: write failed for " + path);
}

namespace {

const char* kRobotColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                              "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

void render_svg(const EpisodeRecord& record, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("render_svg: cannot open " + path);

  const double extent = record.scenario.params.workspace_extent;
  const double margin = 2.0;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\""
      << -margin << ' ' << -margin << ' ' << extent + 2 * margin << ' ' << extent + 2 * margin
      << "\">\n";
  // y axis flipped so north is up
  out << "<g transform=\"translate(0," << extent << ") scale(1,-1)\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << extent << "\" height=\"" << extent
      << "\" fill=\"#f4f9ff\" stroke=\"#333\" stroke-width=\"0.3\"/>\n";

  for (const auto& v : record.scenario.vortices) {
    out << "<circle cx=\"" << v.center.x << "\" cy=\"" << v.center.y << "\" r=\""
        << v.core_radius
        << "\" fill=\"none\" stroke=\"#6699cc\" stroke-width=\"0.2\" stroke-dasharray=\"1,1\"/>\n";
  }
  for (const auto& o : record.scenario.obstacles) {
    out << "<circle cx=\"" << o.center.x << "\" cy=\"" << o.center.y << "\" r=\"" << o.radius
        << "\" fill=\"#555\"/>\n";
  }

  for (std::size_t i = 0; i < record.robot_steps.size(); ++i) {
    const char* color = kRobotColors[i % (sizeof(kRobotColors) / sizeof(kRobotColors[0]))];
    const RobotState& start = record.scenario.robots[i];
    out << "<circle cx=\"" << start.goal.x << "\" cy=\"" << start.goal.y
        << "\" r=\"0.6\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"0.25\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"0.3\" points=\""
        << start.position.x << ',' << start.position.y;
    for (const StepRow& row : record.robot_steps[i]) {
      out << ' ' << row.position.x << ',' << row.position.y;
    }
    out << "\"/>\n";

    const Vec2 end = record.robot_steps[i].empty() ? start.position
                                                   : record.robot_steps[i].back().position;
    const bool reached =
        i < record.outcomes.size() && record.outcomes[i] == RobotStatus::ReachedGoal;
    if (reached) {
      out << "<circle cx=\"" << end.x << "\" cy=\"" << end.y
          << "\" r=\"0.8\" fill=\"#2ca02c\"/>\n";
    } else {
      // failure marker: red cross
      out << "<g stroke=\"#d62728\" stroke-width=\"0.35\">"
          << "<line x1=\"" << end.x - 0.8 << "\" y1=\"" << end.y - 0.8 << "\" x2=\""
          << end.x + 0.8 << "\" y2=\"" << end.y + 0.8 << "\"/>"
          << "<line x1=\"" << end.x - 0.8 << "\" y1=\"" << end.y + 0.8 << "\" x2=\""
          << end.x + 0.8 << "\" y2=\"" << end.y - 0.8 << "\"/></g>\n";
    }
  }
  out << "</g>\n</svg>\n";
  if (!out) throw std::runtime_error("render_svg: write failed for " + path);
}

MetricsSummary metrics_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  MetricsSummary summary;
  auto quart = [](const nlohmann::json& q) {
    Quartiles out;
    out.mean = q.at("mean").get<double>();
    out.q1 = q.at("q1").get<double>();
    out.median = q.at("median").get<double>();
    out.q3 = q.at("q3").get<double>();
    out.count = q.at("count").get<int>();
    return out;
  };
  for (const auto& lj : j.at("levels")) {
    LevelMetrics m;
    m.level = lj.at("level").get<int>();
    m.episodes = lj.at("episodes").get<int>();
    m.success_rate = lj.at("success_rate").get<double>();
    m.travel_time = quart(lj.at("travel_time"));
    m.energy = quart(lj.at("energy"));
    summary.levels.push_back(m);
  }
  return summary;
}

void render_metrics_svg(const MetricsSummary& metrics, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("render_metrics_svg: cannot open " + path);

  const int n = static_cast<int>(metrics.levels.size());
  const double bar_w = 60.0, gap = 30.0, height = 300.0, base = 340.0;
  const double width = n * (bar_w + gap) + gap + 40.0;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"400\" viewBox=\"0 0 " << width << " 400\">\n";
  out << "<text x=\"10\" y=\"20\" font-size=\"14\">success rate per level</text>\n";
  out << "<line x1=\"40\" y1=\"" << base << "\" x2=\"" << width - 10 << "\" y2=\"" << base
      << "\" stroke=\"#333\"/>\n";
  for (int i = 0; i < n; ++i) {
    const auto& m = metrics.levels[i];
    const double h = m.success_rate * height;
    const double x = 40.0 + gap + i * (bar_w + gap);
    out << "<rect x=\"" << x << "\" y=\"" << base - h << "\" width=\"" << bar_w << "\" height=\""
        << h << "\" fill=\"#1f77b4\"/>\n";
    out << "<text x=\"" << x + bar_w / 2 << "\" y=\"" << base + 18
        << "\" font-size=\"12\" text-anchor=\"middle\">" << m.level << "</text>\n";
    out << "<text x=\"" << x + bar_w / 2 << "\" y=\"" << base - h - 6
        << "\" font-size=\"12\" text-anchor=\"middle\">" << m.success_rate << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("render_metrics_svg: write failed for " + path);
}

}  // namespace vnav::eval
