#pragma once

#include <string>
#include <vector>

#include "vnav/eval/experiment.hpp"

namespace vnav::eval {

// CSV with header episode_id,robot_id,t,x,y,theta,speed,accel,turn_rate,
// reward,status; rows robot-major, time-minor. Values survive a parse
// round-trip to 1e-9.
void export_trajectories(const EpisodeRecord& record, const std::string& path);
void export_trajectories(const std::vector<EpisodeRecord>& records, const std::string& path);

// Standalone SVG: workspace frame, obstacles as filled discs, vortex cores
// as dashed circles, goals, color-coded trajectories; goal-reaching robots
// marked green, failed ones red.
void render_svg(const EpisodeRecord& record, const std::string& path);

// Per-level success-rate bar chart from a metrics JSON document.
void render_metrics_svg(const MetricsSummary& metrics, const std::string& path);
MetricsSummary metrics_from_json(const std::string& text);

}  // namespace vnav::eval
