#pragma once

// Offline consumers of trial logs: metric reconstruction and rendering.

#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "parplay/harness/trial.hpp"

namespace parplay {

inline std::vector<json> parse_jsonl(std::istream& in) {
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(json::parse(line));
  return out;
}

inline std::vector<json> parse_jsonl(const std::string& text) {
  std::istringstream in(text);
  return parse_jsonl(in);
}

inline const json& log_header(const std::vector<json>& log) {
  if (log.empty() || log.front().value("type", "") != "trial")
    throw std::invalid_argument("trial log must start with a trial record");
  return log.front();
}

/// Recomputes trial metrics from replan, phase, safety-stop and step records,
/// ignoring the metrics record. Needs a log written with state records.
inline TrialMetrics reconstruct_metrics(const std::vector<json>& log) {
  const json& header = log_header(log);
  const double dt = header.at("dt_exec").get<double>();
  TrialMetrics m;
  std::vector<double> stops;
  PerAgent<std::optional<double>> done_at;
  double clock = 0.0;
  if (header.contains("start")) {
    const WorldState start = header.at("start").get<WorldState>();
    clock = start.clock;
    for (int i = 0; i < kNumAgents; ++i)
      if (start.done(i)) done_at[i] = start.clock;
  }
  for (const json& r : log) {
    const std::string type = r.value("type", "");
    if (type == "replan") {
      ++m.replans;
    } else if (type == "safety_stop") {
      stops.push_back(r.at("t").get<double>());
    } else if (type == "phase") {
      if (r.at("phase").get<std::string>() == to_string(Phase::Done))
        done_at[r.at("agent").get<int>() - 1] = r.at("t").get<double>();
    } else if (type == "step") {
      clock = std::max(clock, r.at("t").get<double>());
    }
  }
  m.safety_stops = stops.size();
  m.timed_out = !(done_at[0] && done_at[1]);
  for (int i = 0; i < kNumAgents; ++i) {
    const double end = done_at[i] ? *done_at[i] : clock;
    // A stop issued at time t holds the step ending at t + dt; it is charged
    // to every agent still working at t.
    double held = 0.0;
    for (double t : stops)
      if (t < end - 0.5 * dt) held += dt;
    m.agent_time[i] = end - held;
  }
  m.total_task_time = std::max(m.agent_time[0], m.agent_time[1]);
  return m;
}

struct Frame {
  double t = 0.0;
  PerAgent<JointState> joints;
  bool stop = false;
};

inline std::vector<Frame> log_frames(const std::vector<json>& log) {
  const json& header = log_header(log);
  const TaskSpec task = header.at("task").get<TaskSpec>();
  const WorldState start = header.contains("start") ? header.at("start").get<WorldState>() : initial_world(task);
  std::vector<Frame> frames{{start.clock, start.joints, false}};
  for (const json& r : log)
    if (r.value("type", "") == "step")
      frames.push_back({r.at("t").get<double>(), r.at("joints").get<PerAgent<JointState>>(), r.at("stop").get<bool>()});
  return frames;
}

/// Frame-by-frame link geometry, convenient for browser or notebook playback.
inline json animation_json(const std::vector<json>& log) {
  const json& header = log_header(log);
  const TaskSpec task = header.at("task").get<TaskSpec>();
  json frames = json::array();
  for (const Frame& f : log_frames(log)) {
    json arms = json::array();
    for (int i = 0; i < kNumAgents; ++i) {
      const ArmModel& arm = task.workspace.arms[i];
      const ArmPose p = forward_kinematics(arm, f.joints[i]);
      arms.push_back({arm.base, p.elbow, p.end_effector});
    }
    frames.push_back({{"t", f.t}, {"arms", arms}, {"stop", f.stop}});
  }
  return json{{"v", 1}, {"task", task}, {"frames", frames}};
}

/// Static picture: workspace, objects, destinations, end-effector traces,
/// final arm poses, and safety-stop markers.
inline std::string render_svg(const std::vector<json>& log, int pixels = 600) {
  const json& header = log_header(log);
  const TaskSpec task = header.at("task").get<TaskSpec>();
  const std::vector<Frame> frames = log_frames(log);
  const double b = task.workspace.bound;
  const double s = pixels / (2.0 * b);
  auto X = [&](Vec2 p) { return (p.x + b) * s; };
  auto Y = [&](Vec2 p) { return (b - p.y) * s; };
  const char* colour[kNumAgents] = {"#1f77b4", "#d62728"};

  std::ostringstream os;
  os.precision(5);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\"" << pixels << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\" stroke=\"black\"/>\n";
  for (int i = 0; i < kNumAgents; ++i) {
    const Region& d = task.destinations[i];
    os << "<circle cx=\"" << X(d.center) << "\" cy=\"" << Y(d.center) << "\" r=\"" << d.radius * s
       << "\" fill=\"none\" stroke=\"" << colour[i] << "\" stroke-dasharray=\"4\"/>\n";
    os << "<rect x=\"" << X(task.objects[i]) - 4 << "\" y=\"" << Y(task.objects[i]) - 4
       << "\" width=\"8\" height=\"8\" fill=\"" << colour[i] << "\"/>\n";
    os << "<polyline fill=\"none\" stroke=\"" << colour[i] << "\" stroke-opacity=\"0.5\" points=\"";
    for (const Frame& f : frames) {
      const Vec2 ee = end_effector(task.workspace.arms[i], f.joints[i]);
      os << X(ee) << ',' << Y(ee) << ' ';
    }
    os << "\"/>\n";
    const ArmModel& arm = task.workspace.arms[i];
    const ArmPose p = forward_kinematics(arm, frames.back().joints[i]);
    os << "<polyline fill=\"none\" stroke=\"" << colour[i] << "\" stroke-linecap=\"round\" stroke-width=\""
       << 2.0 * arm.link_radius * s << "\" points=\"" << X(arm.base) << ',' << Y(arm.base) << ' ' << X(p.elbow) << ','
       << Y(p.elbow) << ' ' << X(p.end_effector) << ',' << Y(p.end_effector) << "\"/>\n";
  }
  for (const Frame& f : frames)
    if (f.stop)
      for (int i = 0; i < kNumAgents; ++i) {
        const Vec2 ee = end_effector(task.workspace.arms[i], f.joints[i]);
        os << "<circle cx=\"" << X(ee) << "\" cy=\"" << Y(ee) << "\" r=\"3\" fill=\"orange\"/>\n";
      }
  os << "</svg>\n";
  return os.str();
}

}  // namespace parplay
