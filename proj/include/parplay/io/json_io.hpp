#pragma once

// JSON forms of the domain types. Keys are snake_case, lengths in meters,
// angles in radians, times in seconds. Agents are numbered 1 and 2. An infinite
// (collision) cost is written as null and read back as infinity.

#include <cmath>
#include <string>

#include <json.hpp>
#include "parplay/game/cost_matrix.hpp"
#include "parplay/game/nash.hpp"
#include "parplay/plan/trajectory.hpp"
#include "parplay/select/personality.hpp"
#include "parplay/sim/world.hpp"

namespace parplay {

using nlohmann::json;

inline json cost_to_json(double c) { return std::isfinite(c) ? json(c) : json(nullptr); }
inline double cost_from_json(const json& j) { return j.is_null() ? kInfiniteCost : j.get<double>(); }

inline void to_json(json& j, const Vec2& v) { j = json{{"x", v.x}, {"y", v.y}}; }
inline void from_json(const json& j, Vec2& v) {
  v.x = j.at("x").get<double>();
  v.y = j.at("y").get<double>();
}

inline void to_json(json& j, const JointState& q) { j = json{{"q1", q.q1}, {"q2", q.q2}}; }
inline void from_json(const json& j, JointState& q) {
  q.q1 = j.at("q1").get<double>();
  q.q2 = j.at("q2").get<double>();
}

inline void to_json(json& j, const Region& r) { j = json{{"center", r.center}, {"radius", r.radius}}; }
inline void from_json(const json& j, Region& r) {
  r.center = j.at("center").get<Vec2>();
  r.radius = j.at("radius").get<double>();
}

inline void to_json(json& j, const ArmModel& a) {
  j = json{{"base", a.base}, {"link_lengths", {a.l1, a.l2}}, {"link_radius", a.link_radius}, {"v_max", a.v_max}};
}
inline void from_json(const json& j, ArmModel& a) {
  a.base = j.at("base").get<Vec2>();
  a.l1 = j.at("link_lengths").at(0).get<double>();
  a.l2 = j.at("link_lengths").at(1).get<double>();
  a.link_radius = j.at("link_radius").get<double>();
  a.v_max = j.at("v_max").get<double>();
}

inline void to_json(json& j, const Workspace& w) {
  j = json{{"arms", w.arms}, {"rest", w.rest}, {"bound", w.bound}};
}
inline void from_json(const json& j, Workspace& w) {
  Workspace d;
  w.arms = j.value("arms", d.arms);
  w.rest = j.value("rest", d.rest);
  w.bound = j.value("bound", d.bound);
}

inline void to_json(json& j, const TaskSpec& t) {
  j = json{{"objects", t.objects},           {"destinations", t.destinations}, {"grasp_radius", t.grasp_radius},
           {"rng_seed", t.rng_seed},         {"workspace", t.workspace}};
}
/// `objects` is required; every other key falls back to the default layout.
inline void from_json(const json& j, TaskSpec& t) {
  TaskSpec d;
  t.objects = j.at("objects").get<PerAgent<Vec2>>();
  t.destinations = j.value("destinations", d.destinations);
  t.grasp_radius = j.value("grasp_radius", d.grasp_radius);
  t.rng_seed = j.value("rng_seed", d.rng_seed);
  t.workspace = j.contains("workspace") ? j.at("workspace").get<Workspace>() : d.workspace;
  t.validate();
}

inline void to_json(json& j, const WorldState& w) {
  j = json{{"joints", w.joints},
           {"phase", {to_string(w.phase[0]), to_string(w.phase[1])}},
           {"grasped", w.grasped},
           {"objects", w.object_positions},
           {"clock", w.clock}};
}
inline void from_json(const json& j, WorldState& w) {
  w.joints = j.at("joints").get<PerAgent<JointState>>();
  for (int i = 0; i < kNumAgents; ++i) w.phase[i] = phase_from_string(j.at("phase").at(i).get<std::string>());
  w.grasped = j.at("grasped").get<PerAgent<bool>>();
  w.object_positions = j.at("objects").get<PerAgent<Vec2>>();
  w.clock = j.at("clock").get<double>();
}

inline void to_json(json& j, const Trajectory& t) {
  json states = json::array();
  for (const TimedState& s : t.states) states.push_back({s.t, s.q.q1, s.q.q2});
  j = json{{"kind", t.is_static() ? "static" : "sampled"}, {"duration", t.duration}, {"states", states}};
}
inline void from_json(const json& j, Trajectory& t) {
  t.kind = j.at("kind").get<std::string>() == "static" ? TrajectoryKind::Static : TrajectoryKind::Sampled;
  t.duration = j.at("duration").get<double>();
  t.states.clear();
  for (const json& s : j.at("states")) t.states.push_back({s.at(0).get<double>(), {s.at(1).get<double>(), s.at(2).get<double>()}});
}

inline json cost_pair_to_json(const CostPair& c) { return json::array({cost_to_json(c[0]), cost_to_json(c[1])}); }
inline CostPair cost_pair_from_json(const json& j) { return {cost_from_json(j.at(0)), cost_from_json(j.at(1))}; }

inline void to_json(json& j, const CostMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(cost_pair_to_json(m.at(i, k)));
    rows.push_back(std::move(row));
  }
  j = json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", rows}};
}
inline void from_json(const json& j, CostMatrix& m) {
  m = CostMatrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t k = 0; k < m.cols(); ++k) m.at(i, k) = cost_pair_from_json(j.at("entries").at(i).at(k));
}

inline void to_json(json& j, const EquilibriumSet& eq) {
  j = json::array();
  for (std::size_t n = 0; n < eq.size(); ++n)
    j.push_back({{"profile", {eq.profiles[n].i1, eq.profiles[n].i2}}, {"costs", cost_pair_to_json(eq.costs[n])}});
}
inline void from_json(const json& j, EquilibriumSet& eq) {
  eq = {};
  for (const json& e : j) {
    eq.profiles.push_back({e.at("profile").at(0).get<std::size_t>(), e.at("profile").at(1).get<std::size_t>()});
    eq.costs.push_back(cost_pair_from_json(e.at("costs")));
  }
}

inline void to_json(json& j, const PersonalityBelief& b) { j = json(b.probabilities); }

}  // namespace parplay
