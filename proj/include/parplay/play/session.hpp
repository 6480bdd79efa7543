#pragma once

// Live session state machine. A human drives one arm by direction commands
// while the robot runs the same replan loop as the batch harness.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "parplay/harness/engine.hpp"
#include "parplay/harness/task_gen.hpp"
#include "parplay/harness/trial.hpp"
#include "parplay/io/json_io.hpp"

namespace parplay {

inline constexpr int kProtocolVersion = 1;
inline constexpr int kNumDirections = 8;

struct SessionConfig {
  PolicyKind robot = PolicyKind::BayesNash;
  std::uint64_t seed = 0;
  std::optional<TaskSpec> task;  // generated from `seed` when absent
  int human_agent = 1;
  double input_rate = 10.0;       // Hz
  double cartesian_speed = 0.3;   // m/s of the end-effector
  double damping = 0.01;
  LoopParams loop;
  double max_trial_time = 60.0;

  int robot_agent() const { return other(human_agent); }

  void validate() const {
    loop.validate();
    if (!(input_rate > 0.0)) throw std::invalid_argument("SessionConfig: input_rate must be > 0");
    if (!(cartesian_speed >= 0.0)) throw std::invalid_argument("SessionConfig: cartesian_speed must be >= 0");
    if (!(damping > 0.0)) throw std::invalid_argument("SessionConfig: damping must be > 0");
    if (human_agent != 0 && human_agent != 1) throw std::invalid_argument("SessionConfig: human_agent must be 1 or 2");
    if (!(max_trial_time > 0.0)) throw std::invalid_argument("SessionConfig: max_trial_time must be > 0");
    if (robot == PolicyKind::External) throw std::invalid_argument("SessionConfig: robot cannot be external");
    if (task) task->validate();
  }
};

/// Every key is optional; `human_agent` is 1-based like the rest of the wire format.
inline SessionConfig session_config_from_json(const json& j) {
  SessionConfig c;
  if (!j.is_object()) throw std::invalid_argument("session config must be an object");
  if (j.contains("robot")) c.robot = policy_from_string(j.at("robot").get<std::string>());
  c.seed = j.value("seed", c.seed);
  if (j.contains("task")) c.task = j.at("task").get<TaskSpec>();
  c.human_agent = j.value("human_agent", c.human_agent + 1) - 1;
  c.input_rate = j.value("input_rate", c.input_rate);
  c.cartesian_speed = j.value("cartesian_speed", c.cartesian_speed);
  c.damping = j.value("damping", c.damping);
  c.loop.k = j.value("k", c.loop.k);
  c.loop.policy.norm.lambda_n = j.value("lambda_n", c.loop.policy.norm.lambda_n);
  c.loop.policy.personality.lambda_alpha = j.value("lambda_alpha", c.loop.policy.personality.lambda_alpha);
  c.max_trial_time = j.value("max_trial_time", c.max_trial_time);
  c.validate();
  return c;
}

inline json session_config_to_json(const SessionConfig& c) {
  json j{{"robot", to_string(c.robot)},
         {"seed", c.seed},
         {"human_agent", c.human_agent + 1},
         {"input_rate", c.input_rate},
         {"cartesian_speed", c.cartesian_speed},
         {"damping", c.damping},
         {"k", c.loop.k},
         {"lambda_n", c.loop.policy.norm.lambda_n},
         {"lambda_alpha", c.loop.policy.personality.lambda_alpha},
         {"max_trial_time", c.max_trial_time}};
  if (c.task) j["task"] = *c.task;
  return j;
}

/// Direction 0..7 in 45 degree steps counterclockwise from +x; nullopt is Idle.
struct InputCommand {
  std::optional<int> direction;
  double ts = 0.0;

  void validate() const {
    if (direction && (*direction < 0 || *direction >= kNumDirections))
      throw std::invalid_argument("InputCommand: direction must be in 0..7");
  }
};

inline Vec2 direction_velocity(std::optional<int> direction, double speed) {
  if (!direction) return {};
  const double a = *direction * kPi / 4.0;
  return {speed * std::cos(a), speed * std::sin(a)};
}

/// Damped least squares dq = J^T (J J^T + lambda^2 I)^-1 v, scaled down uniformly
/// so neither joint exceeds v_max.
inline JointVelocity cartesian_to_joint_velocity(const ArmModel& arm, JointState q, Vec2 v, double damping) {
  const auto [c1, c2] = jacobian(arm, q);
  const double l2 = damping * damping;
  // A = J J^T + l2 I, symmetric 2x2.
  const double a11 = c1.x * c1.x + c2.x * c2.x + l2;
  const double a12 = c1.x * c1.y + c2.x * c2.y;
  const double a22 = c1.y * c1.y + c2.y * c2.y + l2;
  const double det = a11 * a22 - a12 * a12;
  const Vec2 w{(a22 * v.x - a12 * v.y) / det, (a11 * v.y - a12 * v.x) / det};
  JointVelocity dq{dot(c1, w), dot(c2, w)};
  const double peak = std::max(std::abs(dq.q1), std::abs(dq.q2));
  if (peak > arm.v_max) {
    const double s = arm.v_max / peak;
    dq = {std::clamp(dq.q1 * s, -arm.v_max, arm.v_max), std::clamp(dq.q2 * s, -arm.v_max, arm.v_max)};
  }
  return dq;
}

enum class EventType { State, Diagnostics, SafetyStop, Complete };

inline std::string_view to_string(EventType t) {
  switch (t) {
    case EventType::State: return "state";
    case EventType::Diagnostics: return "diag";
    case EventType::SafetyStop: return "safety_stop";
    case EventType::Complete: return "complete";
  }
  return "?";
}

struct SessionEvent {
  EventType type = EventType::State;
  std::uint64_t seq = 0;
  json payload;
};

inline json event_to_json(const SessionEvent& e, const std::string& session) {
  return json{{"type", to_string(e.type)}, {"seq", e.seq}, {"session", session}, {"v", kProtocolVersion},
              {"payload", e.payload}};
}

class Session {
 public:
  Session(std::string id, SessionConfig config)
      : id_(std::move(id)),
        config_((config.validate(), std::move(config))),
        task_(config_.task ? *config_.task : generate_task(config_.seed)),
        robot_(config_.robot_agent(), config_.robot, config_.loop, config_.seed),
        world_(initial_world(task_)) {
    clock_.on_step(world_);
  }

  const std::string& id() const { return id_; }
  const SessionConfig& config() const { return config_; }
  const TaskSpec& task() const { return task_; }
  const WorldState& world() const { return world_; }
  const InteractionHistory& history() const { return history_; }
  const TrialMetrics& metrics() const { return metrics_; }
  bool complete() const { return complete_; }
  std::uint64_t next_seq() const { return seq_; }

  SessionEvent initial_state() { return emit(EventType::State, state_payload(false)); }

  /// Latest command wins. Commands older than the last accepted one are dropped.
  bool apply_input(const InputCommand& cmd) {
    cmd.validate();
    if (last_input_ && cmd.ts < last_input_->ts) return false;
    last_input_ = cmd;
    return true;
  }

  /// Velocities commanded on the most recent tick, before any safety stop.
  const PerAgent<JointVelocity>& commanded_velocity() const { return commanded_; }

  std::optional<int> current_direction() const { return last_input_ ? last_input_->direction : std::nullopt; }

  JointVelocity human_velocity() const {
    const int h = config_.human_agent;
    if (world_.done(h)) return {};
    const ArmModel& arm = task_.workspace.arms[h];
    JointVelocity dq = cartesian_to_joint_velocity(
        arm, world_.joints[h], direction_velocity(current_direction(), config_.cartesian_speed), config_.damping);
    // Refuse steps that would carry the human arm outside the workspace.
    const JointState next{world_.joints[h].q1 + dq.q1 * config_.loop.dt_exec,
                          world_.joints[h].q2 + dq.q2 * config_.loop.dt_exec};
    if (!task_.workspace.pose_inside(h, next)) return {};
    return dq;
  }

  /// One execution step of dt_exec.
  std::vector<SessionEvent> tick() {
    std::vector<SessionEvent> out;
    if (complete_) return out;
    const int r = config_.robot_agent();
    const int h = config_.human_agent;
    if (!plan_ || step_in_segment_ >= config_.loop.steps_per_segment()) {
      plan_ = robot_.replan(world_, task_, history_, replan_index_++);
      ++metrics_.replans;
      step_in_segment_ = 0;
      out.push_back(emit(EventType::Diagnostics, diag_payload(*plan_)));
    }
    ++step_in_segment_;
    const double local = static_cast<double>(step_in_segment_) * config_.loop.dt_exec;

    PerAgent<JointVelocity> vel{};
    if (!world_.done(r))
      vel[r] = tracking_velocity(world_.joints[r], resample_at(plan_->chosen, local), config_.loop.dt_exec,
                                 task_.workspace.arms[r].v_max);
    vel[h] = human_velocity();
    commanded_ = vel;

    history_.append(world_.clock, world_.joints);
    const StepOutcome outcome = guarded_step(world_, task_, vel, config_.loop.dt_exec);
    const PerAgent<Phase> before = world_.phase;
    if (outcome.safety_stop) {
      clock_.on_stop(world_, config_.loop.dt_exec);
      ++metrics_.safety_stops;
      out.push_back(emit(EventType::SafetyStop, json{{"t", world_.clock}, {"joints", world_.joints}}));
    }
    world_ = outcome.world;
    clock_.on_step(world_);
    const bool phase_changed = world_.phase != before;
    if (outcome.safety_stop || (phase_changed && config_.loop.replan_on_phase_change)) plan_.reset();
    out.push_back(emit(EventType::State, state_payload(outcome.safety_stop)));

    const bool timeout = world_.clock >= config_.max_trial_time - 1e-9;
    if (world_.all_done() || timeout) {
      complete_ = true;
      metrics_.timed_out = !world_.all_done();
      for (int i = 0; i < kNumAgents; ++i) metrics_.agent_time[i] = clock_.agent_time(i, world_.clock);
      metrics_.total_task_time = std::max(metrics_.agent_time[0], metrics_.agent_time[1]);
      out.push_back(emit(EventType::Complete, json{{"metrics", metrics_to_json(metrics_)}}));
    }
    return out;
  }

  /// Metrics so far; final once complete.
  TrialMetrics live_metrics() const {
    if (complete_) return metrics_;
    TrialMetrics m = metrics_;
    for (int i = 0; i < kNumAgents; ++i) m.agent_time[i] = clock_.agent_time(i, world_.clock);
    m.total_task_time = std::max(m.agent_time[0], m.agent_time[1]);
    return m;
  }

 private:
  SessionEvent emit(EventType type, json payload) { return SessionEvent{type, seq_++, std::move(payload)}; }

  json state_payload(bool stop) const {
    json ee = json::array();
    for (int i = 0; i < kNumAgents; ++i) ee.push_back(end_effector(task_.workspace.arms[i], world_.joints[i]));
    json p{{"world", world_}, {"end_effectors", ee}, {"stop", stop}};
    if (world_.clock == 0.0) {
      p["task"] = task_;
      p["human_agent"] = config_.human_agent + 1;
    }
    return p;
  }

  json diag_payload(const SeatPlan& plan) const {
    json p = seat_record(plan, false);
    p["t"] = world_.clock;
    return p;
  }

  std::string id_;
  SessionConfig config_;
  TaskSpec task_;
  PlanningAgent robot_;
  WorldState world_;
  InteractionHistory history_;
  TaskClock clock_;
  TrialMetrics metrics_;
  std::optional<SeatPlan> plan_;
  std::size_t step_in_segment_ = 0;
  std::size_t replan_index_ = 0;
  std::optional<InputCommand> last_input_;
  PerAgent<JointVelocity> commanded_{};
  std::uint64_t seq_ = 0;
  bool complete_ = false;
};

}  // namespace parplay
