#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "parplay/harness/trial.hpp"

namespace parplay {

struct ExperimentConfig {
  std::size_t n_trials = 30;
  std::vector<PolicyKind> robots{PolicyKind::Defensive, PolicyKind::SelfishNash, PolicyKind::NormNash,
                                 PolicyKind::BayesNash};
  /// Pool the simulated human of each trial is drawn from.
  std::vector<PolicyKind> humans{PolicyKind::Defensive, PolicyKind::SelfishNash, PolicyKind::NormNash};
  std::uint64_t base_seed = 1;
  /// Template for every trial; seed, task, robot and human are overwritten.
  TrialConfig trial;
  bool keep_logs = false;

  void validate() const {
    if (n_trials < 1) throw std::invalid_argument("ExperimentConfig: n_trials must be >= 1");
    if (robots.empty() || humans.empty()) throw std::invalid_argument("ExperimentConfig: empty policy list");
    trial.workspace.validate();
  }
};

/// Trial `i` uses the same seed, task and human in every condition.
inline std::uint64_t experiment_trial_seed(std::uint64_t base_seed, std::size_t i) {
  return derive_seed({base_seed, static_cast<std::uint64_t>(i)});
}

inline PolicyKind draw_human(std::uint64_t base_seed, std::size_t i, const std::vector<PolicyKind>& pool) {
  Rng rng(derive_seed({base_seed, static_cast<std::uint64_t>(i), 0x68756dULL}));
  const auto n = static_cast<std::size_t>(rng.uniform() * static_cast<double>(pool.size()));
  return pool[std::min(n, pool.size() - 1)];
}

struct TrialRow {
  std::string condition;
  std::size_t index = 0;
  std::uint64_t seed = 0;
  PolicyKind robot = PolicyKind::BayesNash;
  PolicyKind human = PolicyKind::SelfishNash;
  int robot_agent = 0;
  TrialMetrics metrics;

  double robot_time() const { return metrics.agent_time[robot_agent]; }
  double human_time() const { return metrics.agent_time[other(robot_agent)]; }
};

struct Aggregate {
  double mean = 0.0;
  double sem = 0.0;
  std::size_t n = 0;
};

/// Mean and standard error of the mean (sample standard deviation over sqrt n).
inline Aggregate aggregate(const std::vector<double>& xs) {
  Aggregate a;
  a.n = xs.size();
  if (xs.empty()) return a;
  for (double x : xs) a.mean += x;
  a.mean /= static_cast<double>(a.n);
  if (a.n < 2) return a;
  double ss = 0.0;
  for (double x : xs) ss += (x - a.mean) * (x - a.mean);
  a.sem = std::sqrt(ss / static_cast<double>(a.n - 1)) / std::sqrt(static_cast<double>(a.n));
  return a;
}

inline const std::vector<std::string>& report_metrics() {
  static const std::vector<std::string> names{"total_task_time", "robot_time", "human_time",
                                              "safety_stops",    "replans",    "timed_out"};
  return names;
}

inline double metric_value(const TrialRow& r, const std::string& name) {
  if (name == "total_task_time") return r.metrics.total_task_time;
  if (name == "robot_time") return r.robot_time();
  if (name == "human_time") return r.human_time();
  if (name == "safety_stops") return static_cast<double>(r.metrics.safety_stops);
  if (name == "replans") return static_cast<double>(r.metrics.replans);
  if (name == "timed_out") return r.metrics.timed_out ? 1.0 : 0.0;
  throw std::invalid_argument("unknown metric '" + name + "'");
}

struct RunReport {
  std::vector<std::string> conditions;  // in run order
  std::vector<TrialRow> rows;
  std::map<std::string, std::vector<TrialResult>> logs;  // only with keep_logs

  std::vector<double> values(const std::string& condition, const std::string& metric) const {
    std::vector<double> out;
    for (const TrialRow& r : rows)
      if (r.condition == condition) out.push_back(metric_value(r, metric));
    return out;
  }

  Aggregate stat(const std::string& condition, const std::string& metric) const {
    return aggregate(values(condition, metric));
  }

  std::string csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "condition,metric,mean,sem,n\n";
    for (const std::string& c : conditions)
      for (const std::string& m : report_metrics()) {
        const Aggregate a = stat(c, m);
        os << c << ',' << m << ',' << a.mean << ',' << a.sem << ',' << a.n << '\n';
      }
    return os.str();
  }

  std::string rows_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "condition,trial,seed,human";
    for (const std::string& m : report_metrics()) os << ',' << m;
    os << '\n';
    for (const TrialRow& r : rows) {
      os << r.condition << ',' << r.index << ',' << r.seed << ',' << to_string(r.human);
      for (const std::string& m : report_metrics()) os << ',' << metric_value(r, m);
      os << '\n';
    }
    return os.str();
  }
};

using TrialObserver = std::function<void(const TrialRow&, const TrialResult&)>;

/// Runs every robot condition against the same seeded sequence of tasks and humans.
inline RunReport run_experiment(const ExperimentConfig& cfg, const TrialObserver& observe = {}) {
  cfg.validate();
  RunReport report;
  for (PolicyKind robot : cfg.robots) {
    const std::string condition(to_string(robot));
    report.conditions.push_back(condition);
    for (std::size_t i = 0; i < cfg.n_trials; ++i) {
      TrialConfig tc = cfg.trial;
      tc.seed = experiment_trial_seed(cfg.base_seed, i);
      tc.task = generate_task(tc.seed, tc.workspace);
      tc.robot = robot;
      tc.human = draw_human(cfg.base_seed, i, cfg.humans);
      TrialResult result = run_trial(tc);
      TrialRow row{condition, i, tc.seed, tc.robot, tc.human, tc.robot_agent, result.metrics};
      if (observe) observe(row, result);
      report.rows.push_back(row);
      if (cfg.keep_logs) report.logs[condition].push_back(std::move(result));
    }
  }
  return report;
}

}  // namespace parplay
