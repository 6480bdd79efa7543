// Command-line front end: single trials, batch experiments, log replay, and the
// live play server. Every subcommand accepts --config FILE with a JSON object
// whose keys are the long flag names; explicit flags win over the file.

#include <CLI11.hpp>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "parplay/harness/experiment.hpp"
#include "parplay/harness/replay.hpp"
#include "parplay/play/server.hpp"

namespace fs = std::filesystem;
using namespace parplay;

namespace {

/// Flat keys go to the selected subcommand; an object keyed by a subcommand
/// name scopes its keys to that subcommand.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    nlohmann::json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& r = opt->results();
        j[name] = r.size() == 1 ? nlohmann::json(r.front()) : nlohmann::json(r);
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<std::string> scope;
    for (const CLI::App* sub : root_->get_subcommands()) scope.push_back(sub->get_name());
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        for (const auto& [k, v] : value.items()) items.push_back(item({key}, k, v));
      } else {
        items.push_back(item(scope, key, value));
      }
    }
    return items;
  }

 private:
  static CLI::ConfigItem item(std::vector<std::string> parents, const std::string& name, const nlohmann::json& value) {
    CLI::ConfigItem it;
    it.parents = std::move(parents);
    it.name = name;
    auto text = [](const nlohmann::json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
      return v.dump();
    };
    if (value.is_array()) {
      for (const auto& v : value) it.inputs.push_back(text(v));
    } else {
      it.inputs.push_back(text(value));
    }
    return it;
  }

  const CLI::App* root_;
};

struct LoopFlags {
  std::size_t k = 8;
  double lambda_n = 50.0;
  double lambda_alpha = 10.0;
  double replan_interval = 0.8;
  double max_time = 60.0;
  bool goal_achieving = false;
  bool no_phase_replan = false;
  bool contact_probe = false;
  bool opponent_evidence = false;
  Workspace layout;
  double base_offset = std::abs(layout.arms[0].base.x);
  double v_max = layout.arms[0].v_max;
  double link_radius = layout.arms[0].link_radius;

  void add(CLI::App* app) {
    app->add_option("--k", k, "Actions per agent, including the Static plan")->capture_default_str();
    app->add_option("--lambda-n", lambda_n, "Norm sharpness")->capture_default_str();
    app->add_option("--lambda-alpha", lambda_alpha, "History likelihood sharpness")->capture_default_str();
    app->add_option("--replan-interval", replan_interval, "Seconds executed between replans")->capture_default_str();
    app->add_option("--max-time", max_time, "Simulated seconds before a trial times out")->capture_default_str();
    app->add_flag("--defensive-goal-achieving", goal_achieving,
                  "Maximin ignores the opponent's Static plan when every worst case is a collision");
    app->add_flag("--no-phase-replan", no_phase_replan, "Only replan at segment ends and after safety stops");
    app->add_flag("--contact-probe", contact_probe, "Also check the first execution step when costing profiles");
    app->add_flag("--opponent-evidence", opponent_evidence, "Bayes-Nash infers from the opponent's states only");
    app->add_option("--base-offset", base_offset, "Arm bases sit at (-x, 0) and (+x, 0)")->check(CLI::PositiveNumber);
    app->add_option("--v-max", v_max, "Joint speed limit of both arms, rad/s")->check(CLI::PositiveNumber);
    app->add_option("--link-radius", link_radius, "Capsule radius of every link")->check(CLI::PositiveNumber);
  }

  void apply(TrialConfig& t) const {
    t.loop.k = k;
    t.loop.policy.norm.lambda_n = lambda_n;
    t.loop.policy.personality.lambda_alpha = lambda_alpha;
    t.loop.replan_interval = replan_interval;
    t.loop.policy.defensive_goal_achieving = goal_achieving;
    t.loop.replan_on_phase_change = !no_phase_replan;
    t.loop.contact_probe = contact_probe;
    t.loop.policy.opponent_only_evidence = opponent_evidence;
    t.max_trial_time = max_time;
    t.workspace = layout;
    for (int i = 0; i < kNumAgents; ++i) {
      t.workspace.arms[i].base.x = i == 0 ? -base_offset : base_offset;
      t.workspace.arms[i].v_max = v_max;
      t.workspace.arms[i].link_radius = link_radius;
    }
  }
};

std::vector<PolicyKind> parse_policies(const std::vector<std::string>& names) {
  std::vector<PolicyKind> out;
  for (const std::string& n : names) out.push_back(policy_from_string(n));
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PlayServer* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel-play game-theoretic planner: trials, experiments, replay, live sessions"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.fallthrough();
  app.set_config("--config", "", "JSON file with flag values; explicit flags win");
  app.config_formatter(std::make_shared<JsonConfig>(&app));

  // trial
  CLI::App* trial = app.add_subcommand("trial", "Run one seeded trial and write its JSON-lines log");
  std::uint64_t t_seed = 1;
  std::string t_robot = "bayes-nash", t_human = "selfish-nash", t_out, t_task;
  int t_robot_agent = 1;
  bool t_costs = false, t_no_states = false;
  LoopFlags t_loop;
  trial->add_option("--seed", t_seed, "Trial seed; also generates the task");
  trial->add_option("--robot", t_robot, "Robot policy")
      ->check(CLI::IsMember({"defensive", "selfish-nash", "norm-nash", "bayes-nash", "idle"}));
  trial->add_option("--human", t_human, "Simulated human policy")
      ->check(CLI::IsMember({"defensive", "selfish-nash", "norm-nash", "bayes-nash", "idle"}));
  trial->add_option("--robot-agent", t_robot_agent, "Seat of the robot (1 or 2)")->check(CLI::Range(1, 2));
  trial->add_option("--task", t_task, "JSON task file instead of a generated task")->check(CLI::ExistingFile);
  trial->add_option("--out", t_out, "Log path (default: stdout)");
  trial->add_flag("--cost-matrices", t_costs, "Include full cost matrices in replan records");
  trial->add_flag("--no-states", t_no_states, "Omit per-step state records");
  t_loop.add(trial);

  // experiment
  CLI::App* exp = app.add_subcommand("experiment", "Run every robot condition over the same seeded trials");
  std::size_t e_trials = 30;
  std::uint64_t e_seed = 1;
  std::vector<std::string> e_conditions{"defensive", "selfish-nash", "norm-nash", "bayes-nash"};
  std::vector<std::string> e_humans{"defensive", "selfish-nash", "norm-nash"};
  std::string e_out = "results";
  bool e_logs = false, e_quiet = false;
  LoopFlags e_loop;
  exp->add_option("--trials", e_trials, "Trials per condition")->check(CLI::PositiveNumber);
  exp->add_option("--base-seed", e_seed, "Seed of the whole batch");
  exp->add_option("--conditions", e_conditions, "Robot policies")->delimiter(',');
  exp->add_option("--humans", e_humans, "Pool the simulated human is drawn from")->delimiter(',');
  exp->add_option("--out-dir", e_out, "Directory for summary.csv, trials.csv and logs");
  exp->add_flag("--logs", e_logs, "Write one JSON-lines log per trial");
  exp->add_flag("--quiet", e_quiet, "No per-trial progress on stderr");
  e_loop.add(exp);

  // replay
  CLI::App* rep = app.add_subcommand("replay", "Render a trial log or recompute its metrics");
  std::string r_in, r_out, r_format = "svg";
  int r_pixels = 600;
  rep->add_option("--in", r_in, "JSON-lines trial log")->required()->check(CLI::ExistingFile);
  rep->add_option("--out", r_out, "Output file (default: stdout)");
  rep->add_option("--format", r_format, "svg, animation or metrics")
      ->check(CLI::IsMember({"svg", "animation", "metrics"}));
  rep->add_option("--pixels", r_pixels, "SVG size")->check(CLI::PositiveNumber);

  // serve
  CLI::App* srv = app.add_subcommand("serve", "Serve live sessions over WebSocket plus HTTP metrics");
  ServerOptions s_opts;
  std::string s_log_dir;
  srv->add_option("--host", s_opts.host, "Bind address");
  srv->add_option("--port", s_opts.port, "Port; 0 picks a free one");
  srv->add_option("--time-scale", s_opts.time_scale, "Wall seconds per simulated second; 0 runs flat out")
      ->check(CLI::NonNegativeNumber);
  srv->add_option("--log-dir", s_log_dir, "Write a JSON-lines event log per session here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*trial) {
      TrialConfig cfg;
      cfg.seed = t_seed;
      cfg.robot = policy_from_string(t_robot);
      cfg.human = policy_from_string(t_human);
      cfg.robot_agent = t_robot_agent - 1;
      cfg.log_cost_matrices = t_costs;
      cfg.log_states = !t_no_states;
      if (!t_task.empty()) cfg.task = nlohmann::json::parse(read_file(t_task)).get<TaskSpec>();
      t_loop.apply(cfg);
      const TrialResult r = run_trial(cfg);
      if (t_out.empty()) {
        std::cout << r.jsonl();
      } else {
        write_file(t_out, r.jsonl());
        std::cerr << metrics_to_json(r.metrics).dump() << '\n';
      }
      return 0;
    }

    if (*exp) {
      ExperimentConfig cfg;
      cfg.n_trials = e_trials;
      cfg.base_seed = e_seed;
      cfg.robots = parse_policies(e_conditions);
      cfg.humans = parse_policies(e_humans);
      cfg.trial.log_states = e_logs;
      e_loop.apply(cfg.trial);
      const fs::path out(e_out);
      fs::create_directories(out);
      const RunReport report = run_experiment(cfg, [&](const TrialRow& row, const TrialResult& result) {
        if (e_logs)
          write_file(out / "logs" / (row.condition + "_" + std::to_string(row.index) + ".jsonl"), result.jsonl());
        if (!e_quiet)
          std::cerr << row.condition << " #" << row.index << " vs " << to_string(row.human)
                    << ": total=" << row.metrics.total_task_time << " robot=" << row.robot_time()
                    << " stops=" << row.metrics.safety_stops << (row.metrics.timed_out ? " TIMEOUT" : "") << '\n';
      });
      write_file(out / "summary.csv", report.csv());
      write_file(out / "trials.csv", report.rows_csv());
      std::cout << report.csv();
      return 0;
    }

    if (*rep) {
      std::ifstream in(r_in);
      const std::vector<json> log = parse_jsonl(in);
      std::string text;
      if (r_format == "svg") text = render_svg(log, r_pixels);
      else if (r_format == "animation") text = animation_json(log).dump() + "\n";
      else text = metrics_to_json(reconstruct_metrics(log)).dump(2) + "\n";
      if (r_out.empty()) std::cout << text;
      else write_file(r_out, text);
      return 0;
    }

    if (*srv) {
      std::mutex log_mu;
      if (!s_log_dir.empty()) {
        fs::create_directories(s_log_dir);
        s_opts.on_event = [&](const std::string& session, const json& event) {
          std::lock_guard lock(log_mu);
          std::ofstream(fs::path(s_log_dir) / (session + ".jsonl"), std::ios::app) << event.dump() << '\n';
        };
      }
      PlayServer server(s_opts);
      const std::uint16_t port = server.bind_and_listen();
      std::cerr << "listening on ws://" << s_opts.host << ':' << port << "/ (metrics at http://" << s_opts.host
                << ':' << port << "/sessions)\n";
      g_server = &server;
      std::signal(SIGINT, [](int) {
        if (g_server) g_server->request_stop();
      });
      std::signal(SIGTERM, [](int) {
        if (g_server) g_server->request_stop();
      });
      server.serve();
      server.stop();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
