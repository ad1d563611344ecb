#include "abandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "abandit/error.hpp"
#include "abandit/ini.hpp"
#include "abandit/rng.hpp"

namespace abandit::harness {

using policies::StepRecord;

std::string_view agent_key(Agent agent) {
  switch (agent) {
    case Agent::kUcb: return "ucb";
    case Agent::kRabUcb: return "rab_ucb";
    case Agent::kHrTeam: return "hr_team";
  }
  return "?";
}

std::string_view agent_label(Agent agent) {
  switch (agent) {
    case Agent::kUcb: return "UCB";
    case Agent::kRabUcb: return "RAB UCB";
    case Agent::kHrTeam: return "HR Team";
  }
  return "?";
}

Agent parse_agent(std::string_view key) {
  for (Agent a : {Agent::kUcb, Agent::kRabUcb, Agent::kHrTeam}) {
    if (agent_key(a) == key) return a;
  }
  throw ValidationError("unknown agent '" + std::string(key) + "'");
}

void ExperimentConfig::validate() const {
  if (!instance) throw ValidationError("config: no bandit instance");
  if (horizon < 1) throw ValidationError("config: horizon must be >= 1");
  if (trials < 1) throw ValidationError("config: trials must be >= 1");
  if (agents.empty()) throw ValidationError("config: at least one agent is required");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j = i + 1; j < agents.size(); ++j) {
      if (agents[i] == agents[j]) throw ValidationError("config: duplicate agent");
    }
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("config: alpha must lie in (0, 1)");
  if (tukey_draws < 1) throw ValidationError("config: tukey_draws must be >= 1");
  human.validate();
  robot.validate(instance->num_arms());
}

const BanditInstance& ExperimentConfig::bandit() const {
  if (!instance) throw ValidationError("config: no bandit instance");
  return *instance;
}

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

bool to_bool(const std::string& text, const std::string& where) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ValidationError(where + ": expected true or false, got '" + text + "'");
}

std::size_t to_count(const std::string& text, const std::string& where) {
  return static_cast<std::size_t>(ini::to_unsigned(text, where));
}

void check_known(const ini::Section& s, std::initializer_list<std::string_view> keys) {
  for (const auto& [k, v] : s.entries) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw ValidationError("config: unknown key '" + k + "' in [" + s.name + "]");
    }
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  const ini::Document doc = ini::parse(text);
  ExperimentConfig cfg;

  for (const auto& s : doc.sections) {
    const bool known = s.name == "experiment" || s.name == "human" || s.name == "robot" ||
                       s.name == "classes" || s.name.rfind("arm.", 0) == 0;
    if (!known) throw ValidationError("config: unknown section [" + s.name + "]");
  }

  std::string mab_name;
  std::optional<std::string> instance_file;
  if (const auto* e = doc.find("experiment")) {
    check_known(*e, {"mab", "instance_file", "horizon", "trials", "master_seed", "agents",
                     "output_dir", "threads", "alpha", "tukey_draws"});
    for (const auto& [k, v] : e->entries) {
      const std::string where = "experiment." + k;
      if (k == "mab") mab_name = v;
      else if (k == "instance_file") instance_file = v;
      else if (k == "horizon") cfg.horizon = to_count(v, where);
      else if (k == "trials") cfg.trials = to_count(v, where);
      else if (k == "master_seed") cfg.master_seed = ini::to_unsigned(v, where);
      else if (k == "output_dir") cfg.output_dir = v;
      else if (k == "threads") cfg.threads = to_count(v, where);
      else if (k == "alpha") cfg.alpha = ini::to_double(v, where);
      else if (k == "tukey_draws") cfg.tukey_draws = to_count(v, where);
      else if (k == "agents") {
        cfg.agents.clear();
        std::stringstream list(v);
        std::string item;
        while (std::getline(list, item, ',')) {
          item = trim(item);
          if (!item.empty()) cfg.agents.push_back(parse_agent(item));
        }
      }
    }
  }

  if (const auto* h = doc.find("human")) {
    check_known(*h, {"alpha", "beta", "lambda", "gamma", "delta", "theta"});
    for (const auto& [k, v] : h->entries) {
      const double x = ini::to_double(v, "human." + k);
      if (k == "alpha") cfg.human.alpha = x;
      else if (k == "beta") cfg.human.beta = x;
      else if (k == "lambda") cfg.human.lambda = x;
      else if (k == "gamma") cfg.human.gamma = x;
      else if (k == "delta") cfg.human.delta = x;
      else if (k == "theta") cfg.human.theta = x;
    }
  }
  cfg.robot.human_params = cfg.human;

  if (const auto* r = doc.find("robot")) {
    check_known(*r, {"r0", "warmup_steps", "refit_period", "smoothing_pseudocount", "warm_start",
                     "weighting", "restarts", "restart_scale", "max_iterations",
                     "max_evaluations"});
    auto& rc = cfg.robot;
    for (const auto& [k, v] : r->entries) {
      const std::string where = "robot." + k;
      if (k == "r0") rc.r0 = ini::to_double(v, where);
      else if (k == "warmup_steps") rc.warmup_steps = to_count(v, where);
      else if (k == "refit_period") rc.refit_period = to_count(v, where);
      else if (k == "smoothing_pseudocount") rc.smoothing_pseudocount = ini::to_double(v, where);
      else if (k == "warm_start") rc.warm_start = to_bool(v, where);
      else if (k == "restarts") rc.minimizer.restarts = to_count(v, where);
      else if (k == "restart_scale") rc.minimizer.restart_scale = ini::to_double(v, where);
      else if (k == "max_iterations") rc.minimizer.max_iterations = to_count(v, where);
      else if (k == "max_evaluations") rc.minimizer.max_evaluations = to_count(v, where);
      else if (k == "weighting") {
        if (v == "cumulative") rc.weighting = cpt::Weighting::kCumulative;
        else if (v == "per_entry") rc.weighting = cpt::Weighting::kPerEntry;
        else throw ValidationError(where + ": expected cumulative or per_entry");
      }
    }
  }

  if (instance_file) {
    if (doc.find("classes") != nullptr) {
      throw ValidationError("config: give either instance_file or inline [classes], not both");
    }
    std::filesystem::path p(*instance_file);
    if (p.is_relative()) p = base_dir / p;
    cfg.instance = load_instance(p);
  } else if (doc.find("classes") != nullptr) {
    cfg.instance = instance_from_ini(doc, "instance");
  }
  if (cfg.instance && !mab_name.empty()) cfg.instance = cfg.instance->with_name(mab_name);

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path().empty() ? "." : path.parent_path());
}

std::string format_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[experiment]\n";
  if (cfg.instance) out << "mab = " << cfg.instance->name() << "\n";
  out << "horizon = " << cfg.horizon << "\n"
      << "trials = " << cfg.trials << "\n"
      << "master_seed = " << cfg.master_seed << "\n"
      << "agents = ";
  for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
    out << (i ? ", " : "") << agent_key(cfg.agents[i]);
  }
  out << "\n"
      << "output_dir = " << cfg.output_dir.string() << "\n"
      << "threads = " << cfg.threads << "\n"
      << "alpha = " << ini::exact(cfg.alpha) << "\n"
      << "tukey_draws = " << cfg.tukey_draws << "\n\n";

  const auto& h = cfg.human;
  out << "[human]\n"
      << "alpha = " << ini::exact(h.alpha) << "\n"
      << "beta = " << ini::exact(h.beta) << "\n"
      << "lambda = " << ini::exact(h.lambda) << "\n"
      << "gamma = " << ini::exact(h.gamma) << "\n"
      << "delta = " << ini::exact(h.delta) << "\n"
      << "theta = " << ini::exact(h.theta) << "\n\n";

  const auto& r = cfg.robot;
  out << "[robot]\n"
      << "r0 = " << ini::exact(r.r0) << "\n"
      << "warmup_steps = " << r.warmup_steps << "\n"
      << "refit_period = " << r.refit_period << "\n"
      << "smoothing_pseudocount = " << ini::exact(r.smoothing_pseudocount) << "\n"
      << "warm_start = " << (r.warm_start ? "true" : "false") << "\n"
      << "weighting = " << (r.weighting == cpt::Weighting::kCumulative ? "cumulative" : "per_entry")
      << "\n"
      << "restarts = " << r.minimizer.restarts << "\n"
      << "restart_scale = " << ini::exact(r.minimizer.restart_scale) << "\n"
      << "max_iterations = " << r.minimizer.max_iterations << "\n"
      << "max_evaluations = " << r.minimizer.max_evaluations << "\n";

  if (cfg.instance) out << "\n" << format_instance(*cfg.instance);
  return out.str();
}

const stats::GroupSummary& ExperimentSummary::group(Agent agent) const {
  return groups.at(group_index(agent));
}

std::size_t ExperimentSummary::group_index(Agent agent) const {
  const auto it = std::find(agents.begin(), agents.end(), agent);
  if (it == agents.end()) throw std::out_of_range("agent not part of the experiment");
  return static_cast<std::size_t>(it - agents.begin());
}

namespace {

std::vector<StepRecord> play_ucb(const BanditInstance& inst, const RewardStream& stream,
                                 std::size_t horizon) {
  policies::ArmStatistic stat(inst.num_arms(), inst.class_values());
  policies::StreamCursor cursor(stream);
  std::vector<StepRecord> out;
  out.reserve(horizon);
  for (std::size_t t = 1; t <= horizon; ++t) {
    const Arm a = policies::ucb_choose(stat, t);
    const auto [cls, value] = cursor.pull(a);
    stat.update(a, cls, value);
    out.push_back({t, a, a, cls, value});
  }
  return out;
}

std::vector<StepRecord> play_human(const BanditInstance& inst, const RewardStream& stream,
                                   std::size_t horizon, const cpt::CptParams& params,
                                   std::uint64_t seed) {
  policies::HumanPolicy human(inst.num_arms(), inst.class_values(), params, seed);
  policies::StreamCursor cursor(stream);
  std::vector<StepRecord> out;
  out.reserve(horizon);
  for (std::size_t t = 1; t <= horizon; ++t) {
    const Arm a = human.choose(t);
    const auto [cls, value] = cursor.pull(a);
    human.observe(a, cls, value);
    out.push_back({t, a, a, cls, value});
  }
  return out;
}

std::vector<StepRecord> play_team(const BanditInstance& inst, const RewardStream& stream,
                                  std::size_t horizon, const cpt::CptParams& params,
                                  const policies::RobotConfig& robot_cfg, std::uint64_t seed) {
  policies::HumanPolicy human(inst.num_arms(), inst.class_values(), params, mix_seed(seed, 1));
  policies::RobotPolicy robot(inst.class_values(), inst.num_arms(), robot_cfg, mix_seed(seed, 2));
  policies::InteractionHistory history(inst.num_arms(), inst.num_classes());
  policies::StreamCursor cursor(stream);
  std::vector<StepRecord> out;
  out.reserve(horizon);
  for (std::size_t t = 1; t <= horizon; ++t) {
    out.push_back(policies::team_step(cursor, human, robot, history, t));
  }
  return out;
}

}  // namespace

std::vector<TrialResult> run_trial(const ExperimentConfig& cfg, std::size_t trial) {
  const BanditInstance& inst = cfg.bandit();
  const RewardStream stream = sample_stream(inst, cfg.horizon, trial_seed(cfg.master_seed, trial));

  std::vector<TrialResult> results;
  for (Agent agent : cfg.agents) {
    const std::uint64_t seed = agent_seed(cfg.master_seed, trial, agent_key(agent));
    TrialResult r;
    r.trial = trial;
    r.agent = agent;
    switch (agent) {
      case Agent::kUcb: r.transcript = play_ucb(inst, stream, cfg.horizon); break;
      case Agent::kRabUcb: r.transcript = play_human(inst, stream, cfg.horizon, cfg.human, seed); break;
      case Agent::kHrTeam:
        r.transcript = play_team(inst, stream, cfg.horizon, cfg.human, cfg.robot, seed);
        break;
    }
    r.arm_pull_counts.assign(inst.num_arms(), 0);
    for (const auto& s : r.transcript) {
      r.total_return += s.value;
      ++r.arm_pull_counts[s.robot_action];
    }
    results.push_back(std::move(r));
  }
  return results;
}

ExperimentRun run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentRun run;
  run.results.resize(cfg.trials);

  std::size_t workers = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, cfg.trials);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t trial = next.fetch_add(1);
      if (trial >= cfg.trials) return;
      try {
        run.results[trial] = run_trial(cfg, trial);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cfg.trials;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentSummary& s = run.summary;
  s.mab = cfg.bandit().name();
  s.agents = cfg.agents;
  stats::Groups groups;
  for (std::size_t i = 0; i < cfg.agents.size(); ++i) groups.push_back(returns_of(run, i));

  if (cfg.trials >= 2) {
    for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
      s.groups.push_back(stats::summarize(std::string(agent_label(cfg.agents[i])), groups[i]));
    }
    if (groups.size() >= 2) {
      s.anova = stats::one_way_anova(groups);
      s.tukey = stats::tukey_hsd(groups, cfg.alpha, cfg.tukey_draws,
                                 mix_seed(cfg.master_seed, fnv1a("tukey")));
    }
  } else {
    for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
      s.groups.push_back({std::string(agent_label(cfg.agents[i])), 1, groups[i][0], 0.0});
    }
  }
  return run;
}

std::vector<double> returns_of(const ExperimentRun& run, std::size_t agent_position) {
  std::vector<double> out;
  out.reserve(run.results.size());
  for (const auto& trial : run.results) out.push_back(trial.at(agent_position).total_return);
  return out;
}

double choice_fraction(const std::vector<StepRecord>& transcript, Arm arm, std::size_t from_step,
                       bool robot) {
  std::size_t hits = 0;
  std::size_t total = 0;
  for (const auto& s : transcript) {
    if (s.t < from_step) continue;
    ++total;
    if ((robot ? s.robot_action : s.human_action) == arm) ++hits;
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string transcripts_csv(const ExperimentRun& run) {
  std::string out = "trial,t,agent,human_action,robot_action,class,value\n";
  for (const auto& trial : run.results) {
    for (const auto& r : trial) {
      const std::string prefix = std::to_string(r.trial) + ",";
      for (const auto& s : r.transcript) {
        out += prefix;
        out += std::to_string(s.t) + "," + std::string(agent_key(r.agent)) + "," +
               std::to_string(s.human_action) + "," + std::to_string(s.robot_action) + "," +
               std::to_string(s.cls) + "," + format_number(s.value) + "\n";
      }
    }
  }
  return out;
}

std::string summary_csv(const ExperimentSummary& summary) {
  std::string out = "mab,agent,mean,std,n\n";
  for (std::size_t i = 0; i < summary.groups.size(); ++i) {
    const auto& g = summary.groups[i];
    out += summary.mab + "," + std::string(agent_key(summary.agents[i])) + "," +
           format_number(g.mean) + "," + format_number(g.std) + "," + std::to_string(g.n) + "\n";
  }
  return out;
}

std::string render_report(const ExperimentSummary& summary) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %-10s %12s %10s\n", "MAB", "Agent", "avg. return", "std.");
  out << line << std::string(49, '-') << "\n";
  for (std::size_t i = 0; i < summary.groups.size(); ++i) {
    const auto& g = summary.groups[i];
    std::snprintf(line, sizeof line, "%-14s %-10s %12s %10s\n",
                  i == 0 ? summary.mab.c_str() : "", g.name.c_str(), format_number(g.mean).c_str(),
                  format_number(g.std).c_str());
    out << line;
  }
  if (summary.anova) {
    const auto& a = *summary.anova;
    out << "\nOne-way ANOVA: F(" << a.df_between << ", " << a.df_within
        << ") = " << format_number(a.f_statistic) << ", p = " << format_number(a.p_value)
        << (a.degenerate ? " (zero within-group variance)" : "") << "\n";
  }
  if (summary.tukey) {
    const auto& t = *summary.tukey;
    out << "Tukey HSD (alpha = " << format_number(t.alpha) << ", " << t.mc_draws
        << " Monte Carlo draws):\n";
    for (const auto& p : t.pairs) {
      out << "  " << summary.groups[p.group_i].name << " vs " << summary.groups[p.group_j].name
          << ": diff = " << format_number(p.mean_diff) << ", q = " << format_number(p.q_statistic)
          << ", p = " << format_number(p.p_value) << ", "
          << (p.reject ? "reject" : "no difference") << "\n";
    }
  }
  return out.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

void write_outputs(const ExperimentRun& run, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "transcripts.csv", transcripts_csv(run));
  write_file(dir / "summary.csv", summary_csv(run.summary));
  write_file(dir / "report.txt", render_report(run.summary));
}

}  // namespace abandit::harness
