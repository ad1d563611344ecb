#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abandit/bandit.hpp"
#include "abandit/cpt.hpp"
#include "abandit/policies.hpp"
#include "abandit/stats.hpp"

namespace abandit::harness {

enum class Agent { kUcb, kRabUcb, kHrTeam };

// Config/CSV key ("ucb", "rab_ucb", "hr_team").
std::string_view agent_key(Agent agent);
// Table label ("UCB", "RAB UCB", "HR Team").
std::string_view agent_label(Agent agent);
Agent parse_agent(std::string_view key);

struct ExperimentConfig {
  std::optional<BanditInstance> instance;
  std::size_t horizon = 300;
  std::size_t trials = 300;
  std::uint64_t master_seed = 1;
  cpt::CptParams human;
  policies::RobotConfig robot;
  std::vector<Agent> agents{Agent::kUcb, Agent::kRabUcb, Agent::kHrTeam};
  std::filesystem::path output_dir = "out";
  std::size_t threads = 0;  // 0: hardware concurrency
  double alpha = 0.05;
  std::size_t tukey_draws = stats::kDefaultMcDraws;

  // Throws ValidationError.
  void validate() const;
  const BanditInstance& bandit() const;
};

// Environment variable that, when set, replaces output_dir.
inline constexpr const char* kOutputDirEnv = "ABANDIT_OUTPUT_DIR";

// INI sections: [experiment], [human], [robot], plus either
// `instance_file` in [experiment] or inline [classes]/[arm.<i>] sections.
// Relative instance paths resolve against `base_dir`.
ExperimentConfig parse_config(const std::string& text,
                              const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);
// Writes the instance inline.
std::string format_config(const ExperimentConfig& cfg);

struct TrialResult {
  std::size_t trial = 0;
  Agent agent = Agent::kUcb;
  double total_return = 0.0;
  std::vector<std::size_t> arm_pull_counts;
  std::vector<policies::StepRecord> transcript;
};

struct ExperimentSummary {
  std::string mab;
  std::vector<Agent> agents;
  std::vector<stats::GroupSummary> groups;
  std::optional<stats::AnovaResult> anova;
  std::optional<stats::TukeyResult> tukey;

  const stats::GroupSummary& group(Agent agent) const;
  std::size_t group_index(Agent agent) const;
};

struct ExperimentRun {
  ExperimentSummary summary;
  // results[trial][agent position in cfg.agents]
  std::vector<std::vector<TrialResult>> results;
};

// Plays every enabled agent of one trial against the same reward stream.
std::vector<TrialResult> run_trial(const ExperimentConfig& cfg, std::size_t trial);

// Runs all trials (in parallel when threads != 1) and analyses the returns.
ExperimentRun run_experiment(const ExperimentConfig& cfg);

std::vector<double> returns_of(const ExperimentRun& run, std::size_t agent_position);

// Fraction of steps t >= from_step where the chosen arm equals `arm`;
// `robot` selects the executed column, otherwise the human column.
double choice_fraction(const std::vector<policies::StepRecord>& transcript, Arm arm,
                       std::size_t from_step, bool robot);

std::string format_number(double value);  // %.6g
std::string transcripts_csv(const ExperimentRun& run);
std::string summary_csv(const ExperimentSummary& summary);
std::string render_report(const ExperimentSummary& summary);

// Writes transcripts.csv, summary.csv and report.txt; creates the directory.
void write_outputs(const ExperimentRun& run, const std::filesystem::path& dir);

}  // namespace abandit::harness
