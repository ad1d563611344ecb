#pragma once

// Agents of the assistive bandit: a rational UCB1 player, the risk-averse
// biased human (CPT-transformed UCB with a noisy-rational final choice), and
// the assisting robot that infers the human's latent class rewards from its
// choices and acts on the de-biased estimate.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "abandit/bandit.hpp"
#include "abandit/cpt.hpp"
#include "abandit/optim.hpp"
#include "abandit/rng.hpp"

namespace abandit::policies {

// Pull counts, class counts and reward sums per arm.
class ArmStatistic {
 public:
  ArmStatistic(std::size_t num_arms, std::vector<double> class_values);

  std::size_t num_arms() const noexcept { return pulls_.size(); }
  std::size_t num_classes() const noexcept { return class_values_.size(); }
  std::size_t pulls(Arm arm) const { return pulls_.at(arm); }
  std::size_t total_pulls() const noexcept { return total_; }
  std::size_t class_count(Arm arm, ClassIndex k) const { return counts_(arm, k); }
  double reward_sum(Arm arm) const { return sums_.at(arm); }
  double mean_reward(Arm arm) const;  // requires pulls(arm) > 0
  const std::vector<double>& class_values() const noexcept { return class_values_; }

  // Empirical class frequencies; requires pulls(arm) > 0.
  std::vector<double> empirical_probs(Arm arm) const;
  cpt::Prospect prospect(Arm arm) const;

  void update(Arm arm, ClassIndex k, double value);

 private:
  std::vector<std::size_t> pulls_;
  Matrix counts_;
  std::vector<double> sums_;
  std::vector<double> class_values_;
  std::size_t total_ = 0;
};

double exploration_bonus(std::size_t t, std::size_t pulls);

// Empirical mean plus sqrt(2 ln t / n). nullopt for an unpulled arm, which
// callers treat as an infinite index (forced exploration).
std::optional<double> ucb_index(const ArmStatistic& stat, Arm arm, std::size_t t);

// Lowest-index unpulled arm first, then argmax of the UCB index (ties to the
// lowest index).
Arm ucb_choose(const ArmStatistic& stat, std::size_t t);

// CPT value of the arm's empirical prospect plus the exploration bonus.
std::optional<double> rab_ucb_index(const ArmStatistic& stat, Arm arm, std::size_t t,
                                    const cpt::CptParams& params);

// Boltzmann probabilities P(a) proportional to exp(theta * value_a).
std::vector<double> noisy_rational_probs(std::span<const double> values, double theta);
Arm sample_index(std::span<const double> probs, Xoshiro256& rng);

// Unpulled arms first (no randomness consumed); otherwise a noisy-rational
// draw over the RAB UCB indices.
Arm rab_ucb_choose(const ArmStatistic& stat, const cpt::CptParams& params, std::size_t t,
                   Xoshiro256& rng);

void rab_ucb_update(ArmStatistic& stat, Arm arm, ClassIndex k, double value);

struct Interaction {
  std::size_t step = 0;
  Arm human_action = 0;
  Arm robot_action = 0;
  ClassIndex cls = 0;
};

// The robot's record of (human choice, executed choice, observed class).
class InteractionHistory {
 public:
  InteractionHistory(std::size_t num_arms, std::size_t num_classes)
      : num_arms_(num_arms), num_classes_(num_classes) {}

  // Steps must be 1, 2, 3, ...; throws std::invalid_argument otherwise.
  void append(const Interaction& record);

  const std::vector<Interaction>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  std::size_t num_arms() const noexcept { return num_arms_; }
  std::size_t num_classes() const noexcept { return num_classes_; }

 private:
  std::size_t num_arms_;
  std::size_t num_classes_;
  std::vector<Interaction> records_;
};

// Laplace-smoothed class frequencies per executed arm, from class counts.
Matrix smoothed_probabilities(const Matrix& counts, double pseudocount);

// P_1..P_upto, where P_i uses only records with step < i. upto may exceed the
// last recorded step by one (the statistic for the upcoming choice).
std::vector<Matrix> build_probability_statistics(const InteractionHistory& history,
                                                 std::size_t upto, double pseudocount);

Matrix bias_probability_matrix(const Matrix& probs, std::span<const double> class_values,
                               const cpt::CptParams& params,
                               cpt::Weighting mode = cpt::Weighting::kCumulative);

// argmax_a (matrix row a . rewards), ties to the lowest arm.
Arm argmax_expected(const Matrix& probs, std::span<const double> rewards);

// Number of steps where argmax_a (P_i R) disagrees with the human's choice.
std::size_t mismatch_count(std::span<const Matrix> biased, std::span<const Arm> human_actions,
                           std::span<const double> rewards);

// Minimizes mismatch_count from `start` with Powell's method. An empty history
// returns `start` without invoking the minimizer.
std::vector<double> fit_reward_values(std::span<const Matrix> biased,
                                      std::span<const Arm> human_actions,
                                      std::vector<double> start,
                                      const optim::MinimizeOptions& opts);

std::vector<double> fit_reward_values(std::span<const Matrix> biased,
                                      std::span<const Arm> human_actions, double r0,
                                      std::size_t num_classes, const optim::MinimizeOptions& opts);

optim::MinimizeOptions default_fit_options();

struct RobotConfig {
  cpt::CptParams human_params;
  double r0 = 1.0;
  std::size_t warmup_steps = 0;  // 0 selects the number of arms
  std::size_t refit_period = 1;
  double smoothing_pseudocount = 1.0;
  // Refits start from the previous fit rather than from r0.
  bool warm_start = false;
  cpt::Weighting weighting = cpt::Weighting::kCumulative;
  optim::MinimizeOptions minimizer = default_fit_options();

  std::size_t effective_warmup(std::size_t num_arms) const {
    return warmup_steps == 0 ? num_arms : warmup_steps;
  }
  void validate(std::size_t num_arms) const;
};

// Stateful robot policy. Keeps the biased statistics of past steps and the
// last fit so consecutive calls only process new records.
class RobotPolicy {
 public:
  RobotPolicy(std::vector<double> class_values, std::size_t num_arms, RobotConfig cfg,
              std::uint64_t seed = 0);

  // Chooses a^R_t given the history of steps 1..t-1.
  Arm choose(const InteractionHistory& history, std::size_t t);

  const std::vector<double>& fitted_rewards() const noexcept { return fitted_; }
  const std::vector<double>& debiased_rewards() const noexcept { return debiased_; }
  const RobotConfig& config() const noexcept { return cfg_; }

 private:
  void absorb(const InteractionHistory& history);

  std::vector<double> class_values_;
  std::size_t num_arms_;
  RobotConfig cfg_;
  std::uint64_t seed_;

  Matrix counts_;
  std::vector<Matrix> biased_;
  std::vector<Arm> human_actions_;
  std::vector<double> fitted_;
  std::vector<double> debiased_;
  bool have_fit_ = false;
  std::size_t last_fit_step_ = 0;
};

// Stateless single decision (fits from r0).
Arm robot_choose(const InteractionHistory& history, std::span<const double> class_values,
                 const RobotConfig& cfg, std::size_t t);

class HumanPolicy {
 public:
  HumanPolicy(std::size_t num_arms, std::vector<double> class_values, cpt::CptParams params,
              std::uint64_t seed);

  Arm choose(std::size_t t) { return rab_ucb_choose(stat_, params_, t, rng_); }
  void observe(Arm arm, ClassIndex k, double value) { rab_ucb_update(stat_, arm, k, value); }
  const ArmStatistic& statistic() const noexcept { return stat_; }

 private:
  ArmStatistic stat_;
  cpt::CptParams params_;
  Xoshiro256 rng_;
};

struct StepRecord {
  std::size_t t = 0;
  Arm human_action = 0;
  Arm robot_action = 0;  // executed arm
  ClassIndex cls = 0;
  double value = 0.0;
};

// Tracks how often each arm has been pulled against a shared stream.
class StreamCursor {
 public:
  explicit StreamCursor(const RewardStream& stream)
      : stream_(stream), next_(stream.num_arms(), 0) {}

  std::pair<ClassIndex, double> pull(Arm arm);
  std::size_t pulls(Arm arm) const { return next_.at(arm); }

 private:
  const RewardStream& stream_;
  std::vector<std::size_t> next_;
};

// One round of the human-robot team: the robot commits, the human's choice is
// recorded, the robot's arm is executed, both observe the outcome.
StepRecord team_step(StreamCursor& cursor, HumanPolicy& human, RobotPolicy& robot,
                     InteractionHistory& history, std::size_t t);

}  // namespace abandit::policies
