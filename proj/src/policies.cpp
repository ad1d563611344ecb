#include "abandit/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "abandit/error.hpp"

namespace abandit::policies {

ArmStatistic::ArmStatistic(std::size_t num_arms, std::vector<double> class_values)
    : pulls_(num_arms, 0),
      counts_(num_arms, class_values.size()),
      sums_(num_arms, 0.0),
      class_values_(std::move(class_values)) {}

double ArmStatistic::mean_reward(Arm arm) const {
  if (pulls(arm) == 0) throw std::logic_error("mean_reward of an unpulled arm");
  return sums_[arm] / static_cast<double>(pulls_[arm]);
}

std::vector<double> ArmStatistic::empirical_probs(Arm arm) const {
  if (pulls(arm) == 0) throw std::logic_error("empirical_probs of an unpulled arm");
  std::vector<double> probs(num_classes());
  const double n = static_cast<double>(pulls_[arm]);
  for (std::size_t k = 0; k < probs.size(); ++k) probs[k] = counts_(arm, k) / n;
  return probs;
}

cpt::Prospect ArmStatistic::prospect(Arm arm) const {
  const auto probs = empirical_probs(arm);
  std::vector<cpt::Outcome> outcomes;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] > 0.0) outcomes.push_back({class_values_[k], probs[k]});
  }
  return cpt::Prospect(std::move(outcomes));
}

void ArmStatistic::update(Arm arm, ClassIndex k, double value) {
  if (arm >= num_arms() || k >= num_classes()) {
    throw std::invalid_argument("ArmStatistic::update: index out of range");
  }
  ++pulls_[arm];
  counts_(arm, k) += 1.0;
  sums_[arm] += value;
  ++total_;
}

double exploration_bonus(std::size_t t, std::size_t pulls) {
  return std::sqrt(2.0 * std::log(static_cast<double>(t)) / static_cast<double>(pulls));
}

std::optional<double> ucb_index(const ArmStatistic& stat, Arm arm, std::size_t t) {
  if (t < 1) throw std::invalid_argument("ucb_index: t must be >= 1");
  if (stat.pulls(arm) == 0) return std::nullopt;
  return stat.mean_reward(arm) + exploration_bonus(t, stat.pulls(arm));
}

namespace {

std::optional<Arm> first_unpulled(const ArmStatistic& stat) {
  for (Arm a = 0; a < stat.num_arms(); ++a) {
    if (stat.pulls(a) == 0) return a;
  }
  return std::nullopt;
}

}  // namespace

Arm ucb_choose(const ArmStatistic& stat, std::size_t t) {
  if (auto a = first_unpulled(stat)) return *a;
  Arm best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (Arm a = 0; a < stat.num_arms(); ++a) {
    const double idx = *ucb_index(stat, a, t);
    if (idx > best_index) {
      best_index = idx;
      best = a;
    }
  }
  return best;
}

std::optional<double> rab_ucb_index(const ArmStatistic& stat, Arm arm, std::size_t t,
                                    const cpt::CptParams& params) {
  if (t < 1) throw std::invalid_argument("rab_ucb_index: t must be >= 1");
  if (stat.pulls(arm) == 0) return std::nullopt;
  return cpt::cpt_value(stat.prospect(arm), params) + exploration_bonus(t, stat.pulls(arm));
}

std::vector<double> noisy_rational_probs(std::span<const double> values, double theta) {
  const double top = *std::max_element(values.begin(), values.end());
  std::vector<double> probs(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    probs[i] = theta == 0.0 ? 1.0 : std::exp(theta * (values[i] - top));
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

Arm sample_index(std::span<const double> probs, Xoshiro256& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  return last_positive;
}

Arm rab_ucb_choose(const ArmStatistic& stat, const cpt::CptParams& params, std::size_t t,
                   Xoshiro256& rng) {
  if (auto a = first_unpulled(stat)) return *a;
  std::vector<double> q(stat.num_arms());
  for (Arm a = 0; a < stat.num_arms(); ++a) q[a] = *rab_ucb_index(stat, a, t, params);
  return sample_index(noisy_rational_probs(q, params.theta), rng);
}

void rab_ucb_update(ArmStatistic& stat, Arm arm, ClassIndex k, double value) {
  stat.update(arm, k, value);
}

void InteractionHistory::append(const Interaction& record) {
  if (record.step != records_.size() + 1) {
    throw std::invalid_argument("InteractionHistory: expected step " +
                                std::to_string(records_.size() + 1) + ", got " +
                                std::to_string(record.step));
  }
  if (record.human_action >= num_arms_ || record.robot_action >= num_arms_ ||
      record.cls >= num_classes_) {
    throw std::invalid_argument("InteractionHistory: index out of range");
  }
  records_.push_back(record);
}

Matrix smoothed_probabilities(const Matrix& counts, double pseudocount) {
  Matrix probs(counts.rows(), counts.cols());
  const double m = static_cast<double>(counts.cols());
  for (std::size_t a = 0; a < counts.rows(); ++a) {
    double n = 0.0;
    for (double c : counts.row(a)) n += c;
    for (std::size_t k = 0; k < counts.cols(); ++k) {
      probs(a, k) = (counts(a, k) + pseudocount) / (n + m * pseudocount);
    }
  }
  return probs;
}

std::vector<Matrix> build_probability_statistics(const InteractionHistory& history,
                                                 std::size_t upto, double pseudocount) {
  if (upto > history.size() + 1) {
    throw std::invalid_argument("build_probability_statistics: upto beyond recorded history");
  }
  if (!(pseudocount > 0.0)) throw std::invalid_argument("pseudocount must be positive");
  Matrix counts(history.num_arms(), history.num_classes());
  std::vector<Matrix> stats;
  stats.reserve(upto);
  for (std::size_t i = 1; i <= upto; ++i) {
    stats.push_back(smoothed_probabilities(counts, pseudocount));
    if (i <= history.size()) {
      const auto& r = history.records()[i - 1];
      counts(r.robot_action, r.cls) += 1.0;
    }
  }
  return stats;
}

Matrix bias_probability_matrix(const Matrix& probs, std::span<const double> class_values,
                               const cpt::CptParams& params, cpt::Weighting mode) {
  Matrix out(probs.rows(), probs.cols());
  for (std::size_t a = 0; a < probs.rows(); ++a) {
    const auto row = cpt::bias_probability_row(probs.row(a), class_values, params, mode);
    std::copy(row.begin(), row.end(), out.row(a).begin());
  }
  return out;
}

Arm argmax_expected(const Matrix& probs, std::span<const double> rewards) {
  Arm best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (Arm a = 0; a < probs.rows(); ++a) {
    double v = 0.0;
    for (std::size_t k = 0; k < probs.cols(); ++k) v += probs(a, k) * rewards[k];
    if (v > best_value) {
      best_value = v;
      best = a;
    }
  }
  return best;
}

std::size_t mismatch_count(std::span<const Matrix> biased, std::span<const Arm> human_actions,
                           std::span<const double> rewards) {
  if (biased.size() != human_actions.size()) {
    throw std::invalid_argument("mismatch_count: statistics and actions differ in length");
  }
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < biased.size(); ++i) {
    if (argmax_expected(biased[i], rewards) != human_actions[i]) ++mismatches;
  }
  return mismatches;
}

optim::MinimizeOptions default_fit_options() {
  optim::MinimizeOptions opts;
  opts.f_tolerance = 0.5;  // the mismatch count is integer valued
  return opts;
}

std::vector<double> fit_reward_values(std::span<const Matrix> biased,
                                      std::span<const Arm> human_actions,
                                      std::vector<double> start,
                                      const optim::MinimizeOptions& opts) {
  if (biased.size() != human_actions.size()) {
    throw std::invalid_argument("fit_reward_values: statistics and actions differ in length");
  }
  if (biased.empty()) return start;
  const optim::Objective objective = [&](std::span<const double> r) {
    return static_cast<double>(mismatch_count(biased, human_actions, r));
  };
  return optim::powell_minimize(objective, std::move(start), opts).x_best;
}

std::vector<double> fit_reward_values(std::span<const Matrix> biased,
                                      std::span<const Arm> human_actions, double r0,
                                      std::size_t num_classes,
                                      const optim::MinimizeOptions& opts) {
  return fit_reward_values(biased, human_actions, std::vector<double>(num_classes, r0), opts);
}

void RobotConfig::validate(std::size_t num_arms) const {
  human_params.validate();
  if (effective_warmup(num_arms) < num_arms) {
    throw ValidationError("robot: warmup_steps must be at least the number of arms");
  }
  if (refit_period < 1) throw ValidationError("robot: refit_period must be >= 1");
  if (!(smoothing_pseudocount > 0.0)) throw ValidationError("robot: smoothing_pseudocount must be > 0");
  if (!std::isfinite(r0)) throw ValidationError("robot: r0 must be finite");
  minimizer.validate();
}

RobotPolicy::RobotPolicy(std::vector<double> class_values, std::size_t num_arms, RobotConfig cfg,
                         std::uint64_t seed)
    : class_values_(std::move(class_values)),
      num_arms_(num_arms),
      cfg_(std::move(cfg)),
      seed_(seed),
      counts_(num_arms, class_values_.size()),
      fitted_(class_values_.size(), cfg_.r0) {
  cfg_.validate(num_arms_);
  debiased_.resize(fitted_.size());
  for (std::size_t k = 0; k < fitted_.size(); ++k) {
    debiased_[k] = cpt::value_inverse(fitted_[k], cfg_.human_params);
  }
}

void RobotPolicy::absorb(const InteractionHistory& history) {
  for (std::size_t i = biased_.size(); i < history.size(); ++i) {
    const auto& r = history.records()[i];
    const Matrix p = smoothed_probabilities(counts_, cfg_.smoothing_pseudocount);
    biased_.push_back(
        bias_probability_matrix(p, class_values_, cfg_.human_params, cfg_.weighting));
    human_actions_.push_back(r.human_action);
    counts_(r.robot_action, r.cls) += 1.0;
  }
}

Arm RobotPolicy::choose(const InteractionHistory& history, std::size_t t) {
  if (t < 1) throw std::invalid_argument("RobotPolicy::choose: t must be >= 1");
  if (history.size() + 1 != t) {
    throw std::invalid_argument("RobotPolicy::choose: history must hold steps 1..t-1");
  }
  absorb(history);

  const std::size_t warmup = cfg_.effective_warmup(num_arms_);
  if (t <= warmup) return (t - 1) % num_arms_;

  const bool due = !have_fit_ || (t - last_fit_step_) >= cfg_.refit_period;
  if (due) {
    optim::MinimizeOptions opts = cfg_.minimizer;
    opts.seed = mix_seed(seed_, t);
    std::vector<double> start =
        (have_fit_ && cfg_.warm_start) ? fitted_ : std::vector<double>(fitted_.size(), cfg_.r0);
    fitted_ = fit_reward_values(biased_, human_actions_, std::move(start), opts);
    for (std::size_t k = 0; k < fitted_.size(); ++k) {
      debiased_[k] = cpt::value_inverse(fitted_[k], cfg_.human_params);
    }
    have_fit_ = true;
    last_fit_step_ = t;
  }
  const Matrix current = smoothed_probabilities(counts_, cfg_.smoothing_pseudocount);
  return argmax_expected(current, debiased_);
}

Arm robot_choose(const InteractionHistory& history, std::span<const double> class_values,
                 const RobotConfig& cfg, std::size_t t) {
  RobotPolicy robot({class_values.begin(), class_values.end()}, history.num_arms(), cfg);
  return robot.choose(history, t);
}

HumanPolicy::HumanPolicy(std::size_t num_arms, std::vector<double> class_values,
                         cpt::CptParams params, std::uint64_t seed)
    : stat_(num_arms, std::move(class_values)), params_(params), rng_(seed) {
  params_.validate();
}

std::pair<ClassIndex, double> StreamCursor::pull(Arm arm) {
  const auto outcome = stream_.pull(arm, next_.at(arm));
  ++next_[arm];
  return outcome;
}

StepRecord team_step(StreamCursor& cursor, HumanPolicy& human, RobotPolicy& robot,
                     InteractionHistory& history, std::size_t t) {
  StepRecord rec;
  rec.t = t;
  rec.robot_action = robot.choose(history, t);
  rec.human_action = human.choose(t);
  const auto [cls, value] = cursor.pull(rec.robot_action);
  rec.cls = cls;
  rec.value = value;
  human.observe(rec.robot_action, cls, value);
  history.append({t, rec.human_action, rec.robot_action, cls});
  return rec;
}

}  // namespace abandit::policies
