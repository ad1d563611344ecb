#pragma once

// Cumulative prospect theory (Tversky-Kahneman 1992 functional forms).
//
//   value:      v(x) = x^alpha             x >= 0
//               v(x) = -lambda (-x)^beta   x <  0
//   weighting:  w(p) = p^c / (p^c + (1-p)^c)^(1/c),  c = gamma (gains), delta (losses)
//
// Decision weights are rank dependent. With outcomes sorted ascending, a gain
// x_i receives w+(P[X >= x_i]) - w+(P[X > x_i]) and a loss receives
// w-(P[X <= x_i]) - w-(P[X < x_i]). A zero outcome counts as a gain. The
// weights are not renormalized.

#include <span>
#include <utility>
#include <vector>

#include "abandit/bandit.hpp"

namespace abandit::cpt {

struct CptParams {
  double alpha = 0.5;
  double beta = 0.5;
  double lambda = 2.0;
  double gamma = 0.5;
  double delta = 0.5;
  double theta = 1.0;

  // All transforms reduce to the identity; theta is left untouched.
  static CptParams unbiased(double theta = 1.0) { return {1.0, 1.0, 1.0, 1.0, 1.0, theta}; }

  // Throws ValidationError when a parameter leaves its admissible range.
  void validate() const;
};

struct Outcome {
  double value = 0.0;
  double probability = 0.0;
};

// Canonical discrete lottery: values strictly ascending, probabilities sum to 1.
class Prospect {
 public:
  static constexpr double kTolerance = 1e-9;

  // Sorts, merges duplicate values and validates. Throws ValidationError.
  explicit Prospect(std::vector<Outcome> outcomes);

  static Prospect sure(double value) { return Prospect({{value, 1.0}}); }

  const std::vector<Outcome>& outcomes() const noexcept { return outcomes_; }
  std::size_t size() const noexcept { return outcomes_.size(); }
  double expectation() const;

 private:
  std::vector<Outcome> outcomes_;
};

double value_transform(double x, const CptParams& p);
double value_inverse(double y, const CptParams& p);

// Throws std::domain_error for prob outside [0, 1].
double probability_weight(double prob, double exponent);

std::vector<double> decision_weights(const Prospect& prospect, const CptParams& p);
double cpt_value(const Prospect& prospect, const CptParams& p);

enum class Weighting {
  kCumulative,  // rank-dependent decision weights (default)
  kPerEntry,    // w(p_k) applied to each class independently
};

// Decision weights for one arm's class distribution, using the ascending
// class order and the sign of each class value. Independent of any reward
// estimate; the output is not renormalized.
std::vector<double> bias_probability_row(std::span<const double> probs,
                                         std::span<const double> class_values,
                                         const CptParams& p,
                                         Weighting mode = Weighting::kCumulative);

}  // namespace abandit::cpt
