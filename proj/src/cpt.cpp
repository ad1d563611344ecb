#include "abandit/cpt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "abandit/error.hpp"

namespace abandit::cpt {

void CptParams::validate() const {
  auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!in_unit(alpha)) throw ValidationError("cpt: alpha must lie in (0, 1]");
  if (!in_unit(beta)) throw ValidationError("cpt: beta must lie in (0, 1]");
  if (!(lambda >= 1.0)) throw ValidationError("cpt: lambda must be >= 1");
  if (!in_unit(gamma)) throw ValidationError("cpt: gamma must lie in (0, 1]");
  if (!in_unit(delta)) throw ValidationError("cpt: delta must lie in (0, 1]");
  if (!(theta >= 0.0)) throw ValidationError("cpt: theta must be >= 0");
}

Prospect::Prospect(std::vector<Outcome> outcomes) {
  if (outcomes.empty()) throw ValidationError("prospect has no outcomes");
  double total = 0.0;
  for (const auto& o : outcomes) {
    if (!(o.probability >= 0.0) || !std::isfinite(o.value)) {
      throw ValidationError("prospect outcome has a negative probability or non-finite value");
    }
    total += o.probability;
  }
  if (std::abs(total - 1.0) > kTolerance) {
    throw ValidationError("prospect probabilities sum to " + std::to_string(total));
  }
  std::sort(outcomes.begin(), outcomes.end(),
            [](const Outcome& a, const Outcome& b) { return a.value < b.value; });
  for (const auto& o : outcomes) {
    if (!outcomes_.empty() && outcomes_.back().value == o.value) {
      outcomes_.back().probability += o.probability;
    } else {
      outcomes_.push_back(o);
    }
  }
}

double Prospect::expectation() const {
  double e = 0.0;
  for (const auto& o : outcomes_) e += o.value * o.probability;
  return e;
}

double value_transform(double x, const CptParams& p) {
  if (x >= 0.0) return std::pow(x, p.alpha);
  return -p.lambda * std::pow(-x, p.beta);
}

double value_inverse(double y, const CptParams& p) {
  if (y >= 0.0) return std::pow(y, 1.0 / p.alpha);
  return -std::pow(-y / p.lambda, 1.0 / p.beta);
}

double probability_weight(double prob, double exponent) {
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw std::domain_error("probability_weight: " + std::to_string(prob) + " not in [0, 1]");
  }
  if (prob == 0.0) return 0.0;
  if (prob == 1.0) return 1.0;
  const double a = std::pow(prob, exponent);
  const double b = std::pow(1.0 - prob, exponent);
  return a / std::pow(a + b, 1.0 / exponent);
}

namespace {

// Cumulative sums accumulate rounding; keep them inside [0, 1].
double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

// Shared rank-dependent construction over ascending values.
std::vector<double> rank_dependent_weights(std::span<const double> probs,
                                           std::span<const double> values,
                                           const CptParams& p) {
  const std::size_t n = probs.size();
  std::vector<double> pi(n, 0.0);

  // Losses: cumulate from the worst outcome upward.
  double below = 0.0;
  for (std::size_t i = 0; i < n && values[i] < 0.0; ++i) {
    // The full cumulative of a distribution is exactly 1; w has infinite
    // slope there, so rounding in the running sum would leak into pi.
    const double upto = i + 1 == n ? 1.0 : below + probs[i];
    pi[i] = probability_weight(clamp01(upto), p.delta) - probability_weight(clamp01(below), p.delta);
    below = upto;
  }
  // Gains (including zero): cumulate from the best outcome downward.
  double above = 0.0;
  for (std::size_t i = n; i-- > 0 && values[i] >= 0.0;) {
    const double from = i == 0 ? 1.0 : above + probs[i];
    pi[i] = probability_weight(clamp01(from), p.gamma) - probability_weight(clamp01(above), p.gamma);
    above = from;
  }
  return pi;
}

}  // namespace

std::vector<double> decision_weights(const Prospect& prospect, const CptParams& p) {
  std::vector<double> probs;
  std::vector<double> values;
  for (const auto& o : prospect.outcomes()) {
    probs.push_back(o.probability);
    values.push_back(o.value);
  }
  return rank_dependent_weights(probs, values, p);
}

double cpt_value(const Prospect& prospect, const CptParams& p) {
  const auto pi = decision_weights(prospect, p);
  double total = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    total += pi[i] * value_transform(prospect.outcomes()[i].value, p);
  }
  return total;
}

std::vector<double> bias_probability_row(std::span<const double> probs,
                                         std::span<const double> class_values,
                                         const CptParams& p, Weighting mode) {
  if (probs.size() != class_values.size()) {
    throw std::invalid_argument("bias_probability_row: row and class sizes differ");
  }
  if (mode == Weighting::kPerEntry) {
    std::vector<double> out(probs.size());
    for (std::size_t k = 0; k < probs.size(); ++k) {
      const double exponent = class_values[k] < 0.0 ? p.delta : p.gamma;
      out[k] = probability_weight(clamp01(probs[k]), exponent);
    }
    return out;
  }
  return rank_dependent_weights(probs, class_values, p);
}

}  // namespace abandit::cpt
