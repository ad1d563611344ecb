#pragma once

// Powell's conjugate direction method with a bracketing golden-section line
// search. No derivatives are used anywhere, so the minimizer also works on
// piecewise-constant objectives such as misclassification counts.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace abandit::optim {

using Vector = std::vector<double>;
using Objective = std::function<double(std::span<const double>)>;

struct MinimizeOptions {
  std::size_t max_iterations = 100;
  std::size_t max_evaluations = 10000;
  double x_tolerance = 1e-8;
  double f_tolerance = 1e-10;
  std::size_t restarts = 4;
  double restart_scale = 1.0;
  std::uint64_t seed = 0;
  // Initial trial step of each line search, in units of the direction.
  double initial_step = 1.0;

  void validate() const;
};

struct MinimizeResult {
  Vector x_best;
  double f_best = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
  // f after every accepted move, starting with f(x0). Nonincreasing.
  std::vector<double> accepted;
};

struct LineResult {
  double step = 0.0;
  double f = 0.0;
  std::size_t evaluations = 0;
};

// Minimizes s -> f(origin + s * direction). `f_origin` is the known value at
// s = 0. The returned step never has f above f_origin; step 0 is returned when
// no strictly better point was found.
LineResult line_minimize(const Objective& objective, std::span<const double> origin,
                         std::span<const double> direction, double f_origin,
                         const MinimizeOptions& opts);

LineResult line_minimize(const Objective& objective, std::span<const double> origin,
                         std::span<const double> direction, const MinimizeOptions& opts);

// Throws std::invalid_argument for an empty x0 or a non-finite f(x0).
MinimizeResult powell_minimize(const Objective& objective, Vector x0,
                               const MinimizeOptions& opts = {});

}  // namespace abandit::optim
