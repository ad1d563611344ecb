#include "abandit/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "abandit/rng.hpp"

namespace abandit::optim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = std::numbers::phi;            // expansion ratio
constexpr double kGoldenSection = 2.0 - std::numbers::phi;  // 0.381966...
constexpr std::size_t kMaxExpansions = 64;
constexpr std::size_t kMaxSectionSteps = 200;

struct BudgetExhausted {};

// Counts evaluations against a shared budget; non-finite values read as +inf.
class Evaluator {
 public:
  Evaluator(const Objective& f, std::size_t budget) : f_(f), budget_(budget) {}

  double operator()(std::span<const double> x) {
    if (count_ >= budget_) {
      exhausted_ = true;
      throw BudgetExhausted{};
    }
    ++count_;
    const double v = f_(x);
    return std::isfinite(v) ? v : kInf;
  }

  std::size_t count() const noexcept { return count_; }
  bool exhausted() const noexcept { return exhausted_; }

 private:
  const Objective& f_;
  std::size_t budget_;
  std::size_t count_ = 0;
  bool exhausted_ = false;
};

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Golden-section line search along a unit-free direction. Tracks the best
// point seen so an exhausted budget still yields a valid answer.
class LineSearch {
 public:
  LineSearch(Evaluator& eval, std::span<const double> origin, std::span<const double> direction,
             double f_origin, const MinimizeOptions& opts)
      : eval_(eval), origin_(origin), dir_(direction), opts_(opts), point_(origin.size()),
        best_f_(f_origin), f0_(f_origin) {
    dnorm_ = norm(direction);
  }

  LineResult run() {
    if (dnorm_ == 0.0) return {0.0, f0_, 0};
    try {
      search();
    } catch (const BudgetExhausted&) {
    }
    return {best_step_, best_f_, 0};
  }

 private:
  double at(double s) {
    for (std::size_t i = 0; i < point_.size(); ++i) point_[i] = origin_[i] + s * dir_[i];
    const double v = eval_(point_);
    if (v < best_f_) {
      best_f_ = v;
      best_step_ = s;
    }
    return v;
  }

  void search() {
    const double h = opts_.initial_step / dnorm_;
    double a = 0.0;
    double b = h;
    double fb = at(h);
    if (!(fb < f0_)) {
      const double fm = at(-h);
      if (fm < f0_) {
        b = -h;
        fb = fm;
      } else if (fb > f0_ && fm > f0_) {
        section(-h, 0.0, f0_, h);
        return;
      } else if (!escape_plateau(h, fb == f0_, fm == f0_, a, b, fb)) {
        return;
      }
    }
    // Descent expansion until the function turns up again.
    double c = b + kGolden * (b - a);
    double fc = at(c);
    std::size_t expansions = 0;
    while (fc < fb) {
      if (++expansions > kMaxExpansions) {
        // No finite bracket: leave the origin untouched.
        best_step_ = 0.0;
        best_f_ = f0_;
        return;
      }
      a = b;
      b = c;
      fb = fc;
      c = b + kGolden * (b - a);
      fc = at(c);
    }
    section(a, b, fb, c);
  }

  // The origin sits on a plateau on at least one side. Probe geometrically
  // growing steps on each flat side until one drops below f(0). On success
  // (a, b, fb) describe the first descending pair.
  bool escape_plateau(double h, bool flat_plus, bool flat_minus, double& a, double& b,
                      double& fb) {
    double prev = h;
    double step = h;
    for (std::size_t k = 0; k < kMaxExpansions && (flat_plus || flat_minus); ++k) {
      step *= kGolden;
      for (double sign : {1.0, -1.0}) {
        bool& flat = sign > 0.0 ? flat_plus : flat_minus;
        if (!flat) continue;
        const double f = at(sign * step);
        if (f < f0_) {
          a = sign * prev;
          b = sign * step;
          fb = f;
          return true;
        }
        if (f > f0_) flat = false;
      }
      prev = step;
    }
    return false;
  }

  // Golden-section refinement of a bracket a < b < c (or mirrored) with
  // f(b) no larger than either end.
  void section(double a, double b, double fb, double c) {
    double lo = std::min(a, c);
    double hi = std::max(a, c);
    double x = b, fx = fb;
    for (std::size_t it = 0; it < kMaxSectionSteps; ++it) {
      const double tol = opts_.x_tolerance * (1.0 + std::abs(x) * dnorm_) / dnorm_;
      if (hi - lo <= 2.0 * tol) break;
      // Probe the larger of the two sub-intervals.
      const double u = (x - lo > hi - x) ? x - kGoldenSection * (x - lo)
                                         : x + kGoldenSection * (hi - x);
      const double fu = at(u);
      if (fu <= fx) {
        if (u < x) hi = x; else lo = x;
        x = u;
        fx = fu;
      } else {
        if (u < x) lo = u; else hi = u;
      }
    }
  }

  Evaluator& eval_;
  std::span<const double> origin_;
  std::span<const double> dir_;
  const MinimizeOptions& opts_;
  Vector point_;
  double dnorm_ = 0.0;
  double best_step_ = 0.0;
  double best_f_;
  double f0_;
};

LineResult line_search(Evaluator& eval, std::span<const double> origin,
                       std::span<const double> direction, double f_origin,
                       const MinimizeOptions& opts) {
  const std::size_t before = eval.count();
  LineResult r = LineSearch(eval, origin, direction, f_origin, opts).run();
  r.evaluations = eval.count() - before;
  return r;
}

// One run of Powell's method from x; updates x and fx in place. Every move
// that lowers the global best is appended to `accepted`. Returns true on
// convergence by f_tolerance.
bool powell_run(Evaluator& eval, Vector& x, double& fx, const MinimizeOptions& opts,
                double& global_best, std::vector<double>& accepted) {
  const std::size_t n = x.size();
  auto identity = [n] {
    std::vector<Vector> dirs(n, Vector(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) dirs[i][i] = 1.0;
    return dirs;
  };
  std::vector<Vector> dirs = identity();

  auto accept = [&](double f) {
    if (f < global_best) {
      global_best = f;
      accepted.push_back(f);
    }
  };
  auto move = [&](const Vector& d, const LineResult& r) {
    if (r.step == 0.0 || !(r.f < fx)) return;
    for (std::size_t i = 0; i < n; ++i) x[i] += r.step * d[i];
    fx = r.f;
    accept(fx);
  };

  for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
    const Vector x_start = x;
    const double f_start = fx;
    double largest_drop = 0.0;
    std::size_t largest = 0;

    for (std::size_t i = 0; i < n; ++i) {
      const double before = fx;
      move(dirs[i], line_search(eval, x, dirs[i], fx, opts));
      if (eval.exhausted()) return false;
      if (before - fx > largest_drop) {
        largest_drop = before - fx;
        largest = i;
      }
    }

    if (f_start - fx < opts.f_tolerance) return true;

    Vector disp(n);
    for (std::size_t i = 0; i < n; ++i) disp[i] = x[i] - x_start[i];
    const double len = norm(disp);
    if (len > 0.0) {
      for (double& v : disp) v /= len;
      move(disp, line_search(eval, x, disp, fx, opts));
      if (eval.exhausted()) return false;
      dirs.erase(dirs.begin() + static_cast<std::ptrdiff_t>(largest));
      dirs.push_back(std::move(disp));
    }

    if ((iter + 1) % n == 0) dirs = identity();
  }
  return false;
}

}  // namespace

void MinimizeOptions::validate() const {
  if (!(x_tolerance > 0.0) || !(f_tolerance > 0.0)) {
    throw std::invalid_argument("minimize: tolerances must be positive");
  }
  if (!(initial_step > 0.0)) throw std::invalid_argument("minimize: initial_step must be positive");
  if (!(restart_scale >= 0.0)) throw std::invalid_argument("minimize: restart_scale must be >= 0");
}

LineResult line_minimize(const Objective& objective, std::span<const double> origin,
                         std::span<const double> direction, double f_origin,
                         const MinimizeOptions& opts) {
  Evaluator eval(objective, opts.max_evaluations);
  return line_search(eval, origin, direction, f_origin, opts);
}

LineResult line_minimize(const Objective& objective, std::span<const double> origin,
                         std::span<const double> direction, const MinimizeOptions& opts) {
  const double f0 = objective(origin);
  LineResult r = line_minimize(objective, origin, direction, f0, opts);
  r.evaluations += 1;
  return r;
}

MinimizeResult powell_minimize(const Objective& objective, Vector x0, const MinimizeOptions& opts) {
  opts.validate();
  if (x0.empty()) throw std::invalid_argument("powell_minimize: empty starting point");
  const double f0 = objective(x0);
  if (!std::isfinite(f0)) throw std::invalid_argument("powell_minimize: objective is not finite at x0");

  MinimizeResult result;
  result.x_best = x0;
  result.f_best = f0;
  result.accepted.push_back(f0);
  double global_best = f0;

  Evaluator eval(objective, opts.max_evaluations > 0 ? opts.max_evaluations - 1 : 0);
  Xoshiro256 rng(opts.seed);

  try {
    Vector x = x0;
    double fx = f0;
    result.converged = powell_run(eval, x, fx, opts, global_best, result.accepted);
    result.x_best = x;
    result.f_best = fx;

    for (std::size_t r = 0; r < opts.restarts; ++r) {
      Vector xs = result.x_best;
      for (double& v : xs) v += opts.restart_scale * (2.0 * rng.uniform() - 1.0);
      double fs = eval(xs);
      if (fs < global_best) {
        global_best = fs;
        result.accepted.push_back(fs);
      }
      const bool done = powell_run(eval, xs, fs, opts, global_best, result.accepted);
      if (fs < result.f_best) {
        result.x_best = xs;
        result.f_best = fs;
      }
      if (!done && eval.exhausted()) break;
    }
  } catch (const BudgetExhausted&) {
    result.converged = false;
  }
  result.evaluations = eval.count() + 1;
  return result;
}

}  // namespace abandit::optim
