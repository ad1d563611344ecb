// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <boost/math/distributions/fisher_f.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "abandit/bandit.hpp"
#include "abandit/cpt.hpp"
#include "abandit/harness.hpp"
#include "abandit/optim.hpp"
#include "abandit/rng.hpp"
#include "abandit/stats.hpp"

using namespace abandit;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void require(Outcome& o, bool ok, const std::string& what) {
  if (!ok) {
    o.pass = false;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += what;
  }
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome criterion_cpt() {
  Outcome o;
  const cpt::CptParams p;  // theta 1, alpha = beta = 0.5, lambda 2, gamma = delta = 0.5
  double worst = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double x = -100.0 + i * 0.01;
    worst = std::max(worst, std::abs(cpt::value_inverse(cpt::value_transform(x, p), p) - x));
  }
  require(o, worst <= 1e-9, fmt("round trip error %.3g", worst));
  const double w5 = cpt::probability_weight(0.5, 0.5);
  const double w01 = cpt::probability_weight(0.01, 0.5);
  require(o, std::abs(w5 - 0.35355) <= 1e-5, fmt("w(0.5) = %.8f", w5));
  require(o, std::abs(w01 - 0.08340) <= 1e-5, fmt("w(0.01) = %.8f", w01));
  const double v = cpt::cpt_value(cpt::Prospect({{-1.0, 0.3}, {2.0, 0.7}}), p);
  require(o, std::abs(v - 0.04578) <= 1e-3, fmt("cpt value %.6f", v));
  if (o.pass) {
    o.detail = fmt("max round-trip error %.2g", worst) + fmt(", w(0.5) = %.6f", w5) +
               fmt(", w(0.01) = %.6f", w01) + fmt(", V = %.6f", v);
  }
  return o;
}

optim::Vector solve(std::vector<optim::Vector> a, optim::Vector b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  optim::Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

bool monotone(const std::vector<double>& f) {
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (f[i] > f[i - 1]) return false;
  }
  return true;
}

Outcome criterion_optimizer() {
  Outcome o;
  Xoshiro256 rng(2);
  double worst = 0.0;
  bool all_monotone = true;
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 1 + rng() % 4;
    std::vector<optim::Vector> m(n, optim::Vector(n));
    for (auto& row : m) {
      for (double& v : row) v = 2.0 * rng.uniform() - 1.0;
    }
    std::vector<optim::Vector> a(n, optim::Vector(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) a[i][j] += m[k][i] * m[k][j];
      }
      a[i][i] += 0.1;
    }
    optim::Vector b(n);
    for (double& v : b) v = 4.0 * rng.uniform() - 2.0;
    // f(x) = x'Ax + b'x, minimized where 2 A x = -b.
    const optim::Objective f = [&](std::span<const double> x) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double ax = 0.0;
        for (std::size_t j = 0; j < n; ++j) ax += a[i][j] * x[j];
        s += x[i] * ax + b[i] * x[i];
      }
      return s;
    };
    optim::MinimizeOptions opts;
    opts.f_tolerance = 1e-14;
    opts.max_iterations = 500;
    opts.max_evaluations = 100000;
    opts.seed = rep;
    const auto r = optim::powell_minimize(f, optim::Vector(n, 0.0), opts);
    optim::Vector rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -0.5 * b[i];
    const auto expected = solve(a, rhs);
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(r.x_best[i] - expected[i]));
    all_monotone = all_monotone && monotone(r.accepted);
  }
  require(o, worst <= 1e-6, fmt("SPD quadratic error %.3g", worst));

  const optim::Objective rosen = [](std::span<const double> x) {
    const double u = 1.0 - x[0];
    const double v = x[1] - x[0] * x[0];
    return u * u + 100.0 * v * v;
  };
  optim::MinimizeOptions opts;
  opts.max_iterations = 2000;
  opts.max_evaluations = 200000;
  const auto r = optim::powell_minimize(rosen, {-1.2, 1.0}, opts);
  const double rerr = std::max(std::abs(r.x_best[0] - 1.0), std::abs(r.x_best[1] - 1.0));
  require(o, rerr <= 1e-5 && r.converged, fmt("Rosenbrock error %.3g", rerr));
  all_monotone = all_monotone && monotone(r.accepted);
  require(o, all_monotone, "accepted f sequence not monotone");
  if (o.pass) {
    o.detail = fmt("SPD max error %.2g", worst) + fmt(", Rosenbrock error %.2g", rerr) +
               ", accepted f monotone";
  }
  return o;
}

Outcome criterion_stats() {
  Outcome o;
  Xoshiro256 rng(3);
  double worst_f = 0.0;
  double worst_p = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    stats::Groups groups(3);
    for (auto& g : groups) {
      const double shift = 0.8 * rng.uniform();
      for (int j = 0; j < 30; ++j) g.push_back(shift + rng.normal());
    }
    // Reference: F from total and within sums of squares, p from Boost.Math.
    double grand = 0.0;
    for (const auto& g : groups) {
      for (double x : g) grand += x;
    }
    grand /= 90.0;
    double sst = 0.0;
    double ssw = 0.0;
    for (const auto& g : groups) {
      double m = 0.0;
      for (double x : g) m += x;
      m /= 30.0;
      for (double x : g) {
        sst += (x - grand) * (x - grand);
        ssw += (x - m) * (x - m);
      }
    }
    const double f_ref = ((sst - ssw) / 2.0) / (ssw / 87.0);
    const double p_ref =
        boost::math::cdf(boost::math::complement(boost::math::fisher_f(2.0, 87.0), f_ref));
    const auto r = stats::one_way_anova(groups);
    worst_f = std::max(worst_f, std::abs(r.f_statistic - f_ref));
    worst_p = std::max(worst_p, std::abs(r.p_value - p_ref));
  }
  require(o, worst_f <= 1e-6, fmt("F error %.3g", worst_f));
  require(o, worst_p <= 1e-4, fmt("p error %.3g", worst_p));

  struct Case {
    std::size_t k;
    double df;
    double q;
    double p;
  };
  const Case cases[] = {{3, 20.0, 3.578, 0.05}, {3, 60.0, 3.399, 0.05}, {3, 10.0, 5.27, 0.01}};
  double worst_q = 0.0;
  for (const auto& c : cases) {
    const auto null = stats::studentized_range_null(c.k, c.df, stats::kDefaultMcDraws, 5);
    worst_q = std::max(worst_q, std::abs(stats::studentized_range_survival(null, c.q) - c.p));
  }
  require(o, worst_q <= 0.01, fmt("Tukey table error %.3g", worst_q));
  if (o.pass) {
    o.detail = fmt("F error %.2g", worst_f) + fmt(", p error %.2g", worst_p) +
               fmt(", Tukey table error %.4f", worst_q);
  }
  return o;
}

harness::ExperimentConfig reference_config(const BanditInstance& inst, std::size_t trials) {
  harness::ExperimentConfig cfg;
  cfg.instance = inst;
  cfg.trials = trials;
  cfg.horizon = 300;
  cfg.master_seed = 1;
  cfg.robot.refit_period = 5;
  return cfg;
}

std::string means_text(const harness::ExperimentSummary& s) {
  std::string out;
  for (const auto& g : s.groups) {
    if (!out.empty()) out += ", ";
    out += g.name + fmt(" %.2f", g.mean);
  }
  return out;
}

std::size_t pos(const harness::ExperimentSummary& s, harness::Agent a) { return s.group_index(a); }

Outcome criterion_risky(const harness::ExperimentRun& run) {
  using harness::Agent;
  Outcome o;
  const auto& s = run.summary;
  const double ucb = s.group(Agent::kUcb).mean;
  const double rab = s.group(Agent::kRabUcb).mean;
  const double hrt = s.group(Agent::kHrTeam).mean;
  require(o, ucb > hrt && hrt > rab, "ordering UCB > HR Team > RAB UCB violated");
  require(o, s.anova && s.anova->p_value < 0.001, "ANOVA does not reject at 0.001");
  const auto& pair = s.tukey->pair(std::min(pos(s, Agent::kUcb), pos(s, Agent::kRabUcb)),
                                   std::max(pos(s, Agent::kUcb), pos(s, Agent::kRabUcb)));
  require(o, pair.reject, "Tukey does not reject UCB vs RAB UCB");
  o.detail = means_text(s) + fmt("; ANOVA F = %.2f", s.anova->f_statistic) +
             fmt(", p = %.3g", s.anova->p_value) + fmt("; Tukey UCB-RAB p = %.4f", pair.p_value) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion_safe(const harness::ExperimentRun& run) {
  using harness::Agent;
  Outcome o;
  const auto& s = run.summary;
  const double ucb = s.group(Agent::kUcb).mean;
  const double rab = s.group(Agent::kRabUcb).mean;
  require(o, rab >= ucb, "RAB UCB mean below UCB mean");
  const auto& pair = s.tukey->pair(std::min(pos(s, Agent::kUcb), pos(s, Agent::kHrTeam)),
                                   std::max(pos(s, Agent::kUcb), pos(s, Agent::kHrTeam)));
  require(o, !pair.reject, "Tukey rejects HR Team vs UCB");
  o.detail = means_text(s) + fmt("; Tukey UCB-HRT p = %.4f", pair.p_value) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion_debias(const BanditInstance& d1) {
  Outcome o;
  auto cfg = reference_config(d1, 100);
  cfg.agents = {harness::Agent::kHrTeam};
  const auto run = harness::run_experiment(cfg);
  const std::size_t after = cfg.robot.effective_warmup(d1.num_arms()) + 1;
  double robot = 0.0;
  double human = 0.0;
  for (const auto& trial : run.results) {
    robot += harness::choice_fraction(trial[0].transcript, d1.best_arm(), after, true);
    human += harness::choice_fraction(trial[0].transcript, d1.best_arm(), after, false);
  }
  robot /= static_cast<double>(run.results.size());
  human /= static_cast<double>(run.results.size());
  require(o, robot - human >= 0.05, "robot advantage below 0.05");
  o.detail = fmt("robot %.4f", robot) + fmt(", human %.4f", human) +
             fmt(", difference %.4f", robot - human) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion_determinism(const harness::ExperimentConfig& base,
                              const harness::ExperimentRun& first) {
  Outcome o;
  auto cfg = base;
  cfg.threads = base.threads == 1 ? 3 : 1;
  const auto second = harness::run_experiment(cfg);
  const bool transcripts = harness::transcripts_csv(first) == harness::transcripts_csv(second);
  const bool summary = harness::summary_csv(first.summary) == harness::summary_csv(second.summary);
  require(o, transcripts, "transcripts.csv differs");
  require(o, summary, "summary.csv differs");
  if (o.pass) {
    o.detail = "threads " + std::to_string(base.threads) + " vs " + std::to_string(cfg.threads) +
               ": transcripts.csv and summary.csv byte-identical";
  }
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = body();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %d %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", id, name, secs,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };

  const auto [d1, d2] = make_reference_instances();

  report(1, "CPT analytic suite", criterion_cpt);
  report(2, "optimizer suite", criterion_optimizer);
  report(3, "statistics oracle equivalence", criterion_stats);

  auto risky_cfg = reference_config(d1, 300);
  risky_cfg.threads = 1;
  harness::ExperimentRun risky;
  report(4, "bias reproduction, risky-better", [&] {
    risky = harness::run_experiment(risky_cfg);
    return criterion_risky(risky);
  });
  report(5, "safe-better pattern", [&] {
    return criterion_safe(harness::run_experiment(reference_config(d2, 300)));
  });
  report(6, "de-biasing property", [&] { return criterion_debias(d1); });
  report(7, "determinism", [&] { return criterion_determinism(risky_cfg, risky); });

  return failures;
}
