#include "abandit/selftest.hpp"

#include <cmath>
#include <exception>
#include <functional>
#include <sstream>

#include "abandit/bandit.hpp"
#include "abandit/cpt.hpp"
#include "abandit/optim.hpp"
#include "abandit/policies.hpp"
#include "abandit/rng.hpp"
#include "abandit/stats.hpp"

namespace abandit {

namespace {

struct Failure {
  std::string what;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

void expect_near(double actual, double expected, double tol, const std::string& what) {
  if (!(std::abs(actual - expected) <= tol)) {
    std::ostringstream msg;
    msg.precision(10);
    msg << what << ": got " << actual << ", expected " << expected << " +/- " << tol;
    throw Failure{msg.str()};
  }
}

const cpt::CptParams kHuman{};  // alpha = beta = 0.5, lambda = 2, gamma = delta = 0.5

void check_value_function() {
  expect_near(cpt::value_transform(4.0, kHuman), 2.0, 1e-12, "v(4)");
  expect_near(cpt::value_transform(-4.0, kHuman), -4.0, 1e-12, "v(-4)");
  expect_near(cpt::value_inverse(2.0, kHuman), 4.0, 1e-12, "v^-1(2)");
  expect_near(cpt::value_inverse(-4.0, kHuman), -4.0, 1e-12, "v^-1(-4)");
  Xoshiro256 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double x = -100.0 + 200.0 * rng.uniform();
    const double back = cpt::value_inverse(cpt::value_transform(x, kHuman), kHuman);
    expect(std::abs(back - x) <= 1e-9 * std::max(1.0, std::abs(x)), "value round trip");
  }
}

void check_weighting() {
  expect_near(cpt::probability_weight(0.5, 0.5), 0.35355, 1e-5, "w(0.5)");
  expect_near(cpt::probability_weight(0.01, 0.5), 0.08340, 1e-5, "w(0.01)");
  Xoshiro256 rng(11);
  for (int i = 0; i < 1000; ++i) {
    double p = rng.uniform();
    double q = rng.uniform();
    if (p > q) std::swap(p, q);
    expect(cpt::probability_weight(p, 0.5) <= cpt::probability_weight(q, 0.5), "w monotone");
  }
}

void check_prospects() {
  const cpt::Prospect risky({{-1.0, 0.3}, {2.0, 0.7}});
  const auto pi = cpt::decision_weights(risky, kHuman);
  expect_near(pi[0], 0.28579, 1e-4, "pi(loss)");
  expect_near(pi[1], 0.43656, 1e-4, "pi(gain)");
  expect_near(cpt::cpt_value(risky, kHuman), 0.04578, 1e-3, "cpt value of risky arm");
  expect_near(cpt::cpt_value(cpt::Prospect::sure(0.5), kHuman), 0.70711, 1e-5, "cpt value of sure 0.5");
  const auto unbiased = cpt::CptParams::unbiased();
  expect_near(cpt::cpt_value(risky, unbiased), risky.expectation(), 1e-12, "unbiased CPT = mean");
}

void check_reference_instances() {
  const auto [d1, d2] = make_reference_instances();
  expect_near(d1.mean_reward(0), 0.5, 1e-12, "D1 safe mean");
  expect_near(d1.mean_reward(1), 1.1, 1e-12, "D1 risky mean");
  expect_near(d2.mean_reward(1), 0.35, 1e-12, "D2 risky mean");
  const auto a = sample_stream(d1, 50, 3);
  const auto b = sample_stream(d1, 50, 3);
  expect(a == b, "stream determinism");
  for (auto c : a.draws(0)) expect(c == 1, "degenerate arm draws");
}

void check_optimizer() {
  const optim::Objective quad = [](std::span<const double> x) {
    return (x[0] - 1.0) * (x[0] - 1.0) + (x[1] - 2.0) * (x[1] - 2.0);
  };
  const auto r = optim::powell_minimize(quad, {0.0, 0.0});
  expect_near(r.x_best[0], 1.0, 1e-6, "quadratic x");
  expect_near(r.x_best[1], 2.0, 1e-6, "quadratic y");
  for (std::size_t i = 1; i < r.accepted.size(); ++i) {
    expect(r.accepted[i] <= r.accepted[i - 1], "accepted values nonincreasing");
  }
  const optim::Objective vee = [](std::span<const double> x) { return std::abs(x[0] - 2.0); };
  const double origin[] = {0.0};
  const double dir[] = {1.0};
  expect_near(optim::line_minimize(vee, origin, dir, {}).step, 2.0, 1e-4, "line search on |x-2|");
}

void check_stats() {
  const double xs[] = {2, 4, 4, 4, 5, 5, 7, 9};
  const auto g = stats::summarize("x", xs);
  expect_near(g.mean, 5.0, 1e-12, "mean");
  expect_near(g.std, 2.13809, 1e-4, "sample std");
  const auto a = stats::one_way_anova({{1, 2, 3}, {4, 5, 6}});
  expect_near(a.f_statistic, 13.5, 1e-12, "F");
  expect_near(a.p_value, 0.021311641128756, 1e-6, "F p-value");
  const auto same = stats::one_way_anova({{1, 2, 3}, {1, 2, 3}});
  expect(same.f_statistic == 0.0 && same.p_value == 1.0, "identical groups");
}

void check_policies() {
  policies::ArmStatistic stat(2, {-1.0, 0.5, 2.0});
  expect(policies::ucb_choose(stat, 1) == 0, "forced exploration order");
  for (int i = 0; i < 4; ++i) stat.update(0, 1, 0.5);
  expect_near(*policies::ucb_index(stat, 0, 16), 1.67741, 1e-5, "UCB index");
  expect(!policies::ucb_index(stat, 1, 16).has_value(), "unpulled arm index");

  policies::InteractionHistory h(2, 3);
  h.append({1, 0, 0, 2});
  const auto p = policies::build_probability_statistics(h, 2, 1.0);
  expect_near(p[1](0, 2), 0.5, 1e-12, "Laplace smoothing");
  expect_near(p[0](1, 0), 1.0 / 3.0, 1e-12, "uniform prior");
}

}  // namespace

std::vector<SelfCheck> run_selftest() {
  const std::vector<std::pair<std::string, std::function<void()>>> checks{
      {"cpt value function", check_value_function},
      {"cpt probability weighting", check_weighting},
      {"cpt prospects", check_prospects},
      {"reference instances", check_reference_instances},
      {"powell minimizer", check_optimizer},
      {"statistics", check_stats},
      {"policies", check_policies},
  };
  std::vector<SelfCheck> out;
  for (const auto& [name, fn] : checks) {
    SelfCheck c{name, true, {}};
    try {
      fn();
    } catch (const Failure& f) {
      c.passed = false;
      c.detail = f.what;
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = e.what();
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace abandit
