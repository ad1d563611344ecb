#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "abandit/cpt.hpp"
#include "abandit/error.hpp"
#include "abandit/rng.hpp"

using namespace abandit;
using namespace abandit::cpt;

TEST_CASE("value function") {
  const CptParams p;
  CHECK(value_transform(4.0, p) == doctest::Approx(2.0));
  CHECK(value_transform(-4.0, p) == doctest::Approx(-4.0));
  CHECK(value_transform(0.0, p) == 0.0);
  CHECK(value_transform(0.5, p) == doctest::Approx(0.70710678));
  CHECK(value_transform(-1.0, p) == doctest::Approx(-2.0));

  const CptParams id = CptParams::unbiased();
  for (double x : {-3.5, -0.2, 0.0, 0.7, 12.0}) CHECK(value_transform(x, id) == x);
}

TEST_CASE("value inverse round trip") {
  Xoshiro256 rng(11);
  for (int i = 0; i < 500; ++i) {
    CptParams p;
    p.alpha = 0.1 + 0.9 * rng.uniform();
    p.beta = 0.1 + 0.9 * rng.uniform();
    p.lambda = 1.0 + 3.0 * rng.uniform();
    const double x = 20.0 * rng.uniform() - 10.0;
    CHECK(value_inverse(value_transform(x, p), p) == doctest::Approx(x).epsilon(1e-9));
  }
}

TEST_CASE("probability weighting") {
  CHECK(probability_weight(0.0, 0.5) == 0.0);
  CHECK(probability_weight(1.0, 0.5) == 1.0);
  CHECK(probability_weight(0.5, 0.5) == doctest::Approx(0.35355339).epsilon(1e-8));
  CHECK(probability_weight(0.01, 0.5) == doctest::Approx(0.08340301).epsilon(1e-7));
  CHECK(probability_weight(0.3, 1.0) == doctest::Approx(0.3));
  CHECK_THROWS_AS(probability_weight(-0.01, 0.5), std::domain_error);
  CHECK_THROWS_AS(probability_weight(1.01, 0.5), std::domain_error);

  SUBCASE("overweights small and underweights large probabilities") {
    for (double c : {0.3, 0.5, 0.7}) {
      CHECK(probability_weight(0.01, c) > 0.01);
      CHECK(probability_weight(0.9, c) < 0.9);
    }
  }

  SUBCASE("monotone on a grid") {
    for (double c : {0.3, 0.5, 0.61, 0.69, 0.9}) {
      double prev = 0.0;
      for (int i = 1; i <= 1000; ++i) {
        const double w = probability_weight(i / 1000.0, c);
        CHECK(w >= prev);
        CHECK(w <= 1.0);
        prev = w;
      }
    }
  }
}

TEST_CASE("prospect canonicalization") {
  const Prospect pr({{2.0, 0.25}, {-1.0, 0.5}, {2.0, 0.25}});
  REQUIRE(pr.size() == 2);
  CHECK(pr.outcomes()[0].value == -1.0);
  CHECK(pr.outcomes()[1].value == 2.0);
  CHECK(pr.outcomes()[1].probability == doctest::Approx(0.5));
  CHECK(pr.expectation() == doctest::Approx(0.5));
  CHECK_THROWS_AS(Prospect({{1.0, 0.5}}), ValidationError);
  CHECK_THROWS_AS(Prospect({{1.0, 1.2}, {2.0, -0.2}}), ValidationError);
  CHECK_THROWS_AS(Prospect({}), ValidationError);
}

TEST_CASE("decision weights, worked example") {
  const CptParams p;
  const Prospect pr({{-1.0, 0.5}, {1.0, 0.5}});
  const auto pi = decision_weights(pr, p);
  REQUIRE(pi.size() == 2);
  CHECK(pi[0] == doctest::Approx(0.35355339).epsilon(1e-8));
  CHECK(pi[1] == doctest::Approx(0.35355339).epsilon(1e-8));
  CHECK(cpt_value(pr, p) == doctest::Approx(-0.35355339).epsilon(1e-8));

  const Prospect three({{-1.0, 0.3}, {0.5, 0.2}, {2.0, 0.5}});
  const auto w3 = decision_weights(three, p);
  // Loss: w-(0.3). Top gain: w+(0.5). Middle gain: w+(0.7) - w+(0.5).
  CHECK(w3[0] == doctest::Approx(probability_weight(0.3, 0.5)));
  CHECK(w3[2] == doctest::Approx(probability_weight(0.5, 0.5)));
  CHECK(w3[1] == doctest::Approx(probability_weight(0.7, 0.5) - probability_weight(0.5, 0.5)));
}

TEST_CASE("decision weights, mixed prospect against a fixed oracle") {
  const CptParams p;
  const Prospect pr({{-1.0, 0.3}, {2.0, 0.7}});
  const auto pi = decision_weights(pr, p);
  CHECK(pi[0] == doctest::Approx(0.28579088).epsilon(1e-7));
  CHECK(pi[1] == doctest::Approx(0.43655279).epsilon(1e-7));
  CHECK(cpt_value(pr, p) == doctest::Approx(0.04579710).epsilon(1e-7));
}

TEST_CASE("zero counts as a gain") {
  CptParams p;
  const Prospect pr({{0.0, 0.4}, {3.0, 0.6}});
  const auto pi = decision_weights(pr, p);
  CHECK(pi[0] == doctest::Approx(1.0 - probability_weight(0.6, 0.5)));
  CHECK(pi[1] == doctest::Approx(probability_weight(0.6, 0.5)));
}

TEST_CASE("properties") {
  Xoshiro256 rng(2024);

  SUBCASE("unbiased parameters recover the expectation") {
    const CptParams id = CptParams::unbiased();
    for (int rep = 0; rep < 300; ++rep) {
      const std::size_t m = 1 + rng() % 5;
      std::vector<Outcome> outs;
      double total = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        outs.push_back({10.0 * rng.uniform() - 5.0, rng.uniform() + 0.01});
        total += outs.back().probability;
      }
      for (auto& o : outs) o.probability /= total;
      const Prospect pr(outs);
      CHECK(cpt_value(pr, id) == doctest::Approx(pr.expectation()).epsilon(1e-12));
    }
  }

  SUBCASE("sure things are valued by v alone") {
    const CptParams p;
    for (int rep = 0; rep < 100; ++rep) {
      const double x = 10.0 * rng.uniform() - 5.0;
      CHECK(cpt_value(Prospect::sure(x), p) == doctest::Approx(value_transform(x, p)));
    }
  }

  SUBCASE("first-order stochastic dominance is respected") {
    const CptParams p;
    for (int rep = 0; rep < 300; ++rep) {
      const double lo = -3.0 * rng.uniform();
      const double hi = 3.0 * rng.uniform() + 0.01;
      const double q = rng.uniform();
      const double shift = rng.uniform() * (1.0 - q);
      const Prospect a({{lo, 1.0 - q}, {hi, q}});
      const Prospect b({{lo, 1.0 - q - shift}, {hi, q + shift}});
      CHECK(cpt_value(b, p) >= cpt_value(a, p) - 1e-12);
    }
  }

  SUBCASE("all-gain decision weights sum to one") {
    const CptParams p;
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<Outcome> outs;
      double total = 0.0;
      for (int k = 0; k < 4; ++k) {
        outs.push_back({rng.uniform() * 5.0, rng.uniform() + 0.01});
        total += outs.back().probability;
      }
      for (auto& o : outs) o.probability /= total;
      double sum = 0.0;
      for (double w : decision_weights(Prospect(outs), p)) {
        CHECK(w >= 0.0);
        sum += w;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("bias_probability_row") {
  const std::vector<double> classes{-1.0, 0.5, 2.0};
  const CptParams p;

  SUBCASE("matches decision weights of the matching prospect") {
    const std::vector<double> probs{0.3, 0.2, 0.5};
    const auto row = bias_probability_row(probs, classes, p);
    const auto pi = decision_weights(Prospect({{-1.0, 0.3}, {0.5, 0.2}, {2.0, 0.5}}), p);
    for (std::size_t k = 0; k < 3; ++k) CHECK(row[k] == doctest::Approx(pi[k]));
  }

  SUBCASE("zero-probability classes get zero weight") {
    const std::vector<double> probs{0.0, 1.0, 0.0};
    const auto row = bias_probability_row(probs, classes, p);
    CHECK(row[0] == 0.0);
    CHECK(row[1] == doctest::Approx(1.0));
    CHECK(row[2] == 0.0);
  }

  SUBCASE("per-entry weighting") {
    const std::vector<double> probs{0.3, 0.2, 0.5};
    const auto row = bias_probability_row(probs, classes, p, Weighting::kPerEntry);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(row[k] == doctest::Approx(probability_weight(probs[k], 0.5)));
    }
  }

  SUBCASE("unbiased parameters leave the row unchanged") {
    const std::vector<double> probs{0.25, 0.25, 0.5};
    const auto row = bias_probability_row(probs, classes, CptParams::unbiased());
    for (std::size_t k = 0; k < 3; ++k) CHECK(row[k] == doctest::Approx(probs[k]));
  }
}

TEST_CASE("parameter validation") {
  CptParams p;
  CHECK_NOTHROW(p.validate());
  p.alpha = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.lambda = -1.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.theta = -0.5;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}
