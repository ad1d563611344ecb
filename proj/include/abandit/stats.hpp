#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace abandit::stats {

struct GroupSummary {
  std::string name;
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;  // n - 1 denominator
};

struct AnovaResult {
  double f_statistic = 0.0;
  std::size_t df_between = 0;
  std::size_t df_within = 0;
  double p_value = 1.0;
  double ms_between = 0.0;
  double ms_within = 0.0;
  // Zero within-group variance with distinct means: F is +inf, p is 0.
  bool degenerate = false;
};

struct TukeyPair {
  std::size_t group_i = 0;
  std::size_t group_j = 0;
  double mean_diff = 0.0;  // mean_j - mean_i
  double q_statistic = 0.0;
  double p_value = 1.0;
  bool reject = false;
};

struct TukeyResult {
  std::vector<TukeyPair> pairs;  // (0,1), (0,2), ..., (k-2,k-1)
  double alpha = 0.05;
  std::size_t mc_draws = 0;

  const TukeyPair& pair(std::size_t i, std::size_t j) const;
};

using Groups = std::vector<std::vector<double>>;

// Throws std::invalid_argument when fewer than two samples are given.
GroupSummary summarize(std::string name, std::span<const double> samples);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);
// Upper tail P[F > f] of the F(d1, d2) distribution.
double f_survival(double f, double d1, double d2);

// Needs at least two groups of at least two samples each.
AnovaResult one_way_anova(const Groups& groups);

constexpr std::size_t kDefaultMcDraws = 200000;

// Sorted Monte Carlo sample of the studentized range statistic for k
// means and `df` error degrees of freedom.
std::vector<double> studentized_range_null(std::size_t k, double df, std::size_t draws,
                                           std::uint64_t seed);
// P[Q >= q] estimated from a sorted null sample.
double studentized_range_survival(std::span<const double> sorted_null, double q);

TukeyResult tukey_hsd(const Groups& groups, double alpha = 0.05,
                      std::size_t mc_draws = kDefaultMcDraws, std::uint64_t seed = 0);

}  // namespace abandit::stats
