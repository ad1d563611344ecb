#include "abandit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "abandit/rng.hpp"

namespace abandit::stats {

namespace {

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

void check_groups(const Groups& groups) {
  if (groups.size() < 2) throw std::invalid_argument("need at least two groups");
  for (const auto& g : groups) {
    if (g.size() < 2) throw std::invalid_argument("every group needs at least two samples");
  }
}

// Lentz's continued fraction for I_x(a, b); valid for x < (a+1)/(a+b+2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-15;
  constexpr int kMaxTerms = 10000;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxTerms; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

const TukeyPair& TukeyResult::pair(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  for (const auto& p : pairs) {
    if (p.group_i == i && p.group_j == j) return p;
  }
  throw std::out_of_range("no such Tukey pair");
}

GroupSummary summarize(std::string name, std::span<const double> samples) {
  if (samples.size() < 2) throw std::invalid_argument("summarize: need at least two samples");
  const double m = mean_of(samples);
  double ss = 0.0;
  for (double x : samples) ss += (x - m) * (x - m);
  return {std::move(name), samples.size(), m,
          std::sqrt(ss / static_cast<double>(samples.size() - 1))};
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_survival(double f, double d1, double d2) {
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  // P[F > f] = I_{d2 / (d2 + d1 f)}(d2/2, d1/2)
  return incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

AnovaResult one_way_anova(const Groups& groups) {
  check_groups(groups);
  std::size_t total_n = 0;
  double grand_sum = 0.0;
  for (const auto& g : groups) {
    total_n += g.size();
    grand_sum += std::accumulate(g.begin(), g.end(), 0.0);
  }
  const double grand_mean = grand_sum / static_cast<double>(total_n);

  double ss_between = 0.0;
  double ss_within = 0.0;
  for (const auto& g : groups) {
    const double m = mean_of(g);
    ss_between += static_cast<double>(g.size()) * (m - grand_mean) * (m - grand_mean);
    for (double x : g) ss_within += (x - m) * (x - m);
  }

  AnovaResult r;
  r.df_between = groups.size() - 1;
  r.df_within = total_n - groups.size();
  r.ms_between = ss_between / static_cast<double>(r.df_between);
  r.ms_within = ss_within / static_cast<double>(r.df_within);

  // Relative guard: sums of squares of equal data are zero only up to rounding.
  const double scale = std::max(1.0, grand_mean * grand_mean);
  const bool between_zero = r.ms_between <= 1e-24 * scale;
  const bool within_zero = r.ms_within <= 1e-24 * scale;
  if (between_zero) {
    r.f_statistic = 0.0;
    r.p_value = 1.0;
  } else if (within_zero) {
    r.f_statistic = std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
    r.degenerate = true;
  } else {
    r.f_statistic = r.ms_between / r.ms_within;
    r.p_value = std::clamp(f_survival(r.f_statistic, static_cast<double>(r.df_between),
                                      static_cast<double>(r.df_within)),
                           0.0, 1.0);
  }
  return r;
}

std::vector<double> studentized_range_null(std::size_t k, double df, std::size_t draws,
                                           std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("studentized range needs k >= 2");
  Xoshiro256 rng(seed);
  std::vector<double> q(draws);
  for (auto& value : q) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < k; ++i) {
      const double z = rng.normal();
      lo = std::min(lo, z);
      hi = std::max(hi, z);
    }
    const double s = std::sqrt(rng.chi_square(df) / df);
    value = (hi - lo) / s;
  }
  std::sort(q.begin(), q.end());
  return q;
}

double studentized_range_survival(std::span<const double> sorted_null, double q) {
  if (sorted_null.empty()) throw std::invalid_argument("empty null sample");
  const auto it = std::lower_bound(sorted_null.begin(), sorted_null.end(), q);
  return static_cast<double>(sorted_null.end() - it) / static_cast<double>(sorted_null.size());
}

TukeyResult tukey_hsd(const Groups& groups, double alpha, std::size_t mc_draws,
                      std::uint64_t seed) {
  check_groups(groups);
  if (mc_draws == 0) throw std::invalid_argument("tukey_hsd: mc_draws must be positive");
  const AnovaResult anova = one_way_anova(groups);
  const std::size_t k = groups.size();

  std::vector<double> means;
  for (const auto& g : groups) means.push_back(mean_of(g));

  TukeyResult result;
  result.alpha = alpha;
  result.mc_draws = mc_draws;

  const double scale = std::max(1.0, std::abs(means.front()));
  const bool degenerate = anova.ms_within <= 1e-24 * scale * scale;
  std::vector<double> null;
  if (!degenerate) {
    null = studentized_range_null(k, static_cast<double>(anova.df_within), mc_draws, seed);
  }

  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      TukeyPair p;
      p.group_i = i;
      p.group_j = j;
      p.mean_diff = means[j] - means[i];
      const double diff = std::abs(p.mean_diff);
      if (degenerate) {
        const bool equal = diff <= 1e-12 * scale;
        p.q_statistic = equal ? 0.0 : std::numeric_limits<double>::infinity();
        p.p_value = equal ? 1.0 : 0.0;
      } else {
        const double ni = static_cast<double>(groups[i].size());
        const double nj = static_cast<double>(groups[j].size());
        p.q_statistic = diff / std::sqrt(0.5 * anova.ms_within * (1.0 / ni + 1.0 / nj));
        p.p_value = studentized_range_survival(null, p.q_statistic);
      }
      p.reject = p.p_value < alpha;
      result.pairs.push_back(p);
    }
  }
  return result;
}

}  // namespace abandit::stats
