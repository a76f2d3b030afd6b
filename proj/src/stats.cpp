#include "herdselect/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "herdselect/error.hpp"

namespace herdselect::stats {

namespace {

// Series expansion of P(a, x); converges quickly for x < a + 1.
double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) (modified Lentz); used for x >= a + 1.
double upper_fraction(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  require(a > 0.0 && x >= 0.0, ErrorKind::InvalidArgument, "gamma Q needs a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - lower_series(a, x);
  return upper_fraction(a, x);
}

double chi_square_sf(double x, double df) {
  require(df > 0.0, ErrorKind::InvalidArgument, "chi-square needs df > 0");
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(df / 2.0, x / 2.0);
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

std::vector<double> average_ranks(const std::vector<std::vector<double>>& scores,
                                  bool higher_is_better) {
  require(!scores.empty(), ErrorKind::BadShape, "need at least one dataset");
  const std::size_t k = scores.front().size();
  require(k >= 2, ErrorKind::BadShape, "need at least two algorithms");
  std::vector<double> totals(k, 0.0);
  std::vector<std::size_t> order(k);
  for (const auto& row : scores) {
    require(row.size() == k, ErrorKind::BadShape, "every dataset needs one score per algorithm");
    for (double v : row) require(!std::isnan(v), ErrorKind::BadShape, "NaN score");
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return higher_is_better ? row[a] > row[b] : row[a] < row[b];
    });
    for (std::size_t i = 0; i < k;) {
      std::size_t j = i;
      while (j < k && row[order[j]] == row[order[i]]) ++j;
      const double shared = 0.5 * static_cast<double>(i + 1 + j);
      for (std::size_t t = i; t < j; ++t) totals[order[t]] += shared;
      i = j;
    }
  }
  for (double& t : totals) t /= static_cast<double>(scores.size());
  return totals;
}

RankMatrix rank_matrix(std::vector<std::vector<double>> scores, bool higher_is_better) {
  RankMatrix m;
  m.avg_ranks = average_ranks(scores, higher_is_better);
  m.scores = std::move(scores);
  m.higher_is_better = higher_is_better;
  return m;
}

namespace {

void check_ranks(std::span<const double> avg_ranks, std::size_t n) {
  const std::size_t k = avg_ranks.size();
  require(k >= 2, ErrorKind::BadShape, "need at least two algorithms");
  require(n >= 1, ErrorKind::BadShape, "need at least one dataset");
  const double expected = static_cast<double>(k * (k + 1)) / 2.0;
  const double sum = std::accumulate(avg_ranks.begin(), avg_ranks.end(), 0.0);
  require(std::abs(sum - expected) <= 1e-9 * expected, ErrorKind::InconsistentRanks,
          "average ranks sum to " + std::to_string(sum) + ", expected k(k+1)/2 = " +
              std::to_string(expected));
}

}  // namespace

FriedmanResult friedman_statistic(std::span<const double> avg_ranks, std::size_t n) {
  check_ranks(avg_ranks, n);
  const double k = static_cast<double>(avg_ranks.size());
  const double nn = static_cast<double>(n);
  double squares = 0.0;
  for (double r : avg_ranks) squares += r * r;
  FriedmanResult out;
  out.chi_square = 12.0 * nn / (k * (k + 1.0)) * squares - 3.0 * nn * (k + 1.0);
  // Cancellation can leave a tiny negative residue for all-equal ranks.
  out.chi_square = std::max(out.chi_square, 0.0);
  out.df = avg_ranks.size() - 1;
  out.p_value = chi_square_sf(out.chi_square, static_cast<double>(out.df));
  return out;
}

namespace {

PairwiseComparison compare(std::span<const double> avg_ranks, std::size_t n, std::size_t i,
                           std::size_t j, double alpha) {
  const double k = static_cast<double>(avg_ranks.size());
  const double se = std::sqrt(k * (k + 1.0) / (6.0 * static_cast<double>(n)));
  PairwiseComparison c;
  c.first = i;
  c.second = j;
  c.z = (avg_ranks[i] - avg_ranks[j]) / se;
  c.p_value = normal_two_sided_p(c.z);
  c.rejected = c.p_value < alpha;
  return c;
}

}  // namespace

std::vector<PairwiseComparison> posthoc_z(std::span<const double> avg_ranks, std::size_t n,
                                          double alpha) {
  check_ranks(avg_ranks, n);
  std::vector<PairwiseComparison> out;
  for (std::size_t i = 0; i < avg_ranks.size(); ++i) {
    for (std::size_t j = i + 1; j < avg_ranks.size(); ++j) out.push_back(compare(avg_ranks, n, i, j, alpha));
  }
  return out;
}

std::vector<PairwiseComparison> posthoc_vs_control(std::span<const double> avg_ranks,
                                                   std::size_t n, std::size_t control,
                                                   double alpha) {
  check_ranks(avg_ranks, n);
  require(control < avg_ranks.size(), ErrorKind::InvalidArgument, "control index out of range");
  std::vector<PairwiseComparison> out;
  for (std::size_t j = 0; j < avg_ranks.size(); ++j) {
    if (j != control) out.push_back(compare(avg_ranks, n, control, j, alpha));
  }
  return out;
}

}  // namespace herdselect::stats
