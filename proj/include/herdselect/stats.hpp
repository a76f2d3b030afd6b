#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace herdselect::stats {

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double regularized_gamma_q(double a, double x);

/// Upper tail P(X > x) of a chi-square variable with `df` degrees of freedom.
double chi_square_sf(double x, double df);

/// Two-sided standard normal tail P(|Z| > |z|).
double normal_two_sided_p(double z);

/// Scores table: one row per dataset, one column per algorithm.
struct RankMatrix {
  std::vector<std::vector<double>> scores;
  bool higher_is_better = true;
  std::vector<double> avg_ranks;
};

/// Ranks algorithms on each dataset (1 = best, ties share the mean of their
/// positions) and averages over datasets. Throws BadShape for fewer than two
/// algorithms, no datasets, ragged rows or NaN scores.
std::vector<double> average_ranks(const std::vector<std::vector<double>>& scores,
                                  bool higher_is_better);
RankMatrix rank_matrix(std::vector<std::vector<double>> scores, bool higher_is_better);

struct FriedmanResult {
  double chi_square = 0.0;
  double p_value = 1.0;
  std::size_t df = 0;
};

/// chi2_F = 12n / (k(k+1)) * sum R_j^2 - 3n(k+1), with k = avg_ranks.size().
/// Throws InconsistentRanks unless the ranks sum to k(k+1)/2.
FriedmanResult friedman_statistic(std::span<const double> avg_ranks, std::size_t n);

struct PairwiseComparison {
  std::size_t first = 0;
  std::size_t second = 0;
  double z = 0.0;
  double p_value = 1.0;
  bool rejected = false;  // p < alpha
};

/// z_ij = (R_i - R_j) / sqrt(k(k+1) / (6n)), two-sided normal p, for all i < j.
std::vector<PairwiseComparison> posthoc_z(std::span<const double> avg_ranks, std::size_t n,
                                          double alpha = 0.05);

/// Same statistic for (control, j) for every j != control, in column order.
std::vector<PairwiseComparison> posthoc_vs_control(std::span<const double> avg_ranks,
                                                   std::size_t n, std::size_t control,
                                                   double alpha = 0.05);

}  // namespace herdselect::stats
