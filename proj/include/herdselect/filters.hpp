#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "herdselect/dataset.hpp"

namespace herdselect {

/// Empirical Shannon entropy of a discrete column, in bits.
double entropy(std::span<const int> x);

/// Plug-in mutual information in bits between two discrete columns of equal
/// length: the sum over observed cells of P(a,b) log2(P(a,b) / (P(a) P(b))).
/// Throws LengthMismatch (also for empty input).
double mutual_information(std::span<const int> x, std::span<const int> y);

using Columns = std::span<const std::vector<int>>;

/// Mean MI(x_i, C) over the given columns. Throws EmptySet.
double relevance(Columns genes, std::span<const int> labels);

/// (1/|S|^2) * sum over ordered pairs, diagonal included, of MI(x_i, x_j).
/// Throws EmptySet.
double redundancy(Columns genes);

struct MrmrRanking {
  std::vector<std::size_t> order;
  /// Criterion value of each gene at the step it was picked; the first entry
  /// is its plain relevance.
  std::vector<double> scores;
};

/// Scores closer than this are treated as ties (lowest index wins).
inline constexpr double kMrmrTieTolerance = 1e-12;

/// Greedy max-relevance/min-redundancy ranking of the first m genes. Step 1
/// takes argmax MI(x_j, C); each later step takes the argmax over unselected
/// j of MI(x_j, C) - mean_{s in S} MI(x_j, x_s). Throws BadM unless
/// 1 <= m <= n_genes.
MrmrRanking mrmr_select(const DiscretizedDataset& d, std::span<const int> labels, std::size_t m);

}  // namespace herdselect
