#include "herdselect/filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "herdselect/error.hpp"

namespace herdselect {

namespace {

int level_count(std::span<const int> x) {
  int top = 0;
  for (int v : x) {
    require(v >= 0, ErrorKind::InvalidArgument, "discrete levels must be non-negative");
    top = std::max(top, v);
  }
  return top + 1;
}

}  // namespace

double entropy(std::span<const int> x) {
  require(!x.empty(), ErrorKind::LengthMismatch, "entropy of an empty column");
  std::vector<std::size_t> counts(static_cast<std::size_t>(level_count(x)), 0);
  for (int v : x) ++counts[v];
  const double n = static_cast<double>(x.size());
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double mutual_information(std::span<const int> x, std::span<const int> y) {
  require(x.size() == y.size() && !x.empty(), ErrorKind::LengthMismatch,
          "mutual information needs equal, non-empty columns (" + std::to_string(x.size()) +
              " vs " + std::to_string(y.size()) + ")");
  const auto nx = static_cast<std::size_t>(level_count(x));
  const auto ny = static_cast<std::size_t>(level_count(y));
  std::vector<std::size_t> joint(nx * ny, 0);
  std::vector<std::size_t> px(nx, 0);
  std::vector<std::size_t> py(ny, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++joint[static_cast<std::size_t>(x[i]) * ny + static_cast<std::size_t>(y[i])];
    ++px[x[i]];
    ++py[y[i]];
  }
  // With counts: P(a,b)/(P(a)P(b)) = n * c_ab / (c_a * c_b).
  const double n = static_cast<double>(x.size());
  double mi = 0.0;
  for (std::size_t a = 0; a < nx; ++a) {
    for (std::size_t b = 0; b < ny; ++b) {
      const std::size_t c = joint[a * ny + b];
      if (c == 0) continue;
      const double cab = static_cast<double>(c);
      mi += (cab / n) * std::log2(n * cab / (static_cast<double>(px[a]) * static_cast<double>(py[b])));
    }
  }
  // The estimate is non-negative; clear the rounding residue of independent joints.
  return mi < 0.0 ? 0.0 : mi;
}

double relevance(Columns genes, std::span<const int> labels) {
  require(!genes.empty(), ErrorKind::EmptySet, "relevance of an empty gene set");
  double total = 0.0;
  for (const auto& g : genes) total += mutual_information(g, labels);
  return total / static_cast<double>(genes.size());
}

double redundancy(Columns genes) {
  require(!genes.empty(), ErrorKind::EmptySet, "redundancy of an empty gene set");
  double total = 0.0;
  for (const auto& a : genes) {
    for (const auto& b : genes) total += mutual_information(a, b);
  }
  const double s = static_cast<double>(genes.size());
  return total / (s * s);
}

MrmrRanking mrmr_select(const DiscretizedDataset& d, std::span<const int> labels, std::size_t m) {
  const std::size_t n = d.n_genes();
  require(m >= 1 && m <= n, ErrorKind::BadM,
          "m=" + std::to_string(m) + " must lie in [1, " + std::to_string(n) + "]");
  require(labels.size() == d.n_samples(), ErrorKind::LengthMismatch, "label count mismatch");

  std::vector<double> rel(n);
  for (std::size_t j = 0; j < n; ++j) rel[j] = mutual_information(d.columns[j], labels);

  std::vector<double> redundancy_sum(n, 0.0);
  std::vector<char> taken(n, 0);
  MrmrRanking ranking;
  ranking.order.reserve(m);
  ranking.scores.reserve(m);

  for (std::size_t step = 0; step < m; ++step) {
    std::size_t best = n;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (taken[j]) continue;
      const double score =
          step == 0 ? rel[j] : rel[j] - redundancy_sum[j] / static_cast<double>(step);
      if (best == n || score > best_score + kMrmrTieTolerance) {
        best = j;
        best_score = score;
      }
    }
    taken[best] = 1;
    ranking.order.push_back(best);
    ranking.scores.push_back(best_score);
    if (step + 1 == m) break;
    for (std::size_t j = 0; j < n; ++j) {
      if (!taken[j]) redundancy_sum[j] += mutual_information(d.columns[j], d.columns[best]);
    }
  }
  return ranking;
}

}  // namespace herdselect
