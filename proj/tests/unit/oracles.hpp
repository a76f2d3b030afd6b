#pragma once

// Reference implementations written independently of the library, used as
// test oracles.

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <utility>
#include <vector>

namespace oracle {

inline double entropy(const std::vector<int>& x) {
  std::map<int, double> p;
  for (int v : x) p[v] += 1.0 / x.size();
  double h = 0.0;
  for (const auto& [v, pv] : p) h -= pv * std::log(pv);
  return h / std::log(2.0);
}

inline double mutual_information(const std::vector<int>& x, const std::vector<int>& y) {
  const double n = static_cast<double>(x.size());
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> px, py;
  for (std::size_t i = 0; i < x.size(); ++i) {
    joint[{x[i], y[i]}] += 1.0 / n;
    px[x[i]] += 1.0 / n;
    py[y[i]] += 1.0 / n;
  }
  double mi = 0.0;
  for (const auto& [ab, p] : joint) mi += p * std::log(p / (px[ab.first] * py[ab.second]));
  return std::max(0.0, mi / std::log(2.0));
}

// Greedy MRMR by re-scoring every candidate from scratch at each step.
inline std::vector<std::size_t> mrmr(const std::vector<std::vector<int>>& cols,
                                     const std::vector<int>& labels, std::size_t m,
                                     double tie = 1e-12) {
  std::vector<std::size_t> chosen;
  std::vector<bool> used(cols.size(), false);
  for (std::size_t step = 0; step < m; ++step) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t pick = cols.size();
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (used[j]) continue;
      double score = mutual_information(cols[j], labels);
      if (!chosen.empty()) {
        double red = 0.0;
        for (auto s : chosen) red += mutual_information(cols[j], cols[s]);
        score -= red / static_cast<double>(chosen.size());
      }
      if (score > best + tie) {
        best = score;
        pick = j;
      }
    }
    used[pick] = true;
    chosen.push_back(pick);
  }
  return chosen;
}

}  // namespace oracle
