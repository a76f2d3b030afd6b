#include "herdselect/hoa.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include "herdselect/csv.hpp"
#include "herdselect/error.hpp"
#include "herdselect/parallel.hpp"

namespace herdselect::hoa {

const char* to_string(AgeClass age) noexcept {
  switch (age) {
    case AgeClass::Alpha: return "alpha";
    case AgeClass::Beta: return "beta";
    case AgeClass::Gamma: return "gamma";
    case AgeClass::Delta: return "delta";
  }
  return "?";
}

BehaviorCoefficients decay(const BehaviorCoefficients& c, const ReductionFactors& omega) {
  return {c.grazing * omega.grazing,         c.hierarchy * omega.hierarchy,
          c.sociability * omega.sociability, c.imitation * omega.imitation,
          c.defense * omega.defense,         c.roaming * omega.roaming};
}

void HerdParameters::validate() const {
  const std::array coefficients{initial.grazing,   initial.hierarchy, initial.sociability,
                                initial.imitation, initial.defense,   initial.roaming};
  for (double c : coefficients) {
    require(c >= 0.0 && std::isfinite(c), ErrorKind::InvalidArgument,
            "behaviour coefficients must be finite and non-negative");
  }
  const std::array factors{omega.grazing,   omega.hierarchy, omega.sociability,
                           omega.imitation, omega.defense,   omega.roaming};
  for (double w : factors) {
    require(w > 0.0 && w <= 1.0, ErrorKind::InvalidArgument, "reduction factors must lie in (0, 1]");
  }
  require(p_frac > 0.0 && p_frac < 1.0, ErrorKind::InvalidArgument, "p_frac must lie in (0, 1)");
  require(q_frac > 0.0 && q_frac < 1.0, ErrorKind::InvalidArgument, "q_frac must lie in (0, 1)");
  require(std::isfinite(u_check) && std::isfinite(l_check), ErrorKind::InvalidArgument,
          "grazing bounds must be finite");
}

HoaConfig HoaConfig::box(std::size_t dim, double lo, double hi) {
  HoaConfig config;
  config.dim = dim;
  config.lower.assign(dim, lo);
  config.upper.assign(dim, hi);
  return config;
}

void HoaConfig::validate() const {
  require(n_horses >= 4, ErrorKind::InvalidArgument, "the herd needs at least 4 horses");
  require(dim >= 1, ErrorKind::InvalidArgument, "dimension must be positive");
  require(lower.size() == dim && upper.size() == dim, ErrorKind::LengthMismatch,
          "bounds must have one entry per dimension");
  for (std::size_t j = 0; j < dim; ++j) {
    require(lower[j] <= upper[j], ErrorKind::InvalidArgument, "lower bound exceeds upper bound");
  }
  herd.validate();
}

AgeCounts age_class_counts(std::size_t n) {
  AgeCounts counts;
  counts.alpha = n / 10;
  counts.beta = 2 * n / 10;
  counts.gamma = 3 * n / 10;
  counts.delta = n - counts.alpha - counts.beta - counts.gamma;
  if (counts.alpha == 0 && counts.delta > 0) {
    counts.alpha = 1;
    --counts.delta;
  }
  return counts;
}

std::vector<AgeClass> assign_age_classes(std::span<const std::size_t> rank) {
  const auto counts = age_class_counts(rank.size());
  std::vector<AgeClass> age(rank.size());
  for (std::size_t i = 0; i < rank.size(); ++i) {
    const std::size_t r = rank[i];
    if (r < counts.alpha) {
      age[i] = AgeClass::Alpha;
    } else if (r < counts.alpha + counts.beta) {
      age[i] = AgeClass::Beta;
    } else if (r < counts.alpha + counts.beta + counts.gamma) {
      age[i] = AgeClass::Gamma;
    } else {
      age[i] = AgeClass::Delta;
    }
  }
  return age;
}

std::size_t group_size(double frac, std::size_t n) {
  // The epsilon keeps products such as 0.1 * 30 from flooring one short.
  const auto size = static_cast<std::size_t>(std::floor(frac * static_cast<double>(n) + 1e-9));
  return std::clamp<std::size_t>(size, 1, std::max<std::size_t>(n, 1));
}

// ---------------------------------------------------------------------------
// Behaviour terms

std::vector<double> grazing_term(std::span<const double> x_prev, double g, double u_check,
                                 double l_check, std::span<const double> p) {
  std::vector<double> out(x_prev.size());
  for (std::size_t j = 0; j < x_prev.size(); ++j) out[j] = g * (u_check + p[j] * l_check) * x_prev[j];
  return out;
}

std::vector<double> grazing_term(std::span<const double> x_prev, double g, double u_check,
                                 double l_check, Rng& rng) {
  std::vector<double> p(x_prev.size());
  for (double& v : p) v = rng.uniform();
  return grazing_term(x_prev, g, u_check, l_check, p);
}

namespace {

std::vector<double> toward(std::span<const double> x_prev, std::span<const double> target,
                           double weight) {
  std::vector<double> out(x_prev.size());
  for (std::size_t j = 0; j < x_prev.size(); ++j) out[j] = weight * (target[j] - x_prev[j]);
  return out;
}

void accumulate(std::vector<double>& into, const std::vector<double>& term) {
  for (std::size_t j = 0; j < into.size(); ++j) into[j] += term[j];
}

}  // namespace

std::vector<double> hierarchy_term(std::span<const double> x_prev, std::span<const double> best,
                                   double h) {
  return toward(x_prev, best, h);
}

std::vector<double> sociability_term(std::span<const double> x_prev,
                                     std::span<const double> mean_position, double s) {
  return toward(x_prev, mean_position, s);
}

std::vector<double> imitation_term(std::span<const double> x_prev,
                                   std::span<const double> best_group_mean, double i) {
  return toward(x_prev, best_group_mean, i);
}

std::vector<double> defense_term(std::span<const double> x_prev,
                                 std::span<const double> worst_group_mean, double d) {
  return toward(x_prev, worst_group_mean, -d);
}

std::vector<double> roaming_term(std::span<const double> x_prev, double r,
                                 std::span<const double> p) {
  std::vector<double> out(x_prev.size());
  for (std::size_t j = 0; j < x_prev.size(); ++j) out[j] = r * p[j] * x_prev[j];
  return out;
}

std::vector<double> roaming_term(std::span<const double> x_prev, double r, Rng& rng) {
  std::vector<double> p(x_prev.size());
  for (double& v : p) v = rng.uniform();
  return roaming_term(x_prev, r, p);
}

// ---------------------------------------------------------------------------
// Herd-level updates

HerdGuides compute_guides(const Matrix<double>& positions, std::span<const std::size_t> order,
                          std::span<const double> best_position, const HerdParameters& params) {
  const std::size_t n = positions.rows();
  const std::size_t dim = positions.cols();
  HerdGuides guides;
  guides.best_position.assign(best_position.begin(), best_position.end());
  guides.mean_position.assign(dim, 0.0);
  guides.best_group_mean.assign(dim, 0.0);
  guides.worst_group_mean.assign(dim, 0.0);

  auto mean_of = [&](std::span<const std::size_t> horses, std::vector<double>& out) {
    for (std::size_t h : horses) {
      const auto row = positions.row(h);
      for (std::size_t j = 0; j < dim; ++j) out[j] += row[j];
    }
    for (double& v : out) v /= static_cast<double>(horses.size());
  };
  mean_of(order, guides.mean_position);
  const std::size_t p_n = group_size(params.p_frac, n);
  const std::size_t q_n = group_size(params.q_frac, n);
  mean_of(order.first(p_n), guides.best_group_mean);
  mean_of(order.last(q_n), guides.worst_group_mean);
  return guides;
}

std::vector<double> horse_velocity(AgeClass age, std::span<const double> x_prev,
                                   const HerdGuides& guides, const BehaviorCoefficients& coeffs,
                                   const HerdParameters& params, Rng& rng) {
  auto v = grazing_term(x_prev, coeffs.grazing, params.u_check, params.l_check, rng);
  const bool middle = age == AgeClass::Beta || age == AgeClass::Gamma;
  const bool imitation = age == AgeClass::Gamma || age == AgeClass::Delta;
  const bool defense = age != AgeClass::Delta;
  const bool roaming = age == AgeClass::Gamma || age == AgeClass::Delta;
  if (middle) accumulate(v, hierarchy_term(x_prev, guides.best_position, coeffs.hierarchy));
  if (middle) accumulate(v, sociability_term(x_prev, guides.mean_position, coeffs.sociability));
  if (imitation) accumulate(v, imitation_term(x_prev, guides.best_group_mean, coeffs.imitation));
  if (defense) accumulate(v, defense_term(x_prev, guides.worst_group_mean, coeffs.defense));
  if (roaming) accumulate(v, roaming_term(x_prev, coeffs.roaming, rng));
  return v;
}

std::vector<std::size_t> sort_by_cost(std::span<const double> costs) {
  std::vector<std::size_t> order(costs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
  return order;
}

Matrix<double> velocity_update(const HerdState& state, const HerdGuides& guides,
                               const HerdParameters& params, std::uint64_t seed,
                               std::size_t iteration, std::size_t threads) {
  const std::size_t n = state.positions.rows();
  Matrix<double> velocities(n, state.positions.cols());
  parallel_for(n, threads, [&](std::size_t h) {
    Rng rng(horse_stream(seed, iteration, h));
    const auto v = horse_velocity(state.age[h], state.positions.row(h), guides, state.coeffs,
                                  params, rng);
    std::copy(v.begin(), v.end(), velocities.row(h).begin());
  });
  return velocities;
}

HoaResult optimize(const CostFunction& cost, const HoaConfig& config) {
  config.validate();
  const std::size_t n = config.n_horses;
  const std::size_t dim = config.dim;

  HerdState state;
  state.positions = Matrix<double>(n, dim);
  state.costs.resize(n);
  state.coeffs = config.herd.initial;
  for (std::size_t h = 0; h < n; ++h) {
    Rng rng(derive_seed(config.seed, {stream_label("init"), h}));
    auto row = state.positions.row(h);
    for (std::size_t j = 0; j < dim; ++j) {
      row[j] = config.lower[j] + rng.uniform() * (config.upper[j] - config.lower[j]);
    }
  }
  auto evaluate_all = [&] {
    parallel_for(n, config.threads, [&](std::size_t h) { state.costs[h] = cost(state.positions.row(h)); });
  };
  evaluate_all();

  auto improve_incumbent = [&] {
    for (std::size_t h = 0; h < n; ++h) {
      if (state.best_position.empty() || state.costs[h] < state.best_cost) {
        state.best_cost = state.costs[h];
        const auto row = state.positions.row(h);
        state.best_position.assign(row.begin(), row.end());
      }
    }
  };
  improve_incumbent();

  HoaResult result;
  result.trace.reserve(config.max_iter + 1);
  result.trace.push_back(state.best_cost);

  std::vector<std::size_t> rank(n);
  for (std::size_t iter = 1; iter <= config.max_iter; ++iter) {
    const auto order = sort_by_cost(state.costs);
    for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;
    state.age = assign_age_classes(rank);
    state.coeffs = decay(state.coeffs, config.herd.omega);
    const auto guides = compute_guides(state.positions, order, state.best_position, config.herd);
    state.velocities = velocity_update(state, guides, config.herd, config.seed, iter, config.threads);
    for (std::size_t h = 0; h < n; ++h) {
      auto x = state.positions.row(h);
      const auto v = state.velocities.row(h);
      for (std::size_t j = 0; j < dim; ++j) {
        x[j] = std::clamp(x[j] + v[j], config.lower[j], config.upper[j]);
      }
    }
    evaluate_all();
    improve_incumbent();
    result.trace.push_back(state.best_cost);
  }
  result.best_position = state.best_position;
  result.best_cost = state.best_cost;
  return result;
}

double sphere(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double rastrigin(std::span<const double> x) {
  double s = 10.0 * static_cast<double>(x.size());
  for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
  return s;
}

void write_trace_csv(std::span<const double> trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::IoError, "cannot write " + path.string());
  out << "iteration,best_cost\n";
  for (std::size_t t = 0; t < trace.size(); ++t) out << t << ',' << csv::format_double(trace[t]) << '\n';
}

}  // namespace herdselect::hoa
