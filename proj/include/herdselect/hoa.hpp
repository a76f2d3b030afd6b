#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "herdselect/matrix.hpp"
#include "herdselect/rng.hpp"

namespace herdselect::hoa {

enum class AgeClass : std::uint8_t { Alpha, Beta, Gamma, Delta };

const char* to_string(AgeClass age) noexcept;

/// Grazing, hierarchy, sociability, imitation, defense and roaming weights.
struct BehaviorCoefficients {
  double grazing = 1.5;
  double hierarchy = 0.9;
  double sociability = 0.2;
  double imitation = 0.3;
  double defense = 0.2;
  double roaming = 0.1;

  friend bool operator==(const BehaviorCoefficients&, const BehaviorCoefficients&) = default;
};

/// Per-iteration multiplicative decay of each coefficient.
struct ReductionFactors {
  double grazing = 0.9;
  double hierarchy = 0.9;
  double sociability = 0.9;
  double imitation = 0.9;
  double defense = 0.9;
  double roaming = 0.9;

  friend bool operator==(const ReductionFactors&, const ReductionFactors&) = default;
};

BehaviorCoefficients decay(const BehaviorCoefficients& c, const ReductionFactors& omega);

/// Herd dynamics shared by the continuous optimizer and the binary selector.
struct HerdParameters {
  BehaviorCoefficients initial;
  ReductionFactors omega;
  double u_check = 1.05;  // upper bound of the grazing space
  double l_check = 0.95;  // lower bound of the grazing space
  double p_frac = 0.1;    // share of best horses imitated
  double q_frac = 0.2;    // share of worst horses fled from

  void validate() const;
};

struct HoaConfig {
  std::size_t n_horses = 35;
  std::size_t max_iter = 500;
  std::size_t dim = 10;
  std::vector<double> lower;
  std::vector<double> upper;
  HerdParameters herd;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  /// Fills lower/upper with a uniform box if they are empty.
  static HoaConfig box(std::size_t dim, double lo, double hi);
  void validate() const;
};

struct AgeCounts {
  std::size_t alpha = 0, beta = 0, gamma = 0, delta = 0;
  friend bool operator==(const AgeCounts&, const AgeCounts&) = default;
};

/// floor(10%), floor(20%), floor(30%) of n, remainder to delta. If the alpha
/// share floors to zero one horse is moved from delta into alpha.
AgeCounts age_class_counts(std::size_t n);

/// rank[i] is horse i's position in the sorted herd (0 = best).
std::vector<AgeClass> assign_age_classes(std::span<const std::size_t> rank);

/// max(1, floor(frac * n)).
std::size_t group_size(double frac, std::size_t n);

// Behaviour terms. Each returns the contribution to a horse's velocity.

/// g (u + P l) X_prev, elementwise with one uniform draw of P per dimension.
std::vector<double> grazing_term(std::span<const double> x_prev, double g, double u_check,
                                 double l_check, std::span<const double> p);
std::vector<double> grazing_term(std::span<const double> x_prev, double g, double u_check,
                                 double l_check, Rng& rng);
/// h (X* - X_prev).
std::vector<double> hierarchy_term(std::span<const double> x_prev, std::span<const double> best,
                                   double h);
/// s (mean of herd - X_prev).
std::vector<double> sociability_term(std::span<const double> x_prev,
                                     std::span<const double> mean_position, double s);
/// i (mean of the pN best - X_prev).
std::vector<double> imitation_term(std::span<const double> x_prev,
                                   std::span<const double> best_group_mean, double i);
/// -d (mean of the qN worst - X_prev).
std::vector<double> defense_term(std::span<const double> x_prev,
                                 std::span<const double> worst_group_mean, double d);
/// r P X_prev, elementwise with one uniform draw of P per dimension.
std::vector<double> roaming_term(std::span<const double> x_prev, double r,
                                 std::span<const double> p);
std::vector<double> roaming_term(std::span<const double> x_prev, double r, Rng& rng);

/// Reference points recomputed from the sorted herd every iteration.
struct HerdGuides {
  std::vector<double> best_position;    // X*
  std::vector<double> mean_position;    // whole-herd mean
  std::vector<double> best_group_mean;  // mean of the pN best
  std::vector<double> worst_group_mean; // mean of the qN worst
};

/// `order` lists horses best-first.
HerdGuides compute_guides(const Matrix<double>& positions, std::span<const std::size_t> order,
                          std::span<const double> best_position, const HerdParameters& params);

/// Velocity of one horse by age:
///   alpha: G + D
///   beta:  G + H + S + D
///   gamma: G + H + S + I + D + R
///   delta: G + I + R
/// Random draws come from `rng` in the order G then R.
std::vector<double> horse_velocity(AgeClass age, std::span<const double> x_prev,
                                   const HerdGuides& guides, const BehaviorCoefficients& coeffs,
                                   const HerdParameters& params, Rng& rng);

/// Per-horse random stream for one iteration, independent of scheduling.
inline std::uint64_t horse_stream(std::uint64_t seed, std::size_t iteration, std::size_t horse) {
  return derive_seed(seed, {stream_label("horse"), iteration, horse});
}

/// Global Matrix of the herd plus the incumbent.
struct HerdState {
  Matrix<double> positions;
  Matrix<double> velocities;
  std::vector<double> costs;
  std::vector<AgeClass> age;
  BehaviorCoefficients coeffs;
  std::vector<double> best_position;
  double best_cost = 0.0;
};

/// Herd order by ascending cost; equal costs keep the lower index first.
std::vector<std::size_t> sort_by_cost(std::span<const double> costs);

/// Computes every horse's velocity for `iteration` (ages must be assigned).
/// Horses are processed concurrently when threads > 1; each uses
/// horse_stream(seed, iteration, horse), so the result is scheduling-free.
Matrix<double> velocity_update(const HerdState& state, const HerdGuides& guides,
                               const HerdParameters& params, std::uint64_t seed,
                               std::size_t iteration, std::size_t threads = 1);

using CostFunction = std::function<double(std::span<const double>)>;

struct HoaResult {
  std::vector<double> best_position;
  double best_cost = 0.0;
  /// trace[0] is the best initial cost, trace[t] the incumbent after iteration t.
  std::vector<double> trace;
};

/// Continuous horse herd optimization (minimization). Each iteration sorts
/// the herd, assigns age classes, decays the coefficients, moves every
/// horse by its velocity, clamps to the box and replaces the incumbent
/// only on strict improvement.
HoaResult optimize(const CostFunction& cost, const HoaConfig& config);

double sphere(std::span<const double> x);
double rastrigin(std::span<const double> x);

/// Writes "iteration,best_cost" rows.
void write_trace_csv(std::span<const double> trace, const std::filesystem::path& path);

}  // namespace herdselect::hoa
