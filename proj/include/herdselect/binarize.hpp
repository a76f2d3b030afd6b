#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "herdselect/dataset.hpp"
#include "herdselect/rng.hpp"

namespace herdselect {

enum class TransferFunction { S1, S2, S3, S4, V1, V2, V3, V4, X };

inline constexpr std::array kAllTransferFunctions{
    TransferFunction::S1, TransferFunction::S2, TransferFunction::S3,
    TransferFunction::S4, TransferFunction::V1, TransferFunction::V2,
    TransferFunction::V3, TransferFunction::V4, TransferFunction::X};

/// Lower-case tag ("s1" ... "v4", "x").
std::string to_string(TransferFunction tf);
/// Case-insensitive; throws InvalidArgument listing the valid tags.
TransferFunction parse_transfer_function(std::string_view tag);

bool is_s_shaped(TransferFunction tf) noexcept;
bool is_v_shaped(TransferFunction tf) noexcept;

/// S1..S4: 1/(1+exp(-a v)) with a = 2, 1, 1/2, 1/3.
/// V1: |erf(sqrt(pi)/2 v)|, V2: |tanh v|, V3: |v/sqrt(1+v^2)|,
/// V4: |(2/pi) atan((pi/2) v)|.
/// Throws NonFiniteVelocity for non-finite v and InvalidArgument for X,
/// which has its own pair below.
double tf_value(TransferFunction tf, double v);

/// The X-shaped pair: W1 = 1/(1+exp(-v)), W2 = 1/(1+exp(v)); W1 + W2 = 1.
struct XPair {
  double w1 = 0.0;
  double w2 = 0.0;
};
XPair x_shaped_pair(double v);

/// Set rule: bit j = 1 iff u < T(v_j). Used for the S family.
GeneMask binarize_s(const GeneMask& bits_prev, std::span<const double> velocities,
                    TransferFunction tf, Rng& rng);

/// Flip rule: bit j flips iff u < T(v_j). Used for the V family.
GeneMask binarize_v(const GeneMask& bits_prev, std::span<const double> velocities,
                    TransferFunction tf, Rng& rng);

/// Cut uniform in [1, len-1]; child1 = a[:cut] + b[cut:], child2 = b[:cut] + a[cut:].
/// Throws TooShort for masks shorter than 2 and LengthMismatch.
std::pair<GeneMask, GeneMask> single_point_crossover(const GeneMask& a, const GeneMask& b,
                                                     std::size_t cut);
std::pair<GeneMask, GeneMask> single_point_crossover(const GeneMask& a, const GeneMask& b,
                                                     Rng& rng);

/// Fitness to maximize.
using MaskFitness = std::function<double(const GeneMask&)>;

struct BitUpdateOutcome {
  enum class Path { DirectAccept, CrossoverRepair };

  GeneMask new_bits;
  double fitness = 0.0;
  std::size_t evaluations_used = 0;
  Path path = Path::DirectAccept;
};

/// Decision step of the X-shaped update given the two candidates:
/// Z = D if f(D) > f(G) else G; accept Z if f(Z) > f(prev); otherwise cross
/// Z with prev and keep the fitter child (child1 on ties).
BitUpdateOutcome resolve_candidates(const GeneMask& bits_prev, const GeneMask& d,
                                    const GeneMask& g, const MaskFitness& fitness, Rng& rng);

/// Full X-shaped update: D_j = 1 iff u1 < W1(v_j), G_j = 1 iff u2 > W2(v_j)
/// with independent per-bit draws (u1 then u2 for each j), followed by
/// resolve_candidates(). At most five fitness calls.
BitUpdateOutcome x_shaped_update(const GeneMask& bits_prev, std::span<const double> velocities,
                                 const MaskFitness& fitness, Rng& rng);

}  // namespace herdselect
