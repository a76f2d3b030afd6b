#include "herdselect/binarize.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "herdselect/error.hpp"

namespace herdselect {

std::string to_string(TransferFunction tf) {
  static constexpr std::array<const char*, 9> kTags{"s1", "s2", "s3", "s4", "v1",
                                                    "v2", "v3", "v4", "x"};
  return kTags[static_cast<std::size_t>(tf)];
}

TransferFunction parse_transfer_function(std::string_view tag) {
  std::string lowered(tag);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto tf : kAllTransferFunctions) {
    if (to_string(tf) == lowered) return tf;
  }
  throw Error(ErrorKind::InvalidArgument,
              "unknown transfer function '" + std::string(tag) + "' (valid: s1|s2|s3|s4|v1|v2|v3|v4|x)");
}

bool is_s_shaped(TransferFunction tf) noexcept {
  return tf == TransferFunction::S1 || tf == TransferFunction::S2 || tf == TransferFunction::S3 ||
         tf == TransferFunction::S4;
}

bool is_v_shaped(TransferFunction tf) noexcept {
  return tf == TransferFunction::V1 || tf == TransferFunction::V2 || tf == TransferFunction::V3 ||
         tf == TransferFunction::V4;
}

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

double tf_value(TransferFunction tf, double v) {
  require(std::isfinite(v), ErrorKind::NonFiniteVelocity, "velocity is not finite");
  using std::numbers::pi;
  switch (tf) {
    case TransferFunction::S1: return logistic(2.0 * v);
    case TransferFunction::S2: return logistic(v);
    case TransferFunction::S3: return logistic(v / 2.0);
    case TransferFunction::S4: return logistic(v / 3.0);
    case TransferFunction::V1: return std::abs(std::erf(std::sqrt(pi) / 2.0 * v));
    case TransferFunction::V2: return std::abs(std::tanh(v));
    case TransferFunction::V3: return std::abs(v / std::sqrt(1.0 + v * v));
    case TransferFunction::V4: return std::abs(2.0 / pi * std::atan(pi / 2.0 * v));
    case TransferFunction::X: break;
  }
  throw Error(ErrorKind::InvalidArgument, "the X-shaped transfer function yields a pair; use x_shaped_pair");
}

XPair x_shaped_pair(double v) {
  require(std::isfinite(v), ErrorKind::NonFiniteVelocity, "velocity is not finite");
  return {logistic(v), 1.0 / (1.0 + std::exp(v))};
}

namespace {

void check_lengths(const GeneMask& bits, std::span<const double> velocities) {
  require(bits.size() == velocities.size(), ErrorKind::LengthMismatch,
          "mask length " + std::to_string(bits.size()) + " != velocity length " +
              std::to_string(velocities.size()));
}

}  // namespace

GeneMask binarize_s(const GeneMask& bits_prev, std::span<const double> velocities,
                    TransferFunction tf, Rng& rng) {
  check_lengths(bits_prev, velocities);
  GeneMask out(bits_prev.size());
  for (std::size_t j = 0; j < velocities.size(); ++j) {
    out.set(j, rng.uniform() < tf_value(tf, velocities[j]));
  }
  return out;
}

GeneMask binarize_v(const GeneMask& bits_prev, std::span<const double> velocities,
                    TransferFunction tf, Rng& rng) {
  check_lengths(bits_prev, velocities);
  GeneMask out = bits_prev;
  for (std::size_t j = 0; j < velocities.size(); ++j) {
    if (rng.uniform() < tf_value(tf, velocities[j])) out.set(j, !bits_prev.test(j));
  }
  return out;
}

std::pair<GeneMask, GeneMask> single_point_crossover(const GeneMask& a, const GeneMask& b,
                                                     std::size_t cut) {
  require(a.size() == b.size(), ErrorKind::LengthMismatch, "crossover parents differ in length");
  require(a.size() >= 2, ErrorKind::TooShort, "crossover needs masks of length >= 2");
  require(cut >= 1 && cut < a.size(), ErrorKind::InvalidArgument, "cut point must be interior");
  std::vector<bool> first(a.size());
  std::vector<bool> second(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    first[j] = j < cut ? a.test(j) : b.test(j);
    second[j] = j < cut ? b.test(j) : a.test(j);
  }
  return {GeneMask(std::move(first)), GeneMask(std::move(second))};
}

std::pair<GeneMask, GeneMask> single_point_crossover(const GeneMask& a, const GeneMask& b,
                                                     Rng& rng) {
  require(a.size() >= 2, ErrorKind::TooShort, "crossover needs masks of length >= 2");
  const auto cut = 1 + static_cast<std::size_t>(rng.below(a.size() - 1));
  return single_point_crossover(a, b, cut);
}

BitUpdateOutcome resolve_candidates(const GeneMask& bits_prev, const GeneMask& d,
                                    const GeneMask& g, const MaskFitness& fitness, Rng& rng) {
  BitUpdateOutcome out;
  const double fd = fitness(d);
  const double fg = fitness(g);
  const double fprev = fitness(bits_prev);
  out.evaluations_used = 3;
  const bool take_d = fd > fg;
  const GeneMask& z = take_d ? d : g;
  const double fz = take_d ? fd : fg;
  if (fz > fprev) {
    out.new_bits = z;
    out.fitness = fz;
    out.path = BitUpdateOutcome::Path::DirectAccept;
    return out;
  }
  out.path = BitUpdateOutcome::Path::CrossoverRepair;
  if (bits_prev.size() < 2) {
    // A single gene cannot be cut; keep the better of Z and the previous mask.
    out.new_bits = fz > fprev ? z : bits_prev;
    out.fitness = std::max(fz, fprev);
    return out;
  }
  auto [child1, child2] = single_point_crossover(z, bits_prev, rng);
  const double f1 = fitness(child1);
  const double f2 = fitness(child2);
  out.evaluations_used = 5;
  if (f2 > f1) {
    out.new_bits = std::move(child2);
    out.fitness = f2;
  } else {
    out.new_bits = std::move(child1);
    out.fitness = f1;
  }
  return out;
}

BitUpdateOutcome x_shaped_update(const GeneMask& bits_prev, std::span<const double> velocities,
                                 const MaskFitness& fitness, Rng& rng) {
  check_lengths(bits_prev, velocities);
  GeneMask d(bits_prev.size());
  GeneMask g(bits_prev.size());
  for (std::size_t j = 0; j < velocities.size(); ++j) {
    const auto [w1, w2] = x_shaped_pair(velocities[j]);
    d.set(j, rng.uniform() < w1);
    g.set(j, rng.uniform() > w2);
  }
  return resolve_candidates(bits_prev, d, g, fitness, rng);
}

}  // namespace herdselect
