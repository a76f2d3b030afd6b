#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "herdselect/matrix.hpp"

namespace herdselect {

/// Samples x genes expression table with dense integer class labels.
///
/// Invariants (checked by validate()): one label per row, finite values,
/// at least two classes and every class index in [0, n_classes) present.
/// Treat instances as immutable once built; they are shared read-only
/// across worker threads.
struct Dataset {
  Matrix<double> values;
  std::vector<int> labels;
  std::vector<std::string> gene_names;
  std::vector<std::string> class_names;
  std::string name;

  std::size_t n_samples() const noexcept { return values.rows(); }
  std::size_t n_genes() const noexcept { return values.cols(); }
  std::size_t n_classes() const noexcept { return class_names.size(); }

  std::vector<std::size_t> class_counts() const;

  /// Throws Error(SingleClass / LengthMismatch / NonNumericCell / BadShape).
  void validate() const;
};

/// Per-gene discrete levels, stored column-major because every consumer
/// (mutual information) walks whole columns.
struct DiscretizedDataset {
  std::vector<std::vector<int>> columns;
  std::vector<int> n_levels_per_gene;
  std::string source_ref;

  std::size_t n_samples() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
  std::size_t n_genes() const noexcept { return columns.size(); }
};

struct DiscretizePolicy {
  enum class Kind { EqualWidth, MeanSigma };
  Kind kind = Kind::MeanSigma;
  int bins = 3;
  double t = 0.5;

  static DiscretizePolicy equal_width(int bins) { return {Kind::EqualWidth, bins, 0.0}; }
  static DiscretizePolicy mean_sigma(double t) { return {Kind::MeanSigma, 3, t}; }
};

/// Discretizes every gene independently. Constant genes collapse to the
/// single level 0. mean_sigma(t): 0 below mu - t*sigma, 2 above mu + t*sigma,
/// 1 otherwise (sigma is the population standard deviation).
DiscretizedDataset discretize(const Dataset& d, const DiscretizePolicy& policy);

/// Discretizes a single column with the same rules as discretize().
std::pair<std::vector<int>, int> discretize_column(std::span<const double> values,
                                                   const DiscretizePolicy& policy);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

struct FoldPlan {
  std::vector<Fold> folds;
  std::size_t k = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const FoldPlan& a, const FoldPlan& b) {
    if (a.k != b.k || a.seed != b.seed || a.folds.size() != b.folds.size()) return false;
    for (std::size_t i = 0; i < a.folds.size(); ++i) {
      if (a.folds[i].train != b.folds[i].train || a.folds[i].test != b.folds[i].test) return false;
    }
    return true;
  }
};

/// Stratified k-fold split. Each class is shuffled with the seeded stream and
/// dealt round-robin to folds; the dealing position carries over from one
/// class to the next so remainders spread across folds.
/// Throws ClassTooSmall if any class has fewer than k members.
FoldPlan stratified_k_fold(std::span<const int> labels, std::size_t n_classes, std::size_t k,
                           std::uint64_t seed);
FoldPlan stratified_k_fold(const Dataset& d, std::size_t k, std::uint64_t seed);

/// Boolean selection over candidate genes with a cached popcount.
class GeneMask {
 public:
  GeneMask() = default;
  explicit GeneMask(std::size_t size, bool value = false)
      : bits_(size, value), selected_(value ? size : 0) {}
  explicit GeneMask(std::vector<bool> bits);

  /// Parses a string of '0'/'1' characters.
  static GeneMask from_string(std::string_view text);

  std::size_t size() const noexcept { return bits_.size(); }
  std::size_t selected_count() const noexcept { return selected_; }
  bool empty_selection() const noexcept { return selected_ == 0; }

  bool test(std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool value);

  const std::vector<bool>& bits() const noexcept { return bits_; }
  std::vector<std::size_t> indices() const;
  std::string to_string() const;

  friend bool operator==(const GeneMask& a, const GeneMask& b) { return a.bits_ == b.bits_; }

 private:
  std::vector<bool> bits_;
  std::size_t selected_ = 0;
};

/// Keeps the masked columns in their original order. Throws EmptyMask or
/// LengthMismatch.
Dataset subset(const Dataset& d, const GeneMask& mask);
Dataset subset_columns(const Dataset& d, std::span<const std::size_t> columns);
Dataset subset_rows(const Dataset& d, std::span<const std::size_t> rows);

struct CsvOptions {
  /// Label column by header name or zero-based index; unset selects the last column.
  std::variant<std::monostate, std::string, std::size_t> label_column;
  char delimiter = ',';
};

/// Reads a header-first CSV. Label strings become dense class indices in
/// order of first appearance. Throws EmptyFile, MalformedRow,
/// NonNumericCell, SingleClass or IoError.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(std::string_view text, const CsvOptions& options = {},
                  std::string name = "inline");

/// Writes genes then a trailing "label" column; numbers use 17 significant
/// digits so load_csv(write_csv(d)) reproduces every finite double.
void write_csv(const Dataset& d, const std::filesystem::path& path);
std::string to_csv(const Dataset& d);

struct SyntheticSpec {
  std::size_t n_samples = 100;
  std::size_t n_informative = 5;
  std::size_t n_noise = 45;
  std::size_t n_classes = 2;
  double separation = 3.0;
  std::uint64_t seed = 1;
};

struct SyntheticData {
  Dataset data;
  GeneMask ground_truth;
};

/// Planted-gene generator. Labels cycle through the classes and are then
/// shuffled; informative genes are N(c * separation, 1) for class c, noise
/// genes N(0, 1); informative columns are scattered at seeded positions.
SyntheticData make_synthetic(const SyntheticSpec& spec);

}  // namespace herdselect
