#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "herdselect/binarize.hpp"
#include "herdselect/classifiers.hpp"
#include "herdselect/dataset.hpp"
#include "herdselect/hoa.hpp"

namespace herdselect {

struct SelectorConfig {
  double alpha_w = 0.99;  // weight of accuracy; the gene-count weight is 1 - alpha_w
  TransferFunction tf = TransferFunction::X;
  std::size_t n_horses = 35;
  std::size_t max_iter = 60;
  std::size_t mrmr_top_m = 50;
  ClassifierSpec classifier = ClassifierSpec::linear_svm();
  std::size_t cv_folds = 10;
  std::size_t repeats = 20;
  std::uint64_t seed = 0;
  hoa::HerdParameters herd;
  DiscretizePolicy discretizer = DiscretizePolicy::mean_sigma(0.5);
  std::size_t threads = 1;

  double beta_w() const noexcept { return 1.0 - alpha_w; }
  void validate() const;
};

/// alpha * accuracy + (1 - alpha) * |N - S| / N.
double fitness_value(double accuracy, std::size_t selected, std::size_t total, double alpha_w);

struct FitnessEval {
  double fitness = 0.0;
  double accuracy = 0.0;
};

/// Wrapper fitness over the filtered gene set with a fixed fold plan.
///
/// Values are memoized on the mask's bit pattern; evaluate() is safe to call
/// from several threads and returns the same value for the same mask no
/// matter which thread computed it first.
class FitnessEvaluator {
 public:
  /// `repair_gene` is switched on when a mask arrives empty.
  FitnessEvaluator(Dataset filtered, FoldPlan plan, ClassifierSpec classifier, double alpha_w,
                   std::size_t repair_gene);

  /// Returns the mask with the repair gene set if it selects nothing.
  GeneMask repair(const GeneMask& mask) const;

  /// Fitness of repair(mask).
  FitnessEval evaluate(const GeneMask& mask) const;
  double operator()(const GeneMask& mask) const { return evaluate(mask).fitness; }

  std::size_t n_genes() const noexcept { return filtered_.n_genes(); }
  std::size_t cache_size() const;
  /// Number of distinct masks actually cross-validated.
  std::size_t evaluations() const;

 private:
  Dataset filtered_;
  FoldPlan plan_;
  ClassifierSpec classifier_;
  double alpha_w_;
  std::size_t repair_gene_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::vector<bool>, FitnessEval> cache_;
};

struct RepeatRecord {
  double accuracy = 0.0;
  double fitness = 0.0;
  std::size_t n_selected = 0;
  double runtime_seconds = 0.0;
  std::vector<std::size_t> gene_indices;  // original dataset columns
  std::string mask;                       // over the filtered gene set
  std::vector<double> trace;              // best fitness after init and after each iteration
  std::size_t repairs = 0;                // empty masks repaired during the run
  std::uint64_t seed = 0;                 // derived seed of this repeat

  friend bool operator==(const RepeatRecord&, const RepeatRecord&) = default;
};

struct SelectionSummary {
  double best_accuracy = 0.0;
  double mean_accuracy = 0.0;
  double worst_accuracy = 0.0;
  double std_accuracy = 0.0;
  double mean_genes = 0.0;
  double std_genes = 0.0;
  double mean_runtime = 0.0;

  friend bool operator==(const SelectionSummary&, const SelectionSummary&) = default;
};

/// Sample standard deviations (n - 1); zero for a single repeat.
SelectionSummary summarize(const std::vector<RepeatRecord>& repeats);

struct SelectionResult {
  std::string dataset;
  TransferFunction tf = TransferFunction::X;
  std::vector<std::size_t> filtered_genes;  // MRMR top-m, ascending column order
  std::vector<std::size_t> mrmr_order;      // MRMR top-m, selection order
  GeneMask best_mask;                       // over filtered_genes
  std::vector<std::size_t> best_gene_indices;
  std::vector<std::string> best_gene_names;
  double best_fitness = 0.0;
  double best_accuracy = 0.0;
  std::vector<RepeatRecord> per_repeat;
  SelectionSummary summary;

  friend bool operator==(const SelectionResult&, const SelectionResult&) = default;
};

/// Per-iteration callback: (repeat, iteration, best fitness so far).
using ProgressFn = std::function<void(std::size_t, std::size_t, double)>;

/// The hybrid pipeline: discretize + MRMR prefilter to the top m genes, then
/// for every repeat a binary herd search over masks of the filtered genes,
/// scored by the wrapper fitness with a per-repeat fold plan.
SelectionResult run_selection(const Dataset& d, const SelectorConfig& config,
                              const ProgressFn& progress = {});

/// Seeds derived for a repeat; recorded in run manifests.
std::uint64_t repeat_seed(std::uint64_t seed, std::size_t repeat);
std::uint64_t fold_seed(std::uint64_t seed, std::size_t repeat);

struct ExportOptions {
  /// Wall-clock fields are the only non-reproducible part of a result.
  bool include_timing = true;
};

std::string result_to_json(const SelectionResult& result, const ExportOptions& options = {});
SelectionResult result_from_json(const std::string& text);

/// Header plus one summary row: dataset, tf, accuracy best/mean/worst/std,
/// selected-gene mean/std, mean runtime.
std::string summary_csv_header();
std::string summary_csv_row(const SelectionResult& result);

/// Writes `<stem>.json` and `<stem>.csv` into `directory`.
void export_result(const SelectionResult& result, const std::filesystem::path& directory,
                   const std::string& stem = "result", const ExportOptions& options = {});
SelectionResult import_result(const std::filesystem::path& json_path);

}  // namespace herdselect
