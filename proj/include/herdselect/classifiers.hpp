#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "herdselect/dataset.hpp"
#include "herdselect/matrix.hpp"

namespace herdselect {

enum class ClassifierKind { Knn, GaussianNb, LinearSvm };

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::LinearSvm;
  std::size_t k = 5;       // knn
  double C = 1.0;          // linear_svm: regularization strength, step size 1/(C t)
  std::size_t epochs = 200;  // linear_svm
  bool standardize = true;

  static ClassifierSpec knn(std::size_t k = 5) { return {ClassifierKind::Knn, k, 1.0, 200, false}; }
  static ClassifierSpec gaussian_nb() { return {ClassifierKind::GaussianNb, 5, 1.0, 200, false}; }
  static ClassifierSpec linear_svm(double C = 1.0, std::size_t epochs = 200) {
    return {ClassifierKind::LinearSvm, 5, C, epochs, true};
  }

  void validate() const;
};

std::string to_string(ClassifierKind kind);
/// Accepts "knn", "gnb"/"gaussian_nb", "svm"/"linear_svm".
ClassifierKind parse_classifier_kind(const std::string& text);

struct Prediction {
  std::vector<int> labels;
  /// n_test x n_classes decision values; larger means "more like this class".
  Matrix<double> scores;
};

/// Trains on `train` and scores `test`. Both must share gene count and class
/// universe (DimensionMismatch otherwise).
///  - knn: majority vote among the k nearest (Euclidean) training rows;
///    distance ties go to the lower training index, vote ties to the lower
///    class. Scores are vote fractions.
///  - gaussian_nb: per-class Gaussian likelihoods, variance floored at 1e-9.
///    Scores are posterior probabilities.
///  - linear_svm: hinge-loss linear model(s) fitted by seeded stochastic
///    subgradient descent; one model for two classes, one-vs-rest otherwise.
///    Scores are margins.
Prediction fit_predict(const ClassifierSpec& spec, const Dataset& train, const Dataset& test,
                       std::uint64_t seed);

/// counts(actual, predicted).
struct ConfusionMatrix {
  Matrix<std::size_t> counts;

  std::size_t n_classes() const noexcept { return counts.rows(); }
  std::size_t total() const noexcept;
  std::size_t trace() const noexcept;
};

ConfusionMatrix confusion(std::span<const int> actual, std::span<const int> predicted,
                          std::size_t n_classes);

struct MetricReport {
  double accuracy = 0.0;
  double f_measure = 0.0;
  double mcc = 0.0;
  double auc = 0.0;
  /// A metric whose denominator vanished is reported as 0 with its flag set.
  bool accuracy_undefined = false;
  bool f_measure_undefined = false;
  bool mcc_undefined = false;
  bool auc_undefined = false;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

/// Binary (two classes, class 1 positive): accuracy, F = 2PR/(P+R),
/// MCC = (TP TN - FP FN) / sqrt((TP+FP)(TP+FN)(TN+FP)(TN+FN)), AUC from the
/// rank statistic on scores[:,1]. Multiclass: macro F, Gorodkin's
/// generalized MCC, macro one-vs-rest AUC.
MetricReport metrics(const ConfusionMatrix& cm, const Matrix<double>& scores,
                     std::span<const int> actual);

/// Mann-Whitney AUC for a binary labelling (nonzero = positive); ties count
/// one half. Sets `defined` to false when either side is empty.
double rank_auc(std::span<const double> scores, std::span<const std::uint8_t> positive,
                bool& defined);

struct CvReport {
  MetricReport mean;
  std::vector<MetricReport> folds;
};

/// Any train/test predictor; the seed is unique per fold.
using Predictor =
    std::function<Prediction(const Dataset& train, const Dataset& test, std::uint64_t seed)>;

/// Runs the predictor on every fold of `plan` (folds may run concurrently);
/// the mean report is the unweighted fold average. Fold f trains with seed
/// mix64(plan.seed, f).
CvReport cross_validate(const Dataset& d, const Predictor& predictor, const FoldPlan& plan,
                        std::size_t threads = 1);
CvReport cross_validate(const Dataset& d, const ClassifierSpec& spec, const FoldPlan& plan,
                        std::size_t threads = 1);
/// Builds a stratified plan from (k, seed) first.
CvReport cross_validate(const Dataset& d, const ClassifierSpec& spec, std::size_t k,
                        std::uint64_t seed, std::size_t threads = 1);

}  // namespace herdselect
