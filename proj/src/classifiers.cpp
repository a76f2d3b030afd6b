#include "herdselect/classifiers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>

#include "herdselect/error.hpp"
#include "herdselect/parallel.hpp"
#include "herdselect/rng.hpp"

namespace herdselect {

void ClassifierSpec::validate() const {
  switch (kind) {
    case ClassifierKind::Knn:
      require(k >= 1, ErrorKind::InvalidArgument, "knn needs k >= 1");
      break;
    case ClassifierKind::LinearSvm:
      require(C > 0.0 && std::isfinite(C), ErrorKind::InvalidArgument, "linear_svm needs C > 0");
      require(epochs >= 1, ErrorKind::InvalidArgument, "linear_svm needs epochs >= 1");
      break;
    case ClassifierKind::GaussianNb:
      break;
  }
}

std::string to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::Knn: return "knn";
    case ClassifierKind::GaussianNb: return "gnb";
    case ClassifierKind::LinearSvm: return "svm";
  }
  return "?";
}

ClassifierKind parse_classifier_kind(const std::string& raw) {
  std::string text = raw;
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (text == "knn") return ClassifierKind::Knn;
  if (text == "gnb" || text == "gaussian_nb") return ClassifierKind::GaussianNb;
  if (text == "svm" || text == "linear_svm") return ClassifierKind::LinearSvm;
  throw Error(ErrorKind::InvalidArgument, "unknown classifier '" + raw + "' (knn|gnb|svm)");
}

namespace {

/// Z-scores both matrices with training-set statistics; constant training
/// columns are only centered.
void standardize(Matrix<double>& train, Matrix<double>& test) {
  const std::size_t d = train.cols();
  const double n = static_cast<double>(train.rows());
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t r = 0; r < train.rows(); ++r) mean += train(r, j);
    mean /= n;
    double ss = 0.0;
    for (std::size_t r = 0; r < train.rows(); ++r) ss += (train(r, j) - mean) * (train(r, j) - mean);
    const double sd = std::sqrt(ss / n);
    const double scale = sd > 0.0 ? 1.0 / sd : 1.0;
    for (std::size_t r = 0; r < train.rows(); ++r) train(r, j) = (train(r, j) - mean) * scale;
    for (std::size_t r = 0; r < test.rows(); ++r) test(r, j) = (test(r, j) - mean) * scale;
  }
}

int argmax_lowest(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < values.size(); ++c) {
    if (values[c] > values[best]) best = c;
  }
  return static_cast<int>(best);
}

Prediction predict_knn(std::size_t k, const Matrix<double>& train, std::span<const int> labels,
                       const Matrix<double>& test, std::size_t n_classes) {
  Prediction out;
  out.scores = Matrix<double>(test.rows(), n_classes, 0.0);
  out.labels.resize(test.rows());
  const std::size_t neighbours = std::min(k, train.rows());
  std::vector<std::pair<double, std::size_t>> dist(train.rows());
  std::vector<std::size_t> votes(n_classes);
  for (std::size_t q = 0; q < test.rows(); ++q) {
    const auto x = test.row(q);
    for (std::size_t i = 0; i < train.rows(); ++i) {
      const auto t = train.row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - t[j]) * (x[j] - t[j]);
      dist[i] = {s, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(neighbours),
                      dist.end());
    std::fill(votes.begin(), votes.end(), 0);
    for (std::size_t i = 0; i < neighbours; ++i) ++votes[labels[dist[i].second]];
    std::size_t winner = 0;
    for (std::size_t c = 0; c < n_classes; ++c) {
      out.scores(q, c) = static_cast<double>(votes[c]) / static_cast<double>(neighbours);
      if (votes[c] > votes[winner]) winner = c;
    }
    out.labels[q] = static_cast<int>(winner);
  }
  return out;
}

Prediction predict_gnb(const Matrix<double>& train, std::span<const int> labels,
                       const Matrix<double>& test, std::size_t n_classes) {
  constexpr double kVarianceFloor = 1e-9;
  const std::size_t d = train.cols();
  Matrix<double> mean(n_classes, d, 0.0);
  Matrix<double> var(n_classes, d, 0.0);
  std::vector<double> count(n_classes, 0.0);
  for (std::size_t r = 0; r < train.rows(); ++r) {
    count[labels[r]] += 1.0;
    for (std::size_t j = 0; j < d; ++j) mean(labels[r], j) += train(r, j);
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t j = 0; j < d; ++j) mean(c, j) /= count[c];
  }
  for (std::size_t r = 0; r < train.rows(); ++r) {
    for (std::size_t j = 0; j < d; ++j) {
      const double delta = train(r, j) - mean(labels[r], j);
      var(labels[r], j) += delta * delta;
    }
  }
  std::vector<double> log_prior(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t j = 0; j < d; ++j) var(c, j) = std::max(var(c, j) / count[c], kVarianceFloor);
    log_prior[c] = std::log(count[c] / static_cast<double>(train.rows()));
  }

  Prediction out;
  out.scores = Matrix<double>(test.rows(), n_classes, 0.0);
  out.labels.resize(test.rows());
  std::vector<double> log_post(n_classes);
  for (std::size_t q = 0; q < test.rows(); ++q) {
    const auto x = test.row(q);
    for (std::size_t c = 0; c < n_classes; ++c) {
      double lp = log_prior[c];
      for (std::size_t j = 0; j < d; ++j) {
        const double delta = x[j] - mean(c, j);
        lp -= 0.5 * (std::log(2.0 * std::numbers::pi * var(c, j)) + delta * delta / var(c, j));
      }
      log_post[c] = lp;
    }
    out.labels[q] = argmax_lowest(log_post);
    const double top = *std::max_element(log_post.begin(), log_post.end());
    double z = 0.0;
    for (double lp : log_post) z += std::exp(lp - top);
    for (std::size_t c = 0; c < n_classes; ++c) out.scores(q, c) = std::exp(log_post[c] - top) / z;
  }
  return out;
}

struct LinearModel {
  std::vector<double> w;
  double b = 0.0;

  double margin(std::span<const double> x) const {
    double s = b;
    for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * x[j];
    return s;
  }
};

/// Pegasos-style stochastic subgradient descent on
///   (C/2) |w|^2 + mean_i max(0, 1 - y_i (w.x_i + b))
/// with step 1/(C t); the bias is not regularized.
LinearModel train_hinge(const Matrix<double>& x, std::span<const signed char> y, double C,
                        std::size_t epochs, std::uint64_t seed) {
  LinearModel model;
  model.w.assign(x.cols(), 0.0);
  Rng rng(seed);
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  double t = 0.0;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (std::size_t i : order) {
      t += 1.0;
      const double eta = 1.0 / (C * t);
      const auto row = x.row(i);
      const double yi = y[i];
      const bool violated = yi * model.margin(row) < 1.0;
      const double shrink = 1.0 - eta * C;
      for (double& wj : model.w) wj *= shrink;
      if (violated) {
        for (std::size_t j = 0; j < row.size(); ++j) model.w[j] += eta * yi * row[j];
        model.b += eta * yi;
      }
    }
  }
  return model;
}

Prediction predict_svm(const ClassifierSpec& spec, const Matrix<double>& train,
                       std::span<const int> labels, const Matrix<double>& test,
                       std::size_t n_classes, std::uint64_t seed) {
  Prediction out;
  out.scores = Matrix<double>(test.rows(), n_classes, 0.0);
  out.labels.resize(test.rows());
  std::vector<signed char> y(train.rows());
  // Two classes need one separating hyperplane; class 1 is the positive side.
  const std::size_t n_models = n_classes == 2 ? 1 : n_classes;
  for (std::size_t m = 0; m < n_models; ++m) {
    const int positive = n_classes == 2 ? 1 : static_cast<int>(m);
    for (std::size_t r = 0; r < train.rows(); ++r) y[r] = labels[r] == positive ? 1 : -1;
    const auto model = train_hinge(train, y, spec.C, spec.epochs, mix64(seed, m));
    for (std::size_t q = 0; q < test.rows(); ++q) {
      const double margin = model.margin(test.row(q));
      if (n_classes == 2) {
        out.scores(q, 0) = -margin;
        out.scores(q, 1) = margin;
      } else {
        out.scores(q, m) = margin;
      }
    }
  }
  for (std::size_t q = 0; q < test.rows(); ++q) out.labels[q] = argmax_lowest(out.scores.row(q));
  return out;
}

}  // namespace

Prediction fit_predict(const ClassifierSpec& spec, const Dataset& train, const Dataset& test,
                       std::uint64_t seed) {
  spec.validate();
  require(train.n_genes() == test.n_genes(), ErrorKind::DimensionMismatch,
          "train has " + std::to_string(train.n_genes()) + " genes, test has " +
              std::to_string(test.n_genes()));
  require(train.n_classes() == test.n_classes(), ErrorKind::DimensionMismatch,
          "train and test disagree on the class universe");
  require(train.n_samples() > 0, ErrorKind::DimensionMismatch, "empty training set");
  const std::size_t n_classes = train.n_classes();
  for (std::size_t count : train.class_counts()) {
    require(count > 0, ErrorKind::DimensionMismatch, "a class is missing from the training set");
  }

  Matrix<double> x_train = train.values;
  Matrix<double> x_test = test.values;
  if (spec.standardize) standardize(x_train, x_test);

  switch (spec.kind) {
    case ClassifierKind::Knn:
      return predict_knn(spec.k, x_train, train.labels, x_test, n_classes);
    case ClassifierKind::GaussianNb:
      return predict_gnb(x_train, train.labels, x_test, n_classes);
    case ClassifierKind::LinearSvm:
      return predict_svm(spec, x_train, train.labels, x_test, n_classes, seed);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown classifier kind");
}

// ---------------------------------------------------------------------------
// Metrics

std::size_t ConfusionMatrix::total() const noexcept {
  return std::accumulate(counts.data().begin(), counts.data().end(), std::size_t{0});
}

std::size_t ConfusionMatrix::trace() const noexcept {
  std::size_t t = 0;
  for (std::size_t c = 0; c < counts.rows(); ++c) t += counts(c, c);
  return t;
}

ConfusionMatrix confusion(std::span<const int> actual, std::span<const int> predicted,
                          std::size_t n_classes) {
  require(actual.size() == predicted.size(), ErrorKind::LengthMismatch,
          "actual and predicted lengths differ");
  ConfusionMatrix cm{Matrix<std::size_t>(n_classes, n_classes, 0)};
  for (std::size_t i = 0; i < actual.size(); ++i) {
    require(actual[i] >= 0 && static_cast<std::size_t>(actual[i]) < n_classes &&
                predicted[i] >= 0 && static_cast<std::size_t>(predicted[i]) < n_classes,
            ErrorKind::BadShape, "class index out of range");
    ++cm.counts(actual[i], predicted[i]);
  }
  return cm;
}

double rank_auc(std::span<const double> scores, std::span<const std::uint8_t> positive,
                bool& defined) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  double n_pos = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t t = i; t < j; ++t) {
      if (positive[order[t]]) {
        positive_rank_sum += mid_rank;
        n_pos += 1.0;
      }
    }
    i = j;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  defined = n_pos > 0.0 && n_neg > 0.0;
  if (!defined) return 0.0;
  return (positive_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

MetricReport metrics(const ConfusionMatrix& cm, const Matrix<double>& scores,
                     std::span<const int> actual) {
  const std::size_t k = cm.n_classes();
  const double total = static_cast<double>(cm.total());
  require(cm.total() == actual.size(), ErrorKind::LengthMismatch,
          "confusion matrix total differs from the number of labels");
  const bool have_scores = scores.rows() == actual.size() && scores.cols() == k && !actual.empty();

  MetricReport r;
  if (total == 0.0) {
    r.accuracy_undefined = true;
  } else {
    r.accuracy = static_cast<double>(cm.trace()) / total;
  }

  auto at = [&](std::size_t a, std::size_t p) { return static_cast<double>(cm.counts(a, p)); };

  if (k == 2) {
    const double tp = at(1, 1), fn = at(1, 0), fp = at(0, 1), tn = at(0, 0);
    if (tp + fp == 0.0 || tp + fn == 0.0) {
      r.f_measure_undefined = true;
    } else {
      const double precision = tp / (tp + fp);
      const double recall = tp / (tp + fn);
      if (precision + recall == 0.0) {
        r.f_measure_undefined = true;
      } else {
        r.f_measure = 2.0 * precision * recall / (precision + recall);
      }
    }
    const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (denom == 0.0) {
      r.mcc_undefined = true;
    } else {
      r.mcc = (tp * tn - fp * fn) / std::sqrt(denom);
    }
    if (have_scores) {
      std::vector<double> s(actual.size());
      std::vector<std::uint8_t> pos(actual.size());
      for (std::size_t i = 0; i < actual.size(); ++i) {
        s[i] = scores(i, 1);
        pos[i] = actual[i] == 1;
      }
      bool defined = false;
      r.auc = rank_auc(s, pos, defined);
      r.auc_undefined = !defined;
    } else {
      r.auc_undefined = true;
    }
    return r;
  }

  // Multiclass: macro F.
  double f_sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    double predicted = 0.0, actual_c = 0.0;
    for (std::size_t o = 0; o < k; ++o) {
      predicted += at(o, c);
      actual_c += at(c, o);
    }
    const double tp = at(c, c);
    if (predicted == 0.0 || actual_c == 0.0 || tp == 0.0) {
      // F_c is 0 when tp == 0 but both sides exist; flagged only for a zero denominator.
      if (predicted == 0.0 || actual_c == 0.0) r.f_measure_undefined = true;
      continue;
    }
    const double precision = tp / predicted;
    const double recall = tp / actual_c;
    f_sum += 2.0 * precision * recall / (precision + recall);
  }
  r.f_measure = f_sum / static_cast<double>(k);

  // Gorodkin's R_K on the full matrix.
  double sum_pt = 0.0, sum_pp = 0.0, sum_tt = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    double p = 0.0, t = 0.0;
    for (std::size_t o = 0; o < k; ++o) {
      p += at(o, c);
      t += at(c, o);
    }
    sum_pt += p * t;
    sum_pp += p * p;
    sum_tt += t * t;
  }
  const double denom = (total * total - sum_pp) * (total * total - sum_tt);
  if (denom <= 0.0) {
    r.mcc_undefined = true;
  } else {
    r.mcc = (static_cast<double>(cm.trace()) * total - sum_pt) / std::sqrt(denom);
  }

  if (have_scores) {
    double auc_sum = 0.0;
    std::size_t defined_count = 0;
    std::vector<double> s(actual.size());
    std::vector<std::uint8_t> pos(actual.size());
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t i = 0; i < actual.size(); ++i) {
        s[i] = scores(i, c);
        pos[i] = static_cast<std::size_t>(actual[i]) == c;
      }
      bool defined = false;
      const double auc = rank_auc(s, pos, defined);
      if (defined) {
        auc_sum += auc;
        ++defined_count;
      } else {
        r.auc_undefined = true;
      }
    }
    if (defined_count > 0) r.auc = auc_sum / static_cast<double>(defined_count);
  } else {
    r.auc_undefined = true;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Cross-validation

CvReport cross_validate(const Dataset& d, const Predictor& predictor, const FoldPlan& plan,
                        std::size_t threads) {
  CvReport report;
  report.folds.resize(plan.folds.size());
  parallel_for(plan.folds.size(), threads, [&](std::size_t f) {
    const auto& fold = plan.folds[f];
    const Dataset train = subset_rows(d, fold.train);
    const Dataset test = subset_rows(d, fold.test);
    const auto prediction = predictor(train, test, mix64(plan.seed, f));
    const auto cm = confusion(test.labels, prediction.labels, d.n_classes());
    report.folds[f] = metrics(cm, prediction.scores, test.labels);
  });
  const double n = static_cast<double>(report.folds.size());
  for (const auto& fold : report.folds) {
    report.mean.accuracy += fold.accuracy;
    report.mean.f_measure += fold.f_measure;
    report.mean.mcc += fold.mcc;
    report.mean.auc += fold.auc;
    report.mean.accuracy_undefined |= fold.accuracy_undefined;
    report.mean.f_measure_undefined |= fold.f_measure_undefined;
    report.mean.mcc_undefined |= fold.mcc_undefined;
    report.mean.auc_undefined |= fold.auc_undefined;
  }
  // Dividing once keeps a run of perfect folds at exactly 1.
  report.mean.accuracy /= n;
  report.mean.f_measure /= n;
  report.mean.mcc /= n;
  report.mean.auc /= n;
  return report;
}

CvReport cross_validate(const Dataset& d, const ClassifierSpec& spec, const FoldPlan& plan,
                        std::size_t threads) {
  spec.validate();
  const Predictor predictor = [&spec](const Dataset& train, const Dataset& test,
                                      std::uint64_t seed) {
    return fit_predict(spec, train, test, seed);
  };
  return cross_validate(d, predictor, plan, threads);
}

CvReport cross_validate(const Dataset& d, const ClassifierSpec& spec, std::size_t k,
                        std::uint64_t seed, std::size_t threads) {
  return cross_validate(d, spec, stratified_k_fold(d, k, seed), threads);
}

}  // namespace herdselect
