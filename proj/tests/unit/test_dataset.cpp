#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <set>

#include "herdselect/classifiers.hpp"
#include "herdselect/dataset.hpp"
#include "herdselect/error.hpp"
#include "herdselect/rng.hpp"

using namespace herdselect;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no herdselect::Error thrown";
  return ErrorKind::InvalidArgument;
}

Dataset tiny() {
  return parse_csv("g1,g2,label\n1,2,A\n3,4,A\n5,6,B\n");
}

}  // namespace

TEST(LoadCsv, ParsesShapeAndLabelsInFirstAppearanceOrder) {
  const Dataset d = tiny();
  EXPECT_EQ(d.n_samples(), 3u);
  EXPECT_EQ(d.n_genes(), 2u);
  EXPECT_EQ(d.n_classes(), 2u);
  EXPECT_EQ(d.class_names, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(d.labels, (std::vector<int>{0, 0, 1}));
  EXPECT_EQ(d.gene_names, (std::vector<std::string>{"g1", "g2"}));
  EXPECT_DOUBLE_EQ(d.values(2, 1), 6.0);
}

TEST(LoadCsv, LabelColumnByNameOrIndex) {
  const std::string text = "cls,g1,g2\nx,1,2\ny,3,4\n";
  CsvOptions by_name;
  by_name.label_column = std::string("cls");
  const Dataset a = parse_csv(text, by_name);
  CsvOptions by_index;
  by_index.label_column = std::size_t{0};
  const Dataset b = parse_csv(text, by_index);
  EXPECT_EQ(a.gene_names, (std::vector<std::string>{"g1", "g2"}));
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.labels, b.labels);
}

TEST(LoadCsv, Errors) {
  EXPECT_EQ(kind_of([] { parse_csv("g,label\n1,A\n2,A\n"); }), ErrorKind::SingleClass);
  EXPECT_EQ(kind_of([] { parse_csv("g,h,label\n1,,A\n2,3,B\n"); }), ErrorKind::NonNumericCell);
  EXPECT_EQ(kind_of([] { parse_csv("g,h,label\n1,2,A\n2,B\n"); }), ErrorKind::MalformedRow);
  EXPECT_EQ(kind_of([] { parse_csv(""); }), ErrorKind::EmptyFile);
  EXPECT_EQ(kind_of([] { parse_csv("g,h,label\n"); }), ErrorKind::EmptyFile);
  EXPECT_EQ(kind_of([] { parse_csv("g,h,label\n1,abc,A\n2,3,B\n"); }), ErrorKind::NonNumericCell);
  EXPECT_EQ(kind_of([] { load_csv("/nonexistent/file.csv"); }), ErrorKind::IoError);
}

TEST(LoadCsv, ErrorMessagesCarryLocation) {
  try {
    parse_csv("g,h,label\n1,2,A\n2,x,B\n");
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  }
}

TEST(LoadCsv, WriteThenLoadRoundTripsBitExactly) {
  Rng rng(9);
  Dataset d;
  d.values = Matrix<double>(6, 4);
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 0; c < 4; ++c) d.values(r, c) = rng.normal() * std::pow(10.0, rng.below(20)) / 3.0;
  }
  d.values(0, 0) = std::numeric_limits<double>::denorm_min();
  d.values(1, 1) = -0.0;
  d.values(2, 2) = std::numeric_limits<double>::max();
  d.labels = {0, 1, 0, 1, 2, 2};
  d.gene_names = {"a", "b,c", "d\"e", "f"};
  d.class_names = {"x", "y", "z"};
  const auto path = std::filesystem::temp_directory_path() / "herdselect_roundtrip.csv";
  write_csv(d, path);
  const Dataset back = load_csv(path);
  std::filesystem::remove(path);
  ASSERT_EQ(back.n_samples(), d.n_samples());
  for (std::size_t i = 0; i < d.values.data().size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back.values.data()[i]),
              std::bit_cast<std::uint64_t>(d.values.data()[i]));
  }
  EXPECT_EQ(back.gene_names, d.gene_names);
  EXPECT_EQ(back.labels, d.labels);
  EXPECT_EQ(back.class_names, d.class_names);
}

TEST(Discretize, ConstantColumnCollapses) {
  const std::vector<double> v{0, 0, 0};
  for (auto policy : {DiscretizePolicy::equal_width(4), DiscretizePolicy::mean_sigma(0.5)}) {
    const auto [levels, n] = discretize_column(v, policy);
    EXPECT_EQ(levels, (std::vector<int>{0, 0, 0}));
    EXPECT_EQ(n, 1);
  }
}

TEST(Discretize, EqualWidthHandExample) {
  const std::vector<double> v{1, 2, 3, 4};
  const auto [levels, n] = discretize_column(v, DiscretizePolicy::equal_width(2));
  EXPECT_EQ(levels, (std::vector<int>{0, 0, 1, 1}));
  EXPECT_EQ(n, 2);
}

TEST(Discretize, MeanSigmaThresholds) {
  // mean 0, population sigma 2 -> cut points at -1 and 1.
  const std::vector<double> v{-2, -2, 2, 2, -0.5, 0.5, -2, 2};
  double mu = 0, var = 0;
  for (double x : v) mu += x;
  mu /= v.size();
  for (double x : v) var += (x - mu) * (x - mu);
  const double sigma = std::sqrt(var / v.size());
  const auto [levels, n] = discretize_column(v, DiscretizePolicy::mean_sigma(0.5));
  EXPECT_EQ(n, 3);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int expected = v[i] < mu - 0.5 * sigma ? 0 : (v[i] > mu + 0.5 * sigma ? 2 : 1);
    EXPECT_EQ(levels[i], expected) << i;
  }
}

TEST(Discretize, SymmetricValuesGiveMirroredHistogram) {
  std::vector<double> v;
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const double x = rng.normal();
    v.push_back(x);
    v.push_back(-x);
  }
  const auto [levels, n] = discretize_column(v, DiscretizePolicy::mean_sigma(0.5));
  std::array<int, 3> hist{};
  for (int l : levels) ++hist[l];
  EXPECT_EQ(hist[0], hist[2]);
}

TEST(Discretize, LevelsStayInRangeAndShapeMatches) {
  const auto s = make_synthetic({40, 3, 7, 3, 2.0, 5});
  const auto dd = discretize(s.data, DiscretizePolicy::equal_width(5));
  ASSERT_EQ(dd.n_genes(), s.data.n_genes());
  ASSERT_EQ(dd.n_samples(), s.data.n_samples());
  for (std::size_t j = 0; j < dd.n_genes(); ++j) {
    for (int l : dd.columns[j]) {
      EXPECT_GE(l, 0);
      EXPECT_LT(l, dd.n_levels_per_gene[j]);
    }
  }
}

TEST(Discretize, CommutesWithSubsetForEqualWidth) {
  const auto s = make_synthetic({30, 2, 8, 2, 1.0, 8});
  GeneMask mask(10);
  for (std::size_t j : {1u, 4u, 7u}) mask.set(j, true);
  const auto policy = DiscretizePolicy::equal_width(4);
  const auto a = discretize(subset(s.data, mask), policy);
  const auto full = discretize(s.data, policy);
  const auto idx = mask.indices();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    EXPECT_EQ(a.columns[k], full.columns[idx[k]]);
    EXPECT_EQ(a.n_levels_per_gene[k], full.n_levels_per_gene[idx[k]]);
  }
}

TEST(Folds, BalancedExample) {
  std::vector<int> labels{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  const auto plan = stratified_k_fold(labels, 2, 5, 17);
  ASSERT_EQ(plan.folds.size(), 5u);
  for (const auto& f : plan.folds) {
    ASSERT_EQ(f.test.size(), 2u);
    EXPECT_NE(labels[f.test[0]], labels[f.test[1]]);
  }
  EXPECT_EQ(plan, stratified_k_fold(labels, 2, 5, 17));
}

TEST(Folds, ClassTooSmall) {
  std::vector<int> labels{0, 0, 0, 0, 0, 0, 1, 1, 1};
  EXPECT_EQ(kind_of([&] { stratified_k_fold(labels, 2, 4, 1); }), ErrorKind::ClassTooSmall);
  EXPECT_EQ(kind_of([&] { stratified_k_fold(labels, 2, 1, 1); }), ErrorKind::InvalidArgument);
}

TEST(Folds, PartitionPropertyOverRandomDraws) {
  Rng rng(2024);
  for (int draw = 0; draw < 1000; ++draw) {
    const std::size_t k = 2 + rng.below(9);
    const std::size_t n_classes = 2 + rng.below(3);
    std::vector<int> labels;
    for (std::size_t c = 0; c < n_classes; ++c) {
      const std::size_t members = k + rng.below(15);
      labels.insert(labels.end(), members, static_cast<int>(c));
    }
    rng.shuffle(std::span<int>(labels));
    const std::uint64_t seed = rng();
    const auto plan = stratified_k_fold(labels, n_classes, k, seed);
    ASSERT_EQ(plan.folds.size(), k);

    std::vector<int> seen(labels.size(), 0);
    std::vector<std::vector<std::size_t>> per_class(n_classes, std::vector<std::size_t>(k, 0));
    for (std::size_t f = 0; f < k; ++f) {
      const auto& fold = plan.folds[f];
      std::vector<char> in_test(labels.size(), 0);
      for (auto i : fold.test) {
        ++seen[i];
        in_test[i] = 1;
        ++per_class[labels[i]][f];
      }
      ASSERT_EQ(fold.train.size() + fold.test.size(), labels.size());
      for (auto i : fold.train) ASSERT_FALSE(in_test[i]);
    }
    for (int s : seen) ASSERT_EQ(s, 1);
    for (const auto& counts : per_class) {
      const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
      ASSERT_LE(*hi - *lo, 1u);
    }
  }
}

TEST(GeneMaskTest, CountTracksBits) {
  GeneMask m(5);
  EXPECT_TRUE(m.empty_selection());
  m.set(1, true);
  m.set(3, true);
  m.set(3, true);
  EXPECT_EQ(m.selected_count(), 2u);
  m.set(1, false);
  EXPECT_EQ(m.selected_count(), 1u);
  EXPECT_EQ(m.to_string(), "00010");
  EXPECT_EQ(GeneMask::from_string("00010"), m);
  EXPECT_EQ(m.indices(), (std::vector<std::size_t>{3}));
  EXPECT_EQ(kind_of([] { GeneMask::from_string("01x"); }), ErrorKind::ParseError);
}

TEST(Subset, IdentityProjectionAndEmpty) {
  const Dataset d = tiny();
  const Dataset all = subset(d, GeneMask(2, true));
  EXPECT_EQ(all.values, d.values);
  EXPECT_EQ(all.gene_names, d.gene_names);
  GeneMask first(2);
  first.set(0, true);
  const Dataset one = subset(d, first);
  ASSERT_EQ(one.n_genes(), 1u);
  for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(one.values(r, 0), d.values(r, 0));
  EXPECT_EQ(one.labels, d.labels);
  EXPECT_EQ(kind_of([&] { subset(d, GeneMask(2)); }), ErrorKind::EmptyMask);
  EXPECT_EQ(kind_of([&] { subset(d, GeneMask(3, true)); }), ErrorKind::LengthMismatch);
}

TEST(Synthetic, DeterministicAndShaped) {
  const SyntheticSpec spec{100, 5, 45, 2, 3.0, 1};
  const auto a = make_synthetic(spec);
  const auto b = make_synthetic(spec);
  EXPECT_EQ(a.data.values, b.data.values);
  EXPECT_EQ(a.data.labels, b.data.labels);
  EXPECT_EQ(a.ground_truth, b.ground_truth);
  EXPECT_EQ(a.ground_truth.size(), 50u);
  EXPECT_EQ(a.ground_truth.selected_count(), 5u);
  EXPECT_NO_THROW(a.data.validate());
  EXPECT_EQ(a.data.class_counts(), (std::vector<std::size_t>{50, 50}));
}

TEST(Synthetic, Preconditions) {
  EXPECT_EQ(kind_of([] { make_synthetic({100, 0, 45, 2, 3.0, 1}); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { make_synthetic({100, 5, 45, 2, 0.0, 1}); }), ErrorKind::InvalidArgument);
}

TEST(Synthetic, InformativeGenesShiftWithClass) {
  const auto s = make_synthetic({400, 2, 2, 2, 3.0, 3});
  for (std::size_t j = 0; j < 4; ++j) {
    double m0 = 0, m1 = 0;
    for (std::size_t r = 0; r < 400; ++r) (s.data.labels[r] ? m1 : m0) += s.data.values(r, j) / 200.0;
    if (s.ground_truth.test(j)) {
      EXPECT_NEAR(m1 - m0, 3.0, 0.3);
    } else {
      EXPECT_NEAR(m1 - m0, 0.0, 0.3);
    }
  }
}

// Independent oracle: leave-one-out 1-NN on the informative columns only,
// written directly against the raw matrix.
TEST(Synthetic, OneNearestNeighbourSeparatesInformativeColumns) {
  const auto s = make_synthetic({100, 5, 45, 2, 3.0, 1});
  const auto cols = s.ground_truth.indices();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int vote = -1;
    for (std::size_t j = 0; j < 100; ++j) {
      if (j == i) continue;
      double dist = 0;
      for (auto c : cols) dist += std::pow(s.data.values(i, c) - s.data.values(j, c), 2);
      if (dist < best) {
        best = dist;
        vote = s.data.labels[j];
      }
    }
    correct += vote == s.data.labels[i];
  }
  EXPECT_GE(correct / 100.0, 0.95);

  // The module's own CV agrees.
  const auto informative = subset(s.data, s.ground_truth);
  const auto report = cross_validate(informative, ClassifierSpec::knn(1), 10, 1);
  EXPECT_GE(report.mean.accuracy, 0.95);
}

// The acceptance dataset is separable by the same oracle.
TEST(Synthetic, AcceptanceDatasetIsSeparable) {
  const auto s = make_synthetic({120, 8, 92, 2, 3.0, 42});
  const auto report = cross_validate(subset(s.data, s.ground_truth), ClassifierSpec::knn(1), 5, 42);
  EXPECT_GE(report.mean.accuracy, 0.95);
}
