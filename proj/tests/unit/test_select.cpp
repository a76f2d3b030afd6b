#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "herdselect/error.hpp"
#include "herdselect/filters.hpp"
#include "herdselect/select.hpp"

using namespace herdselect;

namespace {

SelectorConfig small_config(TransferFunction tf = TransferFunction::X) {
  SelectorConfig cfg;
  cfg.tf = tf;
  cfg.n_horses = 8;
  cfg.max_iter = 6;
  cfg.mrmr_top_m = 12;
  cfg.classifier = ClassifierSpec::knn(3);
  cfg.cv_folds = 3;
  cfg.repeats = 2;
  cfg.seed = 5;
  return cfg;
}

SyntheticData small_data() { return make_synthetic({60, 3, 17, 2, 2.5, 3}); }

}  // namespace

TEST(Fitness, Arithmetic) {
  EXPECT_NEAR(fitness_value(1.0, 50, 50, 0.99), 0.99, 1e-12);
  EXPECT_NEAR(fitness_value(0.9, 10, 100, 0.99), 0.9, 1e-12);
  EXPECT_GT(fitness_value(0.8, 5, 50, 0.99), fitness_value(0.8, 20, 50, 0.99));
  SelectorConfig cfg;
  EXPECT_NEAR(cfg.alpha_w + cfg.beta_w(), 1.0, 1e-15);
}

TEST(Fitness, EvaluatorRepairsMemoizesAndIgnoresOrder) {
  const auto s = small_data();
  const auto plan = stratified_k_fold(s.data, 3, 1);
  const FitnessEvaluator ev(s.data, plan, ClassifierSpec::knn(3), 0.99, 4);
  const auto repaired = ev.repair(GeneMask(20));
  EXPECT_EQ(repaired.indices(), (std::vector<std::size_t>{4}));
  GeneMask single(20);
  single.set(4, true);
  EXPECT_EQ(ev(GeneMask(20)), ev(single));

  GeneMask m(20);
  for (std::size_t j : {1u, 7u, 12u}) m.set(j, true);
  const auto a = ev.evaluate(m);
  const auto b = ev.evaluate(m);
  EXPECT_EQ(a.fitness, b.fitness);
  EXPECT_EQ(ev.cache_size(), 2u);
  EXPECT_NEAR(a.fitness, fitness_value(a.accuracy, 3, 20, 0.99), 1e-15);

  // Set semantics: permuting the columns together with the mask keeps the value.
  std::vector<std::size_t> perm(20);
  for (std::size_t j = 0; j < 20; ++j) perm[j] = 19 - j;
  const Dataset reversed = subset_columns(s.data, perm);
  const FitnessEvaluator rev(reversed, plan, ClassifierSpec::knn(3), 0.99, 15);
  GeneMask rm(20);
  for (std::size_t j : {1u, 7u, 12u}) rm.set(19 - j, true);
  EXPECT_EQ(rev(rm), ev(m));
}

TEST(Selection, ResultInvariants) {
  const auto s = small_data();
  const auto cfg = small_config();
  const auto r = run_selection(s.data, cfg);
  ASSERT_EQ(r.per_repeat.size(), 2u);
  EXPECT_EQ(r.filtered_genes.size(), 12u);
  EXPECT_TRUE(std::is_sorted(r.filtered_genes.begin(), r.filtered_genes.end()));
  const std::set<std::size_t> filtered(r.filtered_genes.begin(), r.filtered_genes.end());
  for (auto g : r.best_gene_indices) EXPECT_TRUE(filtered.count(g));
  EXPECT_EQ(r.best_mask.size(), 12u);
  EXPECT_EQ(r.best_mask.selected_count(), r.best_gene_indices.size());
  EXPECT_GE(r.best_mask.selected_count(), 1u);

  for (const auto& rep : r.per_repeat) {
    EXPECT_EQ(rep.trace.size(), cfg.max_iter + 1);
    for (std::size_t t = 1; t < rep.trace.size(); ++t) EXPECT_GE(rep.trace[t], rep.trace[t - 1]);
    EXPECT_EQ(rep.trace.back(), rep.fitness);
    EXPECT_LE(rep.fitness, r.best_fitness);
    EXPECT_NEAR(rep.fitness, fitness_value(rep.accuracy, rep.n_selected, 12, cfg.alpha_w), 1e-12);
  }
  const auto again = summarize(r.per_repeat);
  EXPECT_EQ(again, r.summary);
}

TEST(Selection, DeterministicAndThreadIndependent) {
  const auto s = small_data();
  auto cfg = small_config();
  const auto a = run_selection(s.data, cfg);
  const auto b = run_selection(s.data, cfg);
  cfg.threads = 4;
  const auto c = run_selection(s.data, cfg);
  EXPECT_EQ(result_to_json(a, {false}), result_to_json(b, {false}));
  EXPECT_EQ(result_to_json(a, {false}), result_to_json(c, {false}));
}

TEST(Selection, EveryTransferFunctionRuns) {
  const auto s = small_data();
  for (auto tf : kAllTransferFunctions) {
    auto cfg = small_config(tf);
    cfg.repeats = 1;
    cfg.max_iter = 3;
    const auto r = run_selection(s.data, cfg);
    EXPECT_EQ(r.tf, tf);
    EXPECT_GE(r.best_fitness, r.per_repeat.front().trace.front());
  }
}

TEST(Selection, PerfectGeneIsFound) {
  auto s = make_synthetic({60, 2, 18, 2, 0.5, 8});
  // Overwrite gene 3 with the label itself.
  for (std::size_t r = 0; r < 60; ++r) s.data.values(r, 3) = s.data.labels[r];
  auto cfg = small_config();
  cfg.mrmr_top_m = 10;
  cfg.n_horses = 20;
  cfg.max_iter = 20;
  const auto r = run_selection(s.data, cfg);
  EXPECT_EQ(r.best_accuracy, 1.0);
  EXPECT_NE(std::find(r.best_gene_indices.begin(), r.best_gene_indices.end(), 3u), r.best_gene_indices.end());
  EXPECT_EQ(r.mrmr_order.front(), 3u);
}

TEST(Selection, FullPrefilterIsAllGenes) {
  const auto s = small_data();
  auto cfg = small_config();
  cfg.mrmr_top_m = 20;
  cfg.repeats = 1;
  const auto r = run_selection(s.data, cfg);
  EXPECT_EQ(r.filtered_genes.size(), 20u);
  for (std::size_t j = 0; j < 20; ++j) EXPECT_EQ(r.filtered_genes[j], j);
}

TEST(Selection, Errors) {
  const auto s = small_data();
  auto cfg = small_config();
  cfg.mrmr_top_m = 21;
  EXPECT_THROW(run_selection(s.data, cfg), Error);
  cfg = small_config();
  cfg.repeats = 0;
  EXPECT_THROW(run_selection(s.data, cfg), Error);
  cfg = small_config();
  cfg.alpha_w = 1.5;
  EXPECT_THROW(run_selection(s.data, cfg), Error);
}

TEST(Summary, SampleStatistics) {
  std::vector<RepeatRecord> reps(3);
  reps[0].accuracy = 0.9;
  reps[1].accuracy = 1.0;
  reps[2].accuracy = 0.8;
  reps[0].n_selected = 4;
  reps[1].n_selected = 6;
  reps[2].n_selected = 8;
  const auto s = summarize(reps);
  EXPECT_NEAR(s.mean_accuracy, 0.9, 1e-12);
  EXPECT_EQ(s.best_accuracy, 1.0);
  EXPECT_EQ(s.worst_accuracy, 0.8);
  EXPECT_NEAR(s.std_accuracy, 0.1, 1e-12);
  EXPECT_NEAR(s.mean_genes, 6.0, 1e-12);
  EXPECT_NEAR(s.std_genes, 2.0, 1e-12);
  EXPECT_EQ(summarize({reps[0]}).std_accuracy, 0.0);
  EXPECT_THROW(summarize({}), Error);
}

TEST(Export, JsonRoundTripAndCsvConsistency) {
  const auto s = small_data();
  const auto r = run_selection(s.data, small_config());
  EXPECT_EQ(result_from_json(result_to_json(r)), r);

  const auto dir = std::filesystem::temp_directory_path() / "herdselect_export_test";
  std::filesystem::remove_all(dir);
  export_result(r, dir, "run");
  EXPECT_EQ(import_result(dir / "run.json"), r);

  std::ifstream csv(dir / "run.csv");
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  EXPECT_EQ(header + "\n", summary_csv_header());
  std::vector<std::string> cells;
  std::stringstream ss(row);
  for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
  ASSERT_EQ(cells.size(), 9u);
  double mean = 0;
  for (const auto& rep : r.per_repeat) mean += rep.accuracy / r.per_repeat.size();
  double var = 0;
  for (const auto& rep : r.per_repeat) var += std::pow(rep.accuracy - mean, 2);
  EXPECT_NEAR(std::stod(cells[5]), std::sqrt(var / (r.per_repeat.size() - 1)), 1e-9);
  std::filesystem::remove_all(dir);

  EXPECT_THROW(result_from_json("{}"), Error);
  EXPECT_THROW(import_result(dir / "missing.json"), Error);
}
