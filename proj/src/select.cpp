#include "herdselect/select.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "herdselect/csv.hpp"
#include "herdselect/error.hpp"
#include "herdselect/filters.hpp"
#include "herdselect/parallel.hpp"
#include "herdselect/rng.hpp"

namespace herdselect {

void SelectorConfig::validate() const {
  require(alpha_w >= 0.0 && alpha_w <= 1.0, ErrorKind::InvalidArgument, "alpha_w must lie in [0, 1]");
  require(n_horses >= 4, ErrorKind::InvalidArgument, "the herd needs at least 4 horses");
  require(mrmr_top_m >= 1, ErrorKind::BadM, "top-m must be at least 1");
  require(cv_folds >= 2, ErrorKind::InvalidArgument, "cross-validation needs at least 2 folds");
  require(repeats >= 1, ErrorKind::InvalidArgument, "at least one repeat is required");
  classifier.validate();
  herd.validate();
}

double fitness_value(double accuracy, std::size_t selected, std::size_t total, double alpha_w) {
  require(total > 0, ErrorKind::InvalidArgument, "fitness needs a non-empty gene universe");
  const double n = static_cast<double>(total);
  const double s = static_cast<double>(selected);
  return alpha_w * accuracy + (1.0 - alpha_w) * std::abs(n - s) / n;
}

// ---------------------------------------------------------------------------
// Fitness

FitnessEvaluator::FitnessEvaluator(Dataset filtered, FoldPlan plan, ClassifierSpec classifier,
                                   double alpha_w, std::size_t repair_gene)
    : filtered_(std::move(filtered)),
      plan_(std::move(plan)),
      classifier_(classifier),
      alpha_w_(alpha_w),
      repair_gene_(repair_gene) {
  require(repair_gene_ < filtered_.n_genes(), ErrorKind::InvalidArgument,
          "repair gene outside the filtered set");
}

GeneMask FitnessEvaluator::repair(const GeneMask& mask) const {
  require(mask.size() == filtered_.n_genes(), ErrorKind::LengthMismatch,
          "mask length differs from the filtered gene count");
  if (!mask.empty_selection()) return mask;
  GeneMask fixed = mask;
  fixed.set(repair_gene_, true);
  return fixed;
}

FitnessEval FitnessEvaluator::evaluate(const GeneMask& mask) const {
  const GeneMask effective = repair(mask);
  {
    std::lock_guard lock(mutex_);
    if (const auto it = cache_.find(effective.bits()); it != cache_.end()) return it->second;
  }
  const Dataset sub = subset(filtered_, effective);
  const auto report = cross_validate(sub, classifier_, plan_, 1);
  FitnessEval eval;
  eval.accuracy = report.mean.accuracy;
  eval.fitness = fitness_value(eval.accuracy, effective.selected_count(), filtered_.n_genes(), alpha_w_);
  std::lock_guard lock(mutex_);
  return cache_.try_emplace(effective.bits(), eval).first->second;
}

std::size_t FitnessEvaluator::cache_size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

std::size_t FitnessEvaluator::evaluations() const { return cache_size(); }

// ---------------------------------------------------------------------------
// Search

std::uint64_t repeat_seed(std::uint64_t seed, std::size_t repeat) {
  return derive_seed(seed, {stream_label("repeat"), repeat});
}

std::uint64_t fold_seed(std::uint64_t seed, std::size_t repeat) {
  return derive_seed(seed, {stream_label("folds"), repeat});
}

SelectionSummary summarize(const std::vector<RepeatRecord>& repeats) {
  require(!repeats.empty(), ErrorKind::InvalidArgument, "no repeats to summarize");
  SelectionSummary s;
  const double n = static_cast<double>(repeats.size());
  s.best_accuracy = repeats.front().accuracy;
  s.worst_accuracy = repeats.front().accuracy;
  for (const auto& r : repeats) {
    s.best_accuracy = std::max(s.best_accuracy, r.accuracy);
    s.worst_accuracy = std::min(s.worst_accuracy, r.accuracy);
    s.mean_accuracy += r.accuracy;
    s.mean_genes += static_cast<double>(r.n_selected);
    s.mean_runtime += r.runtime_seconds;
  }
  s.mean_accuracy /= n;
  s.mean_genes /= n;
  s.mean_runtime /= n;
  if (repeats.size() > 1) {
    double ss_acc = 0.0, ss_genes = 0.0;
    for (const auto& r : repeats) {
      ss_acc += (r.accuracy - s.mean_accuracy) * (r.accuracy - s.mean_accuracy);
      const double g = static_cast<double>(r.n_selected) - s.mean_genes;
      ss_genes += g * g;
    }
    s.std_accuracy = std::sqrt(ss_acc / (n - 1.0));
    s.std_genes = std::sqrt(ss_genes / (n - 1.0));
  }
  return s;
}

namespace {

std::vector<double> as_position(const GeneMask& mask) {
  std::vector<double> x(mask.size());
  for (std::size_t j = 0; j < mask.size(); ++j) x[j] = mask.test(j) ? 1.0 : 0.0;
  return x;
}

struct RepeatOutcome {
  RepeatRecord record;
  GeneMask best_mask;
};

RepeatOutcome run_repeat(const Dataset& filtered, const std::vector<std::size_t>& filtered_genes,
                         std::size_t repair_gene, const SelectorConfig& config, std::size_t repeat,
                         const ProgressFn& progress) {
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = config.n_horses;
  const std::size_t m = filtered.n_genes();
  const std::uint64_t seed = repeat_seed(config.seed, repeat);
  const FitnessEvaluator evaluator(
      filtered, stratified_k_fold(filtered, config.cv_folds, fold_seed(config.seed, repeat)),
      config.classifier, config.alpha_w, repair_gene);

  std::vector<GeneMask> masks(n);
  std::vector<FitnessEval> evals(n);
  std::vector<char> repaired(n, 0);
  for (std::size_t h = 0; h < n; ++h) {
    Rng rng(derive_seed(seed, {stream_label("init"), h}));
    GeneMask mask(m);
    for (std::size_t j = 0; j < m; ++j) mask.set(j, rng.coin());
    repaired[h] = mask.empty_selection();
    masks[h] = evaluator.repair(mask);
  }
  parallel_for(n, config.threads, [&](std::size_t h) { evals[h] = evaluator.evaluate(masks[h]); });

  RepeatOutcome out;
  out.record.seed = seed;
  std::vector<double> personal_best(n);
  std::size_t best_horse = 0;
  for (std::size_t h = 0; h < n; ++h) {
    personal_best[h] = evals[h].fitness;
    out.record.repairs += repaired[h];
    if (evals[h].fitness > evals[best_horse].fitness) best_horse = h;
  }
  out.best_mask = masks[best_horse];
  FitnessEval best = evals[best_horse];
  out.record.trace.push_back(best.fitness);

  hoa::HerdState state;
  state.coeffs = config.herd.initial;
  std::vector<double> neg_fitness(n);
  std::vector<std::size_t> rank(n);
  for (std::size_t iter = 1; iter <= config.max_iter; ++iter) {
    // The herd is sorted best-first; maximizing fitness = minimizing its negative.
    for (std::size_t h = 0; h < n; ++h) neg_fitness[h] = -evals[h].fitness;
    const auto order = hoa::sort_by_cost(neg_fitness);
    for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;
    state.age = hoa::assign_age_classes(rank);
    state.coeffs = hoa::decay(state.coeffs, config.herd.omega);
    state.positions = Matrix<double>(n, m);
    for (std::size_t h = 0; h < n; ++h) {
      for (std::size_t j = 0; j < m; ++j) state.positions(h, j) = masks[h].test(j) ? 1.0 : 0.0;
    }
    const auto guides =
        hoa::compute_guides(state.positions, order, as_position(out.best_mask), config.herd);
    const auto velocities =
        hoa::velocity_update(state, guides, config.herd, seed, iter, config.threads);

    parallel_for(n, config.threads, [&](std::size_t h) {
      Rng rng(derive_seed(seed, {stream_label("binarize"), iter, h}));
      const auto v = velocities.row(h);
      GeneMask next;
      if (config.tf == TransferFunction::X) {
        next = x_shaped_update(
                   masks[h], v, [&](const GeneMask& mask) { return evaluator(mask); }, rng)
                   .new_bits;
      } else if (is_s_shaped(config.tf)) {
        next = binarize_s(masks[h], v, config.tf, rng);
      } else {
        next = binarize_v(masks[h], v, config.tf, rng);
      }
      repaired[h] = next.empty_selection();
      masks[h] = evaluator.repair(next);
      evals[h] = evaluator.evaluate(masks[h]);
    });

    for (std::size_t h = 0; h < n; ++h) {
      out.record.repairs += repaired[h];
      if (evals[h].fitness > personal_best[h]) personal_best[h] = evals[h].fitness;
      if (evals[h].fitness > best.fitness) {
        best = evals[h];
        out.best_mask = masks[h];
      }
    }
    out.record.trace.push_back(best.fitness);
    if (progress) progress(repeat, iter, best.fitness);
  }

  out.record.fitness = best.fitness;
  out.record.accuracy = best.accuracy;
  out.record.n_selected = out.best_mask.selected_count();
  out.record.mask = out.best_mask.to_string();
  for (std::size_t j : out.best_mask.indices()) out.record.gene_indices.push_back(filtered_genes[j]);
  out.record.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

}  // namespace

SelectionResult run_selection(const Dataset& d, const SelectorConfig& config,
                              const ProgressFn& progress) {
  config.validate();
  d.validate();
  require(config.mrmr_top_m <= d.n_genes(), ErrorKind::BadM,
          "top-m " + std::to_string(config.mrmr_top_m) + " exceeds the gene count " +
              std::to_string(d.n_genes()));

  const auto levels = discretize(d, config.discretizer);
  const auto ranking = mrmr_select(levels, d.labels, config.mrmr_top_m);

  SelectionResult result;
  result.dataset = d.name;
  result.tf = config.tf;
  result.mrmr_order = ranking.order;
  result.filtered_genes = ranking.order;
  std::sort(result.filtered_genes.begin(), result.filtered_genes.end());
  const auto top = std::find(result.filtered_genes.begin(), result.filtered_genes.end(),
                             ranking.order.front());
  const auto repair_gene = static_cast<std::size_t>(top - result.filtered_genes.begin());
  const Dataset filtered = subset_columns(d, result.filtered_genes);

  // Repeats run one after another; the herd inside each repeat is parallel.
  std::vector<GeneMask> best_masks;
  for (std::size_t r = 0; r < config.repeats; ++r) {
    auto outcome = run_repeat(filtered, result.filtered_genes, repair_gene, config, r, progress);
    result.per_repeat.push_back(std::move(outcome.record));
    best_masks.push_back(std::move(outcome.best_mask));
  }

  std::size_t winner = 0;
  for (std::size_t r = 1; r < result.per_repeat.size(); ++r) {
    if (result.per_repeat[r].fitness > result.per_repeat[winner].fitness) winner = r;
  }
  const auto& best = result.per_repeat[winner];
  result.best_mask = best_masks[winner];
  result.best_gene_indices = best.gene_indices;
  for (std::size_t j : best.gene_indices) result.best_gene_names.push_back(d.gene_names[j]);
  result.best_fitness = best.fitness;
  result.best_accuracy = best.accuracy;
  result.summary = summarize(result.per_repeat);
  return result;
}

// ---------------------------------------------------------------------------
// Export

std::string result_to_json(const SelectionResult& result, const ExportOptions& options) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["dataset"] = result.dataset;
  j["tf"] = to_string(result.tf);
  j["filtered_genes"] = result.filtered_genes;
  j["mrmr_order"] = result.mrmr_order;
  j["best_mask"] = result.best_mask.to_string();
  j["best_gene_indices"] = result.best_gene_indices;
  j["best_gene_names"] = result.best_gene_names;
  j["best_fitness"] = result.best_fitness;
  j["best_accuracy"] = result.best_accuracy;
  auto& repeats = j["per_repeat"] = ordered_json::array();
  for (const auto& r : result.per_repeat) {
    ordered_json rj;
    rj["accuracy"] = r.accuracy;
    rj["fitness"] = r.fitness;
    rj["n_selected"] = r.n_selected;
    if (options.include_timing) rj["runtime_seconds"] = r.runtime_seconds;
    rj["gene_indices"] = r.gene_indices;
    rj["mask"] = r.mask;
    rj["repairs"] = r.repairs;
    rj["seed"] = r.seed;
    rj["trace"] = r.trace;
    repeats.push_back(std::move(rj));
  }
  const auto& s = result.summary;
  ordered_json sj;
  sj["best_accuracy"] = s.best_accuracy;
  sj["mean_accuracy"] = s.mean_accuracy;
  sj["worst_accuracy"] = s.worst_accuracy;
  sj["std_accuracy"] = s.std_accuracy;
  sj["mean_genes"] = s.mean_genes;
  sj["std_genes"] = s.std_genes;
  if (options.include_timing) sj["mean_runtime"] = s.mean_runtime;
  j["summary"] = std::move(sj);
  return j.dump(2) + "\n";
}

SelectionResult result_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    SelectionResult r;
    r.dataset = j.at("dataset").get<std::string>();
    r.tf = parse_transfer_function(j.at("tf").get<std::string>());
    r.filtered_genes = j.at("filtered_genes").get<std::vector<std::size_t>>();
    r.mrmr_order = j.at("mrmr_order").get<std::vector<std::size_t>>();
    r.best_mask = GeneMask::from_string(j.at("best_mask").get<std::string>());
    r.best_gene_indices = j.at("best_gene_indices").get<std::vector<std::size_t>>();
    r.best_gene_names = j.at("best_gene_names").get<std::vector<std::string>>();
    r.best_fitness = j.at("best_fitness").get<double>();
    r.best_accuracy = j.at("best_accuracy").get<double>();
    for (const auto& rj : j.at("per_repeat")) {
      RepeatRecord rec;
      rec.accuracy = rj.at("accuracy").get<double>();
      rec.fitness = rj.at("fitness").get<double>();
      rec.n_selected = rj.at("n_selected").get<std::size_t>();
      rec.runtime_seconds = rj.value("runtime_seconds", 0.0);
      rec.gene_indices = rj.at("gene_indices").get<std::vector<std::size_t>>();
      rec.mask = rj.at("mask").get<std::string>();
      rec.repairs = rj.at("repairs").get<std::size_t>();
      rec.seed = rj.at("seed").get<std::uint64_t>();
      rec.trace = rj.at("trace").get<std::vector<double>>();
      r.per_repeat.push_back(std::move(rec));
    }
    const auto& sj = j.at("summary");
    r.summary.best_accuracy = sj.at("best_accuracy").get<double>();
    r.summary.mean_accuracy = sj.at("mean_accuracy").get<double>();
    r.summary.worst_accuracy = sj.at("worst_accuracy").get<double>();
    r.summary.std_accuracy = sj.at("std_accuracy").get<double>();
    r.summary.mean_genes = sj.at("mean_genes").get<double>();
    r.summary.std_genes = sj.at("std_genes").get<double>();
    r.summary.mean_runtime = sj.value("mean_runtime", 0.0);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("result JSON: ") + e.what());
  }
}

std::string summary_csv_header() {
  return "dataset,tf,best_acc,mean_acc,worst_acc,std_acc,mean_genes,std_genes,runtime\n";
}

std::string summary_csv_row(const SelectionResult& result) {
  const auto& s = result.summary;
  std::ostringstream row;
  row << csv::escape(result.dataset) << ',' << to_string(result.tf);
  for (double v : {s.best_accuracy, s.mean_accuracy, s.worst_accuracy, s.std_accuracy, s.mean_genes,
                   s.std_genes, s.mean_runtime}) {
    row << ',' << csv::format_double(v);
  }
  row << '\n';
  return row.str();
}

void export_result(const SelectionResult& result, const std::filesystem::path& directory,
                   const std::string& stem, const ExportOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  require(!ec, ErrorKind::IoError, "cannot create " + directory.string() + ": " + ec.message());
  auto write = [](const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::IoError, "cannot write " + path.string());
    out << content;
    require(static_cast<bool>(out), ErrorKind::IoError, "write failed for " + path.string());
  };
  write(directory / (stem + ".json"), result_to_json(result, options));
  write(directory / (stem + ".csv"), summary_csv_header() + summary_csv_row(result));
}

SelectionResult import_result(const std::filesystem::path& json_path) {
  std::ifstream in(json_path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::IoError, "cannot open " + json_path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return result_from_json(buffer.str());
}

}  // namespace herdselect
