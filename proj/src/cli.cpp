#include "herdselect/cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "herdselect/binarize.hpp"
#include "herdselect/classifiers.hpp"
#include "herdselect/csv.hpp"
#include "herdselect/dataset.hpp"
#include "herdselect/error.hpp"
#include "herdselect/filters.hpp"
#include "herdselect/parallel.hpp"
#include "herdselect/select.hpp"
#include "herdselect/stats.hpp"

#ifndef HERDSELECT_VERSION
#define HERDSELECT_VERSION "0.0.0"
#endif

namespace herdselect {

const char* version() noexcept { return HERDSELECT_VERSION; }

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  std::string out = "out";
  std::string config;
};

struct DataArgs {
  std::string data;
  std::string label_col;
};

struct FilterArgs {
  DataArgs data;
  std::size_t top_m = 50;
  std::string discretizer = "mean-sigma";
  double t = 0.5;
  int bins = 3;
};

struct ClassifierArgs {
  std::string classifier = "svm";
  std::size_t knn_k = 5;
  double svm_c = 1.0;
  std::size_t svm_epochs = 200;
};

struct CvArgs {
  DataArgs data;
  ClassifierArgs clf;
  std::size_t folds = 10;
};

struct SelectArgs {
  FilterArgs filter;
  ClassifierArgs clf;
  std::string tf = "x";
  std::vector<std::string> tfs{"s1", "v1", "x"};
  std::size_t horses = 35;
  std::size_t iters = 60;
  std::size_t repeats = 20;
  std::size_t folds = 10;
  double alpha = 0.99;
  bool quiet = false;
};

struct StatsArgs {
  std::string input;
  bool pre_ranked = false;
  bool lower_is_better = false;
  std::size_t datasets = 0;
  std::string control;
  double alpha = 0.05;
};

struct DemoArgs {
  SyntheticSpec spec;
};

std::vector<std::string> transfer_tags() {
  std::vector<std::string> tags;
  for (auto tf : kAllTransferFunctions) tags.push_back(to_string(tf));
  return tags;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += sep;
    s += parts[i];
  }
  return s;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Master seed");
  sub->add_option("--threads", c.threads, "Worker threads, 0 = all cores (env HERDSELECT_THREADS)");
  sub->add_option("--out", c.out, "Output directory");
  sub->add_option("--config", c.config, "JSON file with option values keyed by flag name");
}

void add_data(CLI::App* sub, DataArgs& d) {
  // Required, but checked after --config is applied (see require_options).
  sub->add_option("--data", d.data, "Input CSV (header row, one sample per row) [required]");
  sub->add_option("--label-col", d.label_col, "Label column name or 0-based index (default: last)");
}

void add_filter(CLI::App* sub, FilterArgs& f) {
  add_data(sub, f.data);
  sub->add_option("--top-m", f.top_m, "Genes kept by the MRMR ranking")
      ->check(CLI::PositiveNumber);
  sub->add_option("--discretizer", f.discretizer, "mean-sigma or equal-width")
      ->check(CLI::IsMember({"mean-sigma", "equal-width"}));
  sub->add_option("--t", f.t, "mean-sigma threshold in standard deviations");
  sub->add_option("--bins", f.bins, "equal-width bin count")->check(CLI::PositiveNumber);
}

void add_classifier(CLI::App* sub, ClassifierArgs& c) {
  sub->add_option("--classifier", c.classifier, "knn, gnb or svm")
      ->check(CLI::IsMember({"knn", "gnb", "gaussian_nb", "svm", "linear_svm"}, CLI::ignore_case));
  sub->add_option("--knn-k", c.knn_k, "Neighbours for knn")->check(CLI::PositiveNumber);
  sub->add_option("--svm-c", c.svm_c, "Regularization strength for svm")->check(CLI::PositiveNumber);
  sub->add_option("--svm-epochs", c.svm_epochs, "Training epochs for svm")
      ->check(CLI::PositiveNumber);
}

void add_search(CLI::App* sub, SelectArgs& s) {
  add_filter(sub, s.filter);
  add_classifier(sub, s.clf);
  sub->add_option("--horses", s.horses, "Herd size")->check(CLI::Range(4, 1 << 20));
  sub->add_option("--iters", s.iters, "Iterations per repeat");
  sub->add_option("--repeats", s.repeats, "Independent repeats")->check(CLI::PositiveNumber);
  sub->add_option("--folds", s.folds, "Cross-validation folds inside the fitness")
      ->check(CLI::Range(2, 1 << 20));
  sub->add_option("--alpha", s.alpha, "Accuracy weight of the fitness")->check(CLI::Range(0.0, 1.0));
  sub->add_flag("--quiet", s.quiet, "Suppress the per-iteration log");
}

std::vector<std::string> json_to_strings(const nlohmann::json& value) {
  std::vector<std::string> out;
  auto scalar = [](const nlohmann::json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw UsageError("config values must be strings, numbers, booleans or arrays of those");
  };
  if (value.is_array()) {
    for (const auto& v : value) out.push_back(scalar(v));
  } else {
    out.push_back(scalar(value));
  }
  return out;
}

// Options not given on the command line take their value from the config file.
void apply_config(CLI::App* sub, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file " + path + " must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "config") continue;
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) throw UsageError("unknown config key '" + key + "' for " + sub->get_name());
    if (opt->count() > 0) continue;
    for (const auto& v : json_to_strings(value)) opt->add_result(v);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("config key '" + key + "': " + e.what());
    }
  }
}

// Either the command line or the config file must supply these.
void require_options(const CLI::App* sub) {
  for (const char* name : {"--data", "--input"}) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    if (opt != nullptr && opt->count() == 0) throw UsageError(std::string(name) + " is required");
  }
}

void apply_env_threads(CLI::App* sub, Common& c) {
  if (sub->get_option("--threads")->count() > 0) return;
  const char* env = std::getenv("HERDSELECT_THREADS");
  if (env == nullptr || *env == '\0') return;
  try {
    std::size_t pos = 0;
    const long v = std::stol(env, &pos);
    if (pos != std::string(env).size() || v < 0) throw std::invalid_argument(env);
    c.threads = static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw UsageError(std::string("HERDSELECT_THREADS must be a non-negative integer, got '") + env +
                     "'");
  }
}

// Resolved option values, re-loadable through --config.
ordered_json resolved_config(const CLI::App* sub) {
  ordered_json cfg = ordered_json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || names.front() == "help" || names.front() == "config") continue;
    std::vector<std::string> values = opt->results();
    if (values.empty()) {
      if (opt->get_type_size() == 0) {
        cfg[names.front()] = false;
        continue;
      }
      const std::string def = opt->get_default_str();
      if (def.empty()) continue;
      values = {def};
      if (def.front() == '[') values = CLI::detail::split(def.substr(1, def.size() - 2), ',');
    }
    if (opt->get_type_size() == 0) {
      cfg[names.front()] = values.back() == "true" || values.back() == "1";
    } else if (opt->get_expected_max() > 1) {
      cfg[names.front()] = values;
    } else {
      cfg[names.front()] = values.back();
    }
  }
  return cfg;
}

void write_text(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  require(!ec, ErrorKind::IoError, "cannot create " + path.parent_path().string());
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::IoError, "cannot write " + path.string());
  out << content;
  require(static_cast<bool>(out), ErrorKind::IoError, "write failed for " + path.string());
}

void write_manifest(const CLI::App* sub, const Common& c, ordered_json derived,
                    ordered_json timings) {
  ordered_json m;
  m["tool"] = "herdselect";
  m["version"] = version();
  m["command"] = sub->get_name();
  m["seed"] = c.seed;
  m["threads"] = resolve_threads(c.threads);
  m["config"] = resolved_config(sub);
  m["derived_seeds"] = std::move(derived);
  m["timings"] = std::move(timings);
  write_text(fs::path(c.out) / "run-manifest.json", m.dump(2) + "\n");
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Dataset load(const DataArgs& a) {
  CsvOptions opts;
  if (!a.label_col.empty()) {
    const bool numeric =
        std::all_of(a.label_col.begin(), a.label_col.end(), [](unsigned char ch) { return std::isdigit(ch); });
    if (numeric) {
      opts.label_column = static_cast<std::size_t>(std::stoull(a.label_col));
    } else {
      opts.label_column = a.label_col;
    }
  }
  return load_csv(a.data, opts);
}

DiscretizePolicy policy(const FilterArgs& f) {
  return f.discretizer == "equal-width" ? DiscretizePolicy::equal_width(f.bins)
                                        : DiscretizePolicy::mean_sigma(f.t);
}

ClassifierSpec classifier_spec(const ClassifierArgs& c) {
  switch (parse_classifier_kind(c.classifier)) {
    case ClassifierKind::Knn:
      return ClassifierSpec::knn(c.knn_k);
    case ClassifierKind::GaussianNb:
      return ClassifierSpec::gaussian_nb();
    case ClassifierKind::LinearSvm:
      return ClassifierSpec::linear_svm(c.svm_c, c.svm_epochs);
  }
  return {};
}

ordered_json metrics_json(const MetricReport& r) {
  ordered_json j;
  j["accuracy"] = r.accuracy;
  j["f_measure"] = r.f_measure;
  j["mcc"] = r.mcc;
  j["auc"] = r.auc;
  ordered_json undefined = ordered_json::array();
  if (r.accuracy_undefined) undefined.push_back("accuracy");
  if (r.f_measure_undefined) undefined.push_back("f_measure");
  if (r.mcc_undefined) undefined.push_back("mcc");
  if (r.auc_undefined) undefined.push_back("auc");
  j["undefined"] = std::move(undefined);
  return j;
}

// ---------------------------------------------------------------------------

void cmd_filter(const CLI::App* sub, const Common& c, const FilterArgs& f, std::ostream& out) {
  const auto start = Clock::now();
  const Dataset d = load(f.data);
  const auto ranking = mrmr_select(discretize(d, policy(f)), d.labels, f.top_m);
  std::string csv = "rank,gene_index,gene_name,score\n";
  for (std::size_t r = 0; r < ranking.order.size(); ++r) {
    const std::size_t g = ranking.order[r];
    csv += std::to_string(r + 1) + ',' + std::to_string(g) + ',' + csv::escape(d.gene_names[g]) +
           ',' + csv::format_double(ranking.scores[r]) + '\n';
  }
  write_text(fs::path(c.out) / "ranking.csv", csv);
  write_manifest(sub, c, ordered_json::object(), {{"total_seconds", seconds_since(start)}});
  out << "ranked " << ranking.order.size() << " of " << d.n_genes() << " genes -> "
      << (fs::path(c.out) / "ranking.csv").string() << '\n';
}

void cmd_cv(const CLI::App* sub, const Common& c, const CvArgs& a, std::ostream& out) {
  const auto start = Clock::now();
  const Dataset d = load(a.data);
  const auto spec = classifier_spec(a.clf);
  const auto plan = stratified_k_fold(d, a.folds, c.seed);
  const auto report = cross_validate(d, spec, plan, c.threads);

  ordered_json j;
  j["dataset"] = d.name;
  j["classifier"] = to_string(spec.kind);
  j["folds"] = a.folds;
  j["seed"] = c.seed;
  j["mean"] = metrics_json(report.mean);
  j["per_fold"] = ordered_json::array();
  for (const auto& f : report.folds) j["per_fold"].push_back(metrics_json(f));
  write_text(fs::path(c.out) / "metrics.json", j.dump(2) + "\n");

  ordered_json derived = ordered_json::array();
  for (std::size_t f = 0; f < plan.folds.size(); ++f) derived.push_back(mix64(plan.seed, f));
  write_manifest(sub, c, {{"fold_training", derived}}, {{"total_seconds", seconds_since(start)}});
  out << "accuracy " << report.mean.accuracy << " over " << a.folds << " folds\n";
}

SelectorConfig selector_config(const Common& c, const SelectArgs& s) {
  SelectorConfig cfg;
  cfg.alpha_w = s.alpha;
  cfg.tf = parse_transfer_function(s.tf);
  cfg.n_horses = s.horses;
  cfg.max_iter = s.iters;
  cfg.mrmr_top_m = s.filter.top_m;
  cfg.classifier = classifier_spec(s.clf);
  cfg.cv_folds = s.folds;
  cfg.repeats = s.repeats;
  cfg.seed = c.seed;
  cfg.discretizer = policy(s.filter);
  cfg.threads = c.threads;
  return cfg;
}

ProgressFn progress_log(const SelectArgs& s, const std::string& tag, std::ostream& err) {
  if (s.quiet) return {};
  return [&err, tag](std::size_t repeat, std::size_t iter, double best) {
    err << tag << " repeat " << repeat << " iter " << iter << " best " << best << '\n';
  };
}

ordered_json repeat_seeds(const SelectorConfig& cfg) {
  ordered_json seeds = ordered_json::array();
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    seeds.push_back({{"repeat", r},
                     {"search", repeat_seed(cfg.seed, r)},
                     {"folds", fold_seed(cfg.seed, r)}});
  }
  return seeds;
}

std::string trace_rows(const SelectionResult& res, bool with_tf) {
  std::string rows;
  for (std::size_t r = 0; r < res.per_repeat.size(); ++r) {
    const auto& trace = res.per_repeat[r].trace;
    for (std::size_t it = 0; it < trace.size(); ++it) {
      if (with_tf) rows += to_string(res.tf) + ',';
      rows += std::to_string(r) + ',' + std::to_string(it) + ',' + csv::format_double(trace[it]) + '\n';
    }
  }
  return rows;
}

void cmd_select(const CLI::App* sub, const Common& c, const SelectArgs& s, std::ostream& out,
                std::ostream& err) {
  const auto start = Clock::now();
  const Dataset d = load(s.filter.data);
  const auto cfg = selector_config(c, s);
  const auto res = run_selection(d, cfg, progress_log(s, to_string(cfg.tf), err));

  const fs::path dir(c.out);
  write_text(dir / "result.json", result_to_json(res, ExportOptions{false}));
  write_text(dir / "summary.csv", summary_csv_header() + summary_csv_row(res));
  write_text(dir / "trace.csv", "repeat,iteration,best_fitness\n" + trace_rows(res, false));

  ordered_json timings;
  timings["total_seconds"] = seconds_since(start);
  timings["repeat_seconds"] = ordered_json::array();
  for (const auto& r : res.per_repeat) timings["repeat_seconds"].push_back(r.runtime_seconds);
  write_manifest(sub, c, {{"repeats", repeat_seeds(cfg)}}, std::move(timings));
  out << "best accuracy " << res.best_accuracy << " with " << res.best_gene_indices.size()
      << " genes: " << join(res.best_gene_names, " ") << '\n';
}

void cmd_tf_bench(const CLI::App* sub, const Common& c, const SelectArgs& s, std::ostream& out,
                  std::ostream& err) {
  const auto start = Clock::now();
  const Dataset d = load(s.filter.data);
  std::vector<TransferFunction> tfs;
  for (const auto& tag : s.tfs) tfs.push_back(parse_transfer_function(tag));

  std::string table = summary_csv_header();
  std::string traces = "tf,repeat,iteration,best_fitness\n";
  ordered_json timings;
  // Every TF shares the master seed, so all of them see the same folds and
  // the same initial herd.
  for (auto tf : tfs) {
    auto cfg = selector_config(c, s);
    cfg.tf = tf;
    const auto tf_start = Clock::now();
    const auto res = run_selection(d, cfg, progress_log(s, to_string(tf), err));
    timings[to_string(tf) + "_seconds"] = seconds_since(tf_start);
    table += summary_csv_row(res);
    traces += trace_rows(res, true);
    out << to_string(tf) << ": mean accuracy " << res.summary.mean_accuracy << ", mean genes "
        << res.summary.mean_genes << '\n';
  }
  write_text(fs::path(c.out) / "tf-comparison.csv", table);
  write_text(fs::path(c.out) / "traces.csv", traces);
  timings["total_seconds"] = seconds_since(start);
  write_manifest(sub, c, {{"repeats", repeat_seeds(selector_config(c, s))}}, std::move(timings));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

struct ScoreTable {
  std::vector<std::string> algorithms;
  std::vector<std::string> datasets;
  std::vector<std::vector<double>> rows;
};

ScoreTable read_scores(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::IoError, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto table = csv::parse(buffer.str());
  require(!table.header.empty(), ErrorKind::EmptyFile, path + " has no header");

  const std::string first = lower(table.header.front());
  const bool named_rows = first == "dataset" || first == "datasets" || first.empty();
  ScoreTable s;
  s.algorithms.assign(table.header.begin() + (named_rows ? 1 : 0), table.header.end());
  require(!s.algorithms.empty(), ErrorKind::BadShape, path + " lists no algorithms");
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    if (row.size() != table.header.size()) {
      throw Error(ErrorKind::MalformedRow, path + ": row " + std::to_string(line) + ": expected " +
                                               std::to_string(table.header.size()) +
                                               " fields, got " + std::to_string(row.size()));
    }
    s.datasets.push_back(named_rows ? row.front() : "d" + std::to_string(r));
    std::vector<double> values;
    for (std::size_t col = named_rows ? 1 : 0; col < row.size(); ++col) {
      double v = 0.0;
      if (!csv::parse_double(row[col], v)) {
        throw Error(ErrorKind::ParseError, path + ": row " + std::to_string(line) + ", column " +
                                               std::to_string(col + 1) + " (" + table.header[col] +
                                               "): '" + row[col] + "' is not a number");
      }
      values.push_back(v);
    }
    s.rows.push_back(std::move(values));
  }
  require(!s.rows.empty(), ErrorKind::EmptyFile, path + " has no data rows");
  return s;
}

void cmd_stats(const CLI::App* sub, const Common& c, const StatsArgs& a, std::ostream& out) {
  const auto start = Clock::now();
  const auto table = read_scores(a.input);
  std::vector<double> ranks;
  std::size_t n = 0;
  if (a.pre_ranked) {
    if (table.rows.size() != 1) {
      throw Error(ErrorKind::BadShape, "--pre-ranked expects exactly one row of average ranks");
    }
    if (a.datasets == 0) throw UsageError("--pre-ranked needs --datasets N");
    ranks = table.rows.front();
    n = a.datasets;
  } else {
    ranks = stats::average_ranks(table.rows, !a.lower_is_better);
    n = table.rows.size();
  }
  const auto fr = stats::friedman_statistic(ranks, n);

  std::vector<stats::PairwiseComparison> pairs;
  if (a.control.empty()) {
    pairs = stats::posthoc_z(ranks, n, a.alpha);
  } else {
    auto it = std::find(table.algorithms.begin(), table.algorithms.end(), a.control);
    std::size_t control = 0;
    if (it != table.algorithms.end()) {
      control = static_cast<std::size_t>(it - table.algorithms.begin());
    } else if (std::all_of(a.control.begin(), a.control.end(),
                           [](unsigned char ch) { return std::isdigit(ch); })) {
      control = std::stoull(a.control);
    } else {
      throw UsageError("--control '" + a.control + "' names no algorithm column");
    }
    if (control >= ranks.size()) throw UsageError("--control index out of range");
    pairs = stats::posthoc_vs_control(ranks, n, control, a.alpha);
  }

  ordered_json j;
  j["k"] = ranks.size();
  j["n"] = n;
  j["algorithms"] = table.algorithms;
  j["avg_ranks"] = ranks;
  j["friedman"] = {{"chi_square", fr.chi_square}, {"df", fr.df}, {"p_value", fr.p_value}};
  j["alpha"] = a.alpha;
  j["pairwise"] = ordered_json::array();
  for (const auto& p : pairs) {
    j["pairwise"].push_back({{"first", table.algorithms[p.first]},
                             {"second", table.algorithms[p.second]},
                             {"z", p.z},
                             {"p_value", p.p_value},
                             {"rejected", p.rejected}});
  }
  write_text(fs::path(c.out) / "stats.json", j.dump(2) + "\n");
  write_manifest(sub, c, ordered_json::object(), {{"total_seconds", seconds_since(start)}});
  out << "friedman chi2 " << fr.chi_square << " (df " << fr.df << ") p " << fr.p_value << '\n';
}

void cmd_demo_data(const CLI::App* sub, const Common& c, DemoArgs a, std::ostream& out) {
  const auto start = Clock::now();
  a.spec.seed = c.seed;
  const auto synth = make_synthetic(a.spec);
  const fs::path dir(c.out);
  write_text(dir / "data.csv", to_csv(synth.data));

  ordered_json truth;
  truth["n_samples"] = a.spec.n_samples;
  truth["n_informative"] = a.spec.n_informative;
  truth["n_noise"] = a.spec.n_noise;
  truth["n_classes"] = a.spec.n_classes;
  truth["separation"] = a.spec.separation;
  truth["seed"] = a.spec.seed;
  truth["mask"] = synth.ground_truth.to_string();
  truth["informative_indices"] = synth.ground_truth.indices();
  ordered_json names = ordered_json::array();
  for (std::size_t g : synth.ground_truth.indices()) names.push_back(synth.data.gene_names[g]);
  truth["informative_names"] = std::move(names);
  write_text(dir / "ground_truth.json", truth.dump(2) + "\n");
  write_manifest(sub, c, {{"layout", derive_seed(c.seed, {stream_label("layout")})},
                          {"values", derive_seed(c.seed, {stream_label("values")})}},
                 {{"total_seconds", seconds_since(start)}});
  out << "wrote " << (dir / "data.csv").string() << " (" << synth.data.n_samples() << " x "
      << synth.data.n_genes() << ")\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gene selection with an MRMR prefilter and a binary horse herd search", "herdselect"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  Common common;
  FilterArgs filter;
  CvArgs cv;
  SelectArgs select;
  SelectArgs bench;
  StatsArgs st;
  DemoArgs demo;

  auto* f = app.add_subcommand("filter", "Rank genes by MRMR and write the top m");
  add_common(f, common);
  add_filter(f, filter);

  auto* c = app.add_subcommand("cv", "Stratified cross-validation of one classifier");
  add_common(c, common);
  add_data(c, cv.data);
  add_classifier(c, cv.clf);
  c->add_option("--folds", cv.folds, "Number of folds")->check(CLI::Range(2, 1 << 20));

  const auto tags = transfer_tags();
  auto* s = app.add_subcommand("select", "Run the MRMR + binary herd gene selection");
  add_common(s, common);
  add_search(s, select);
  s->add_option("--tf", select.tf, "Transfer function: " + join(tags, ", "))
      ->check(CLI::IsMember(tags, CLI::ignore_case));

  auto* b = app.add_subcommand("tf-bench", "Compare transfer functions on one dataset");
  add_common(b, common);
  add_search(b, bench);
  b->add_option("--tfs", bench.tfs, "Transfer functions to compare")
      ->check(CLI::IsMember(tags, CLI::ignore_case))
      ->delimiter(',');

  auto* t = app.add_subcommand("stats", "Friedman test and pairwise post-hoc comparisons");
  add_common(t, common);
  t->add_option("--input", st.input, "CSV: rows = datasets, columns = algorithms [required]");
  t->add_flag("--pre-ranked", st.pre_ranked, "Input is one row of average ranks");
  t->add_flag("--lower-is-better", st.lower_is_better, "Smaller scores rank first");
  t->add_option("--datasets", st.datasets, "Dataset count behind pre-ranked input");
  t->add_option("--control", st.control, "Compare every algorithm against this one only");
  t->add_option("--alpha", st.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));

  auto* d = app.add_subcommand("demo-data", "Write a synthetic dataset with planted genes");
  add_common(d, common);
  d->add_option("--samples", demo.spec.n_samples, "Samples")->check(CLI::PositiveNumber);
  d->add_option("--informative", demo.spec.n_informative, "Informative genes");
  d->add_option("--noise", demo.spec.n_noise, "Noise genes");
  d->add_option("--classes", demo.spec.n_classes, "Classes")->check(CLI::Range(2, 1 << 20));
  d->add_option("--separation", demo.spec.separation, "Class mean spacing of informative genes");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  CLI::App* sub = nullptr;
  try {
    app.parse(reversed);
    sub = app.get_subcommands().front();
    if (!common.config.empty()) apply_config(sub, common.config);
    require_options(sub);
    apply_env_threads(sub, common);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (!app.get_subcommands().empty()) {
      err << "run 'herdselect " << app.get_subcommands().front()->get_name() << " --help' for usage\n";
    }
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (sub == f) cmd_filter(sub, common, filter, out);
    if (sub == c) cmd_cv(sub, common, cv, out);
    if (sub == s) cmd_select(sub, common, select, out, err);
    if (sub == b) cmd_tf_bench(sub, common, bench, out, err);
    if (sub == t) cmd_stats(sub, common, st, out);
    if (sub == d) cmd_demo_data(sub, common, demo, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace herdselect
