#include "herdselect/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "herdselect/csv.hpp"
#include "herdselect/error.hpp"
#include "herdselect/rng.hpp"

namespace herdselect {

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(n_classes(), 0);
  for (int label : labels) {
    if (label >= 0 && static_cast<std::size_t>(label) < counts.size()) ++counts[label];
  }
  return counts;
}

void Dataset::validate() const {
  require(labels.size() == n_samples(), ErrorKind::LengthMismatch,
          "label count " + std::to_string(labels.size()) + " != sample count " +
              std::to_string(n_samples()));
  require(gene_names.size() == n_genes(), ErrorKind::BadShape, "gene name count mismatch");
  require(n_classes() >= 2, ErrorKind::SingleClass, "dataset has fewer than two classes");
  for (double v : values.data()) {
    require(std::isfinite(v), ErrorKind::NonNumericCell, "non-finite expression value");
  }
  for (int label : labels) {
    require(label >= 0 && static_cast<std::size_t>(label) < n_classes(), ErrorKind::BadShape,
            "label index out of range");
  }
  const auto counts = class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    require(counts[c] > 0, ErrorKind::SingleClass, "class '" + class_names[c] + "' has no samples");
  }
}

// ---------------------------------------------------------------------------
// Discretization

std::pair<std::vector<int>, int> discretize_column(std::span<const double> values,
                                                   const DiscretizePolicy& policy) {
  std::vector<int> levels(values.size(), 0);
  if (values.empty()) return {levels, 1};
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (lo == hi) return {levels, 1};

  if (policy.kind == DiscretizePolicy::Kind::EqualWidth) {
    require(policy.bins >= 2, ErrorKind::InvalidArgument, "equal_width needs at least 2 bins");
    const double width = (hi - lo) / policy.bins;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto bin = static_cast<int>(std::floor((values[i] - lo) / width));
      levels[i] = std::clamp(bin, 0, policy.bins - 1);
    }
    return {levels, policy.bins};
  }

  require(policy.t > 0.0, ErrorKind::InvalidArgument, "mean_sigma needs t > 0");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / n);
  const double below = mean - policy.t * sigma;
  const double above = mean + policy.t * sigma;
  for (std::size_t i = 0; i < values.size(); ++i) {
    levels[i] = values[i] < below ? 0 : (values[i] > above ? 2 : 1);
  }
  return {levels, 3};
}

DiscretizedDataset discretize(const Dataset& d, const DiscretizePolicy& policy) {
  DiscretizedDataset out;
  out.source_ref = d.name;
  out.columns.reserve(d.n_genes());
  out.n_levels_per_gene.reserve(d.n_genes());
  for (std::size_t j = 0; j < d.n_genes(); ++j) {
    const auto column = d.values.column(j);
    auto [levels, n_levels] = discretize_column(column, policy);
    out.columns.push_back(std::move(levels));
    out.n_levels_per_gene.push_back(n_levels);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Folds

FoldPlan stratified_k_fold(std::span<const int> labels, std::size_t n_classes, std::size_t k,
                           std::uint64_t seed) {
  require(k >= 2, ErrorKind::InvalidArgument, "k-fold needs k >= 2");
  std::vector<std::vector<std::size_t>> members(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] >= 0 && static_cast<std::size_t>(labels[i]) < n_classes,
            ErrorKind::BadShape, "label index out of range");
    members[labels[i]].push_back(i);
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    require(members[c].size() >= k, ErrorKind::ClassTooSmall,
            "class " + std::to_string(c) + " has " + std::to_string(members[c].size()) +
                " samples, fewer than k=" + std::to_string(k));
  }

  Rng rng(derive_seed(seed, {stream_label("folds")}));
  std::vector<std::vector<std::size_t>> test(k);
  std::size_t cursor = 0;
  for (auto& group : members) {
    rng.shuffle(std::span(group));
    for (std::size_t index : group) {
      test[cursor].push_back(index);
      cursor = (cursor + 1) % k;
    }
  }

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.resize(k);
  std::vector<char> in_test(labels.size());
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(test[f].begin(), test[f].end());
    std::fill(in_test.begin(), in_test.end(), 0);
    for (std::size_t i : test[f]) in_test[i] = 1;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!in_test[i]) plan.folds[f].train.push_back(i);
    }
    plan.folds[f].test = std::move(test[f]);
  }
  return plan;
}

FoldPlan stratified_k_fold(const Dataset& d, std::size_t k, std::uint64_t seed) {
  return stratified_k_fold(d.labels, d.n_classes(), k, seed);
}

// ---------------------------------------------------------------------------
// Masks and projections

GeneMask::GeneMask(std::vector<bool> bits)
    : bits_(std::move(bits)),
      selected_(static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true))) {}

GeneMask GeneMask::from_string(std::string_view text) {
  std::vector<bool> bits;
  bits.reserve(text.size());
  for (char c : text) {
    require(c == '0' || c == '1', ErrorKind::ParseError, "mask characters must be 0 or 1");
    bits.push_back(c == '1');
  }
  return GeneMask(std::move(bits));
}

void GeneMask::set(std::size_t i, bool value) {
  if (bits_[i] == value) return;
  bits_[i] = value;
  if (value) {
    ++selected_;
  } else {
    --selected_;
  }
}

std::vector<std::size_t> GeneMask::indices() const {
  std::vector<std::size_t> out;
  out.reserve(selected_);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out.push_back(i);
  }
  return out;
}

std::string GeneMask::to_string() const {
  std::string out(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out[i] = '1';
  }
  return out;
}

Dataset subset_columns(const Dataset& d, std::span<const std::size_t> columns) {
  require(!columns.empty(), ErrorKind::EmptyMask, "no genes selected");
  Dataset out;
  out.name = d.name;
  out.labels = d.labels;
  out.class_names = d.class_names;
  out.values = Matrix<double>(d.n_samples(), columns.size());
  out.gene_names.reserve(columns.size());
  for (std::size_t c : columns) {
    require(c < d.n_genes(), ErrorKind::BadShape, "column index out of range");
    out.gene_names.push_back(d.gene_names[c]);
  }
  for (std::size_t r = 0; r < d.n_samples(); ++r) {
    const auto src = d.values.row(r);
    auto dst = out.values.row(r);
    for (std::size_t j = 0; j < columns.size(); ++j) dst[j] = src[columns[j]];
  }
  return out;
}

Dataset subset(const Dataset& d, const GeneMask& mask) {
  require(mask.size() == d.n_genes(), ErrorKind::LengthMismatch,
          "mask length " + std::to_string(mask.size()) + " != gene count " +
              std::to_string(d.n_genes()));
  require(mask.selected_count() > 0, ErrorKind::EmptyMask, "no genes selected");
  const auto columns = mask.indices();
  return subset_columns(d, columns);
}

Dataset subset_rows(const Dataset& d, std::span<const std::size_t> rows) {
  Dataset out;
  out.name = d.name;
  out.gene_names = d.gene_names;
  out.class_names = d.class_names;
  out.values = Matrix<double>(rows.size(), d.n_genes());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = d.values.row(rows[i]);
    std::copy(src.begin(), src.end(), out.values.row(i).begin());
    out.labels.push_back(d.labels[rows[i]]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV I/O

Dataset parse_csv(std::string_view text, const CsvOptions& options, std::string name) {
  const auto table = csv::parse(text, options.delimiter);
  require(!table.header.empty() && !table.rows.empty(), ErrorKind::EmptyFile,
          "'" + name + "' has no data rows");
  const std::size_t width = table.header.size();
  require(width >= 2, ErrorKind::MalformedRow, "need at least one gene column and a label column");

  std::size_t label_col = width - 1;
  if (const auto* by_name = std::get_if<std::string>(&options.label_column)) {
    const auto it = std::find(table.header.begin(), table.header.end(), *by_name);
    require(it != table.header.end(), ErrorKind::InvalidArgument,
            "label column '" + *by_name + "' not found in header");
    label_col = static_cast<std::size_t>(it - table.header.begin());
  } else if (const auto* by_index = std::get_if<std::size_t>(&options.label_column)) {
    require(*by_index < width, ErrorKind::InvalidArgument,
            "label column index " + std::to_string(*by_index) + " out of range");
    label_col = *by_index;
  }

  Dataset d;
  d.name = std::move(name);
  for (std::size_t j = 0; j < width; ++j) {
    if (j != label_col) d.gene_names.push_back(table.header[j]);
  }
  d.values = Matrix<double>(table.rows.size(), width - 1);
  std::map<std::string, int> class_index;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto line = std::to_string(table.line_numbers[r]);
    require(row.size() == width, ErrorKind::MalformedRow,
            "line " + line + " has " + std::to_string(row.size()) + " cells, expected " +
                std::to_string(width));
    std::size_t out_col = 0;
    for (std::size_t j = 0; j < width; ++j) {
      if (j == label_col) continue;
      double value = 0.0;
      require(csv::parse_double(row[j], value), ErrorKind::NonNumericCell,
              "line " + line + ", column " + std::to_string(j + 1) + " ('" + table.header[j] +
                  "'): '" + row[j] + "' is not a finite number");
      d.values(r, out_col++) = value;
    }
    const auto& label = row[label_col];
    auto [it, inserted] = class_index.try_emplace(label, static_cast<int>(d.class_names.size()));
    if (inserted) d.class_names.push_back(label);
    d.labels.push_back(it->second);
  }
  require(d.class_names.size() >= 2, ErrorKind::SingleClass,
          "every label equals '" + d.class_names.front() + "'");
  d.validate();
  return d;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::IoError, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), options, path.stem().string());
}

std::string to_csv(const Dataset& d) {
  std::string out;
  for (const auto& g : d.gene_names) {
    out += csv::escape(g);
    out += ',';
  }
  out += "label\n";
  for (std::size_t r = 0; r < d.n_samples(); ++r) {
    for (double v : d.values.row(r)) {
      out += csv::format_double(v);
      out += ',';
    }
    out += csv::escape(d.class_names[d.labels[r]]);
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::IoError, "cannot write " + path.string());
  out << to_csv(d);
  require(static_cast<bool>(out), ErrorKind::IoError, "write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Synthetic data

SyntheticData make_synthetic(const SyntheticSpec& spec) {
  require(spec.n_samples > 0 && spec.n_informative > 0 && spec.n_noise > 0,
          ErrorKind::InvalidArgument, "synthetic counts must be positive");
  require(spec.n_classes >= 2, ErrorKind::InvalidArgument, "need at least two classes");
  require(spec.n_samples >= spec.n_classes, ErrorKind::InvalidArgument,
          "need at least one sample per class");
  require(spec.separation > 0.0 && std::isfinite(spec.separation), ErrorKind::InvalidArgument,
          "separation must be positive");

  const std::size_t n_genes = spec.n_informative + spec.n_noise;
  Rng layout(derive_seed(spec.seed, {stream_label("layout")}));
  Rng values(derive_seed(spec.seed, {stream_label("values")}));

  std::vector<int> labels(spec.n_samples);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % spec.n_classes);
  layout.shuffle(std::span(labels));

  std::vector<std::size_t> columns(n_genes);
  std::iota(columns.begin(), columns.end(), 0);
  layout.shuffle(std::span(columns));
  GeneMask truth(n_genes);
  for (std::size_t j = 0; j < spec.n_informative; ++j) truth.set(columns[j], true);

  SyntheticData out;
  auto& d = out.data;
  d.name = "synthetic";
  d.labels = labels;
  d.values = Matrix<double>(spec.n_samples, n_genes);
  for (std::size_t j = 0; j < n_genes; ++j) d.gene_names.push_back("g" + std::to_string(j));
  for (std::size_t c = 0; c < spec.n_classes; ++c) d.class_names.push_back("c" + std::to_string(c));
  for (std::size_t r = 0; r < spec.n_samples; ++r) {
    for (std::size_t j = 0; j < n_genes; ++j) {
      const double shift = truth.test(j) ? labels[r] * spec.separation : 0.0;
      d.values(r, j) = shift + values.normal();
    }
  }
  out.ground_truth = std::move(truth);
  d.validate();
  return out;
}

}  // namespace herdselect
