#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <sstream>

#include "herdselect/binarize.hpp"
#include "herdselect/cli.hpp"
#include "herdselect/dataset.hpp"
#include "herdselect/error.hpp"
#include "herdselect/filters.hpp"
#include "herdselect/hoa.hpp"
#include "herdselect/select.hpp"
#include "herdselect/stats.hpp"

namespace py = pybind11;
using namespace herdselect;

namespace {

Dataset from_arrays(py::array_t<double, py::array::c_style | py::array::forcecast> values,
                    py::array_t<int, py::array::c_style | py::array::forcecast> labels,
                    std::vector<std::string> gene_names, std::string name) {
  require(values.ndim() == 2, ErrorKind::BadShape, "values must be a 2-D array");
  require(labels.ndim() == 1, ErrorKind::BadShape, "labels must be a 1-D array");
  const auto rows = static_cast<std::size_t>(values.shape(0));
  const auto cols = static_cast<std::size_t>(values.shape(1));
  Dataset d;
  d.values = Matrix<double>(rows, cols);
  auto v = values.unchecked<2>();
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) d.values(r, c) = v(r, c);
  d.labels.assign(labels.data(), labels.data() + labels.size());
  if (gene_names.empty()) {
    for (std::size_t c = 0; c < cols; ++c) gene_names.push_back("g" + std::to_string(c));
  }
  d.gene_names = std::move(gene_names);
  const int top = d.labels.empty() ? -1 : *std::max_element(d.labels.begin(), d.labels.end());
  for (int k = 0; k <= top; ++k) d.class_names.push_back(std::to_string(k));
  d.name = std::move(name);
  d.validate();
  return d;
}

py::array_t<double> values_array(const Dataset& d) {
  py::array_t<double> out({d.n_samples(), d.n_genes()});
  auto o = out.mutable_unchecked<2>();
  for (std::size_t r = 0; r < d.n_samples(); ++r)
    for (std::size_t c = 0; c < d.n_genes(); ++c) o(r, c) = d.values(r, c);
  return out;
}

ClassifierSpec classifier_from(const std::string& kind, std::size_t k, double c) {
  switch (parse_classifier_kind(kind)) {
    case ClassifierKind::Knn: return ClassifierSpec::knn(k);
    case ClassifierKind::GaussianNb: return ClassifierSpec::gaussian_nb();
    case ClassifierKind::LinearSvm: break;
  }
  return ClassifierSpec::linear_svm(c);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of herdselect";
  m.attr("__version__") = version();

  static py::exception<Error> error_type(m, "HerdselectError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error_type(e.what());
    }
  });

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&from_arrays), py::arg("values"), py::arg("labels"),
           py::arg("gene_names") = std::vector<std::string>{}, py::arg("name") = "")
      .def_property_readonly("n_samples", &Dataset::n_samples)
      .def_property_readonly("n_genes", &Dataset::n_genes)
      .def_property_readonly("n_classes", &Dataset::n_classes)
      .def_property_readonly("values", &values_array)
      .def_readonly("labels", &Dataset::labels)
      .def_readonly("gene_names", &Dataset::gene_names)
      .def_readonly("name", &Dataset::name)
      .def("to_csv", [](const Dataset& d) { return to_csv(d); });

  m.def("load_csv", [](const std::string& path) { return load_csv(path); }, py::arg("path"));

  m.def(
      "make_synthetic",
      [](std::size_t n_samples, std::size_t n_informative, std::size_t n_noise, std::size_t n_classes,
         double separation, std::uint64_t seed) {
        auto s = make_synthetic({n_samples, n_informative, n_noise, n_classes, separation, seed});
        return py::make_tuple(std::move(s.data), s.ground_truth.indices());
      },
      py::arg("n_samples") = 100, py::arg("n_informative") = 5, py::arg("n_noise") = 45,
      py::arg("n_classes") = 2, py::arg("separation") = 3.0, py::arg("seed") = 1,
      "Planted-gene data; returns (dataset, informative column indices).");

  m.def("entropy", [](std::vector<int> x) { return entropy(x); }, py::arg("x"));
  m.def("mutual_information", [](std::vector<int> x, std::vector<int> y) { return mutual_information(x, y); },
        py::arg("x"), py::arg("y"));
  m.def(
      "mrmr_rank",
      [](const Dataset& d, std::size_t m_top, double t) {
        const auto disc = discretize(d, DiscretizePolicy::mean_sigma(t));
        return mrmr_select(disc, d.labels, m_top).order;
      },
      py::arg("dataset"), py::arg("m"), py::arg("t") = 0.5,
      "Column indices in greedy MRMR order after mean +/- t*sigma discretization.");

  m.def("tf_value", [](const std::string& tf, double v) { return tf_value(parse_transfer_function(tf), v); },
        py::arg("tf"), py::arg("v"));
  m.def(
      "x_shaped_pair",
      [](double v) {
        const auto p = x_shaped_pair(v);
        return py::make_tuple(p.w1, p.w2);
      },
      py::arg("v"));

  m.def("fitness_value", &fitness_value, py::arg("accuracy"), py::arg("selected"), py::arg("total"),
        py::arg("alpha") = 0.99);

  m.def(
      "friedman",
      [](std::vector<double> ranks, std::size_t n) {
        const auto r = stats::friedman_statistic(ranks, n);
        py::dict out;
        out["chi_square"] = r.chi_square;
        out["df"] = r.df;
        out["p_value"] = r.p_value;
        return out;
      },
      py::arg("avg_ranks"), py::arg("n"));
  m.def(
      "posthoc_vs_control",
      [](std::vector<double> ranks, std::size_t n, std::size_t control, double alpha) {
        py::list out;
        for (const auto& p : stats::posthoc_vs_control(ranks, n, control, alpha)) {
          py::dict row;
          row["first"] = p.first;
          row["second"] = p.second;
          row["z"] = p.z;
          row["p_value"] = p.p_value;
          row["rejected"] = p.rejected;
          out.append(row);
        }
        return out;
      },
      py::arg("avg_ranks"), py::arg("n"), py::arg("control"), py::arg("alpha") = 0.05);

  m.def(
      "optimize",
      [](const std::function<double(std::vector<double>)>& cost, std::size_t dim, double lower, double upper,
         std::size_t n_horses, std::size_t max_iter, std::uint64_t seed) {
        auto cfg = hoa::HoaConfig::box(dim, lower, upper);
        cfg.n_horses = n_horses;
        cfg.max_iter = max_iter;
        cfg.seed = seed;
        const auto r = hoa::optimize(
            [&](std::span<const double> x) { return cost(std::vector<double>(x.begin(), x.end())); }, cfg);
        return py::make_tuple(r.best_position, r.best_cost, r.trace);
      },
      py::arg("cost"), py::arg("dim"), py::arg("lower"), py::arg("upper"), py::arg("n_horses") = 35,
      py::arg("max_iter") = 500, py::arg("seed") = 0,
      "Continuous herd minimization in a box; returns (best_position, best_cost, trace).");

  m.def(
      "select_json",
      [](const Dataset& d, const std::string& tf, std::size_t horses, std::size_t iters, std::size_t top_m,
         std::size_t folds, std::size_t repeats, double alpha, const std::string& classifier, std::size_t knn_k,
         double svm_c, std::uint64_t seed, std::size_t threads) {
        SelectorConfig cfg;
        cfg.tf = parse_transfer_function(tf);
        cfg.n_horses = horses;
        cfg.max_iter = iters;
        cfg.mrmr_top_m = top_m;
        cfg.cv_folds = folds;
        cfg.repeats = repeats;
        cfg.alpha_w = alpha;
        cfg.classifier = classifier_from(classifier, knn_k, svm_c);
        cfg.seed = seed;
        cfg.threads = threads;
        SelectionResult res;
        {
          py::gil_scoped_release release;
          res = run_selection(d, cfg);
        }
        return result_to_json(res, ExportOptions{false});
      },
      py::arg("dataset"), py::arg("tf") = "x", py::arg("horses") = 35, py::arg("iters") = 60,
      py::arg("top_m") = 50, py::arg("folds") = 10, py::arg("repeats") = 20, py::arg("alpha") = 0.99,
      py::arg("classifier") = "svm", py::arg("knn_k") = 5, py::arg("svm_c") = 1.0, py::arg("seed") = 0,
      py::arg("threads") = 1);

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in process; returns (exit code, stdout, stderr).");
}
