#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "marginforge/cglq.hpp"
#include "marginforge/dataset.hpp"
#include "marginforge/error.hpp"
#include "marginforge/local_sampling.hpp"
#include "marginforge/metrics.hpp"
#include "marginforge/model_io.hpp"
#include "marginforge/neighbors.hpp"
#include "marginforge/solver.hpp"
#include "marginforge/synthetic.hpp"
#include "marginforge/tuning.hpp"

namespace py = pybind11;
using namespace marginforge;

namespace {

SparseVector row_of(const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
  if (x.ndim() != 1) throw ConfigError("expected a 1-D feature vector");
  return SparseVector::from_dense({x.data(), static_cast<std::size_t>(x.shape(0))});
}

Dataset dataset_from_arrays(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& features,
    const py::array_t<double, py::array::c_style | py::array::forcecast>& labels) {
  if (features.ndim() != 2) throw ConfigError("features must be a 2-D array");
  if (labels.ndim() != 1 || labels.shape(0) != features.shape(0))
    throw ConfigError("labels must be 1-D with one entry per row");
  const auto n = static_cast<std::size_t>(features.shape(0));
  const auto d = static_cast<std::size_t>(features.shape(1));
  std::vector<SparseVector> samples;
  std::vector<Label> ys;
  samples.reserve(n);
  ys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    samples.push_back(SparseVector::from_dense({features.data() + i * d, d}));
    ys.push_back(labels.data()[i] > 0 ? Label{1} : Label{-1});
  }
  return Dataset(std::move(samples), std::move(ys));
}

py::array_t<double> dense_features(const Dataset& data) {
  const auto n = data.size();
  const auto d = static_cast<std::size_t>(data.dim());
  py::array_t<double> out({n, d});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) view(i, j) = 0.0;
    for (const Feature& f : data.sample(i).entries())
      view(i, static_cast<std::size_t>(f.index - 1)) = f.value;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Local sampling SVM and the CGLQ baseline on an SMO solver";
  m.attr("__version__") = MARGINFORGE_VERSION;

  auto base = py::register_exception<Error>(m, "MarginforgeError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<PipelineError>(m, "PipelineError", base);
  py::register_exception<ContractError>(m, "ContractError", base);
  py::register_exception<IoError>(m, "IoError", base);

  py::enum_<KernelFamily>(m, "KernelFamily")
      .value("LINEAR", KernelFamily::Linear)
      .value("POLYNOMIAL", KernelFamily::Polynomial)
      .value("RBF", KernelFamily::Rbf);
  py::enum_<Formulation>(m, "Formulation")
      .value("L1", Formulation::L1)
      .value("L2", Formulation::L2);

  py::class_<KernelSpec>(m, "KernelSpec")
      .def_static("linear", &KernelSpec::linear, py::arg("cost"),
                  py::arg("formulation") = Formulation::L1)
      .def_static("polynomial", &KernelSpec::polynomial, py::arg("gamma"),
                  py::arg("degree"), py::arg("cost"),
                  py::arg("formulation") = Formulation::L1)
      .def_static("rbf", &KernelSpec::rbf, py::arg("gamma"), py::arg("cost"),
                  py::arg("formulation") = Formulation::L1)
      .def_readwrite("family", &KernelSpec::family)
      .def_readwrite("gamma", &KernelSpec::gamma)
      .def_readwrite("degree", &KernelSpec::degree)
      .def_readwrite("cost", &KernelSpec::cost)
      .def_readwrite("formulation", &KernelSpec::formulation)
      .def("__eq__", [](const KernelSpec& a, const KernelSpec& b) { return a == b; })
      .def("__repr__", [](const KernelSpec& k) {
        return "KernelSpec(" + kernel_to_json(k).dump() + ")";
      });

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&dataset_from_arrays), py::arg("features"), py::arg("labels"),
           "Dense features (n x d) and labels (> 0 maps to +1, else -1).")
      .def_static("from_libsvm_text",
                  [](const std::string& text) { return parse_libsvm(std::string_view(text)); })
      .def_static("load", &load_libsvm, py::arg("path"))
      .def("save", [](const Dataset& d, const std::string& path) { save_libsvm(path, d); })
      .def("to_libsvm_text", &to_libsvm)
      .def("__len__", &Dataset::size)
      .def_property_readonly("dim", &Dataset::dim)
      .def_property_readonly("fingerprint", &Dataset::fingerprint)
      .def_property_readonly("labels", [](const Dataset& d) {
        return std::vector<int>(d.labels().begin(), d.labels().end());
      })
      .def("class_counts", [](const Dataset& d) { return d.class_counts(); })
      .def("features", &dense_features, "Dense copy of the features")
      .def("subset", [](const Dataset& d, const std::vector<std::size_t>& rows) {
        return d.subset(rows);
      });

  m.def("split", [](const Dataset& d, double test_fraction, std::uint64_t seed) {
        auto parts = split(d, test_fraction, seed);
        return py::make_tuple(parts.train, parts.test);
      }, py::arg("data"), py::arg("test_fraction"), py::arg("seed"));
  m.def("make_two_gaussians", &make_two_gaussians, py::arg("n"), py::arg("seed"),
        py::arg("separation") = 3.0, py::arg("dim") = 2);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("kkt_tol", &SolverConfig::kkt_tol)
      .def_readwrite("max_iterations", &SolverConfig::max_iterations)
      .def_readwrite("cache_mb", &SolverConfig::cache_mb)
      .def_readwrite("record_objective", &SolverConfig::record_objective);

  py::class_<SvmModel>(m, "SvmModel")
      .def_readonly("spec", &SvmModel::spec)
      .def_readonly("sv_indices", &SvmModel::sv_indices)
      .def_readonly("alphas", &SvmModel::alphas)
      .def_property_readonly("sv_labels", [](const SvmModel& s) {
        return std::vector<int>(s.sv_labels.begin(), s.sv_labels.end());
      })
      .def_readonly("bias", &SvmModel::bias)
      .def_readonly("degenerate", &SvmModel::degenerate)
      .def_readonly("unconverged", &SvmModel::unconverged)
      .def_property_readonly("num_sv", &SvmModel::num_sv)
      .def("sv_class_split", &SvmModel::sv_class_split)
      .def("decision_value", [](const SvmModel& s, const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
        return decision_value(s, row_of(x));
      })
      .def("predict", [](const SvmModel& s, const Dataset& d) {
        std::vector<int> out;
        out.reserve(d.size());
        for (const SparseVector& x : d.samples()) out.push_back(classify(s, x));
        return out;
      })
      .def("decision_values", [](const SvmModel& s, const Dataset& d) {
        std::vector<double> out;
        out.reserve(d.size());
        for (const SparseVector& x : d.samples()) out.push_back(decision_value(s, x));
        return out;
      })
      .def("to_json", [](const SvmModel& s) { return model_to_json(s).dump(); })
      .def_static("from_json", [](const std::string& text) {
        return model_from_json(nlohmann::json::parse(text));
      })
      .def("save", [](const SvmModel& s, const std::string& path) { save_model(path, s); })
      .def_static("load", &load_model);

  py::class_<SolveStats>(m, "SolveStats")
      .def_readonly("iterations", &SolveStats::iterations)
      .def_readonly("max_violation", &SolveStats::max_violation)
      .def_readonly("dual_objective", &SolveStats::dual_objective)
      .def_readonly("objective_trace", &SolveStats::objective_trace);
  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("model", &SolveResult::model)
      .def_readonly("alphas", &SolveResult::alphas)
      .def_readonly("stats", &SolveResult::stats);

  m.def("solve", [](const Dataset& d, const KernelSpec& spec, const SolverConfig& cfg) {
        py::gil_scoped_release release;
        return solve(d, spec, cfg);
      }, py::arg("data"), py::arg("kernel"), py::arg("solver") = SolverConfig{});
  m.def("error_rate", &error_rate, py::arg("model"), py::arg("test"));
  m.def("indecision_probability", &indecision_probability, py::arg("model"),
        py::arg("points"), py::arg("eps"));
  m.def("scale_model", &scale_model, py::arg("model"), py::arg("factor"));
  m.def("error_ratio", &error_ratio);
  m.def("sv_overlap", [](const SvmModel& sub, const SvmModel& full) {
    const SvOverlap o = sv_overlap(sub, full);
    return py::make_tuple(o.sv_real, o.pct_full_sv);
  });

  m.def("sampling_weights", [](const std::vector<double>& radii) {
    return sampling_weights(radii);
  });
  m.def("kth_nn_distances", [](const Dataset& d, std::size_t k) {
    NeighborIndex index(d, full_view(d.size()));
    std::vector<double> out(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) out[i] = index.kth_nn_distance(i, k);
    return out;
  }, py::arg("data"), py::arg("k"), "Distance from every row to its k-th nearest other row.");

  py::class_<LocalSamplingConfig>(m, "LocalSamplingConfig")
      .def(py::init<>())
      .def_readwrite("delta", &LocalSamplingConfig::delta)
      .def_readwrite("bags", &LocalSamplingConfig::bags)
      .def_readwrite("beta", &LocalSamplingConfig::beta)
      .def_readwrite("seed", &LocalSamplingConfig::seed)
      .def_readwrite("kernel", &LocalSamplingConfig::kernel)
      .def_readwrite("solver", &LocalSamplingConfig::solver)
      .def_readwrite("threads", &LocalSamplingConfig::threads);

  py::class_<LocalSamplingResult>(m, "LocalSamplingResult")
      .def_readonly("model", &LocalSamplingResult::model)
      .def_readonly("sv_initial", &LocalSamplingResult::sv_initial)
      .def_property_readonly("training_set", [](const LocalSamplingResult& r) {
        return r.trace.training_set;
      })
      .def_property_readonly("weights", [](const LocalSamplingResult& r) { return r.trace.weights; })
      .def_property_readonly("radius", [](const LocalSamplingResult& r) { return r.trace.radius; })
      .def_property_readonly("seconds", [](const LocalSamplingResult& r) { return r.timing.total(); });

  m.def("local_sampling_svm", [](const Dataset& d, const LocalSamplingConfig& cfg) {
    py::gil_scoped_release release;
    return local_sampling_svm(d, cfg);
  }, py::arg("train"), py::arg("config"));

  py::class_<BetaSchedule>(m, "BetaSchedule")
      .def(py::init<>())
      .def(py::init([](double start, double step, double max) {
             return BetaSchedule{start, step, max};
           }), py::arg("start"), py::arg("step"), py::arg("max"))
      .def("values", &BetaSchedule::values);
  py::class_<BetaSweepResult>(m, "BetaSweepResult")
      .def_readonly("best", &BetaSweepResult::best)
      .def_readonly("beta_final", &BetaSweepResult::beta_final)
      .def_readonly("betas", &BetaSweepResult::betas)
      .def_readonly("errors", &BetaSweepResult::errors)
      .def_readonly("capped", &BetaSweepResult::capped)
      .def_readonly("total_seconds", &BetaSweepResult::total_seconds);
  m.def("beta_sweep", [](const Dataset& train, const Dataset& validation,
                         const LocalSamplingConfig& cfg, const BetaSchedule& schedule) {
    py::gil_scoped_release release;
    return beta_sweep(train, validation, cfg, schedule);
  }, py::arg("train"), py::arg("validation"), py::arg("config"),
     py::arg("schedule") = BetaSchedule{});

  py::class_<CglqConfig>(m, "CglqConfig")
      .def(py::init<>())
      .def_readwrite("delta", &CglqConfig::delta)
      .def_readwrite("neighbors", &CglqConfig::neighbors)
      .def_readwrite("eps_stop", &CglqConfig::eps_stop)
      .def_readwrite("max_rounds", &CglqConfig::max_rounds)
      .def_readwrite("seed", &CglqConfig::seed)
      .def_readwrite("kernel", &CglqConfig::kernel)
      .def_readwrite("solver", &CglqConfig::solver);
  py::class_<CglqResult>(m, "CglqResult")
      .def_readonly("model", &CglqResult::model)
      .def_readonly("best_round", &CglqResult::best_round)
      .def_readonly("sv_initial", &CglqResult::sv_initial)
      .def_readonly("total_seconds", &CglqResult::total_seconds)
      .def_readonly("warnings", &CglqResult::warnings)
      .def_property_readonly("validation_errors", [](const CglqResult& r) {
        std::vector<double> out;
        for (const CglqRound& round : r.rounds) out.push_back(round.validation_error);
        return out;
      })
      .def_property_readonly("enrichment_rounds", &CglqResult::enrichment_rounds);
  m.def("cglq", [](const Dataset& train, const CglqConfig& cfg, const Dataset& validation) {
    py::gil_scoped_release release;
    return cglq(train, cfg, validation);
  }, py::arg("train"), py::arg("config"), py::arg("validation"));

  py::class_<ParamGrid>(m, "ParamGrid")
      .def(py::init<>())
      .def_readwrite("costs", &ParamGrid::costs)
      .def_readwrite("gammas", &ParamGrid::gammas)
      .def_readwrite("degrees", &ParamGrid::degrees);
  py::class_<CvResult>(m, "CvResult")
      .def_readonly("best", &CvResult::best)
      .def_readonly("best_error", &CvResult::best_error)
      .def_readonly("sample_size", &CvResult::sample_size);
  m.def("grid_search_cv", [](const Dataset& train, double fraction, const ParamGrid& grid,
                             KernelFamily family, Formulation formulation,
                             std::size_t folds, std::uint64_t seed) {
    py::gil_scoped_release release;
    return grid_search_cv(train, fraction, grid, family, formulation, folds, seed);
  }, py::arg("train"), py::arg("sample_fraction"), py::arg("grid"), py::arg("family"),
     py::arg("formulation") = Formulation::L1, py::arg("folds") = 10, py::arg("seed") = 0);
}
