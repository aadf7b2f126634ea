#include "verspace/data.hpp"
#include "verspace/equicorr.hpp"
#include "verspace/estimator.hpp"
#include "verspace/experiment.hpp"
#include "verspace/features.hpp"
#include "verspace/sampler.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace verspace;

namespace {

py::tuple dataset_tuple(const LabeledDataset& d) { return py::make_tuple(d.points, d.labels); }

LabeledDataset make_dataset(const RowMatrix& points, const Eigen::VectorXi& labels) {
    LabeledDataset d{points, labels, std::nullopt};
    d.validate();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Version-space sampling and test-error distributions for interpolating linear classifiers";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def(
        "sample_version_space",
        [](const RowMatrix& constraints, std::size_t n_samples, std::size_t warmup, std::size_t thinning,
           std::uint64_t seed, std::size_t chains, std::size_t threads) {
            ChainConfig cfg{n_samples, warmup, thinning, seed};
            const ConstraintSet cs(constraints);
            py::gil_scoped_release release;
            return sample_version_space_chains(cs, cfg, chains, threads).samples;
        },
        py::arg("constraints"), py::arg("n_samples") = 1000, py::arg("warmup") = 1000, py::arg("thinning") = 10,
        py::arg("seed") = 0, py::arg("chains") = 4, py::arg("threads") = 1,
        "Samples N(0, I) restricted to {w : A w >= 0}; one sample per row.");

    m.def(
        "feasible_arc",
        [](const Eigen::VectorXd& state, const Eigen::VectorXd& direction, const RowMatrix& constraints) {
            const auto arcs = feasible_arcs(state, direction, ConstraintSet(constraints));
            std::vector<std::pair<double, double>> out;
            for (const auto& i : arcs.intervals) out.emplace_back(i.lo, i.hi);
            return out;
        },
        py::arg("state"), py::arg("direction"), py::arg("constraints"));

    m.def(
        "build_constraints",
        [](const RowMatrix& points, const Eigen::VectorXi& labels) {
            const auto d = make_dataset(points, labels);
            return RowMatrix(build_constraints(d, FeatureMap::linear(d.dim())).rows());
        },
        py::arg("points"), py::arg("labels"));

    m.def(
        "random_relu_features",
        [](const RowMatrix& points, std::int64_t n_features, std::uint64_t seed) {
            Rng rng(seed);
            const auto map = FeatureMap::random_relu(points.cols(), n_features, rng);
            return map.apply_rows(points);
        },
        py::arg("points"), py::arg("n_features"), py::arg("seed") = 0);

    m.def(
        "empirical_errors",
        [](const RowMatrix& samples, const RowMatrix& test_points, const Eigen::VectorXi& labels) {
            return empirical_errors(samples, test_points, labels);
        },
        py::arg("samples"), py::arg("test_points"), py::arg("labels"));

    m.def(
        "population_errors_gaussian",
        [](const RowMatrix& samples, const Eigen::VectorXd& mu) {
            GaussianMixtureSpec spec{mu, Eigen::MatrixXd::Identity(mu.size(), mu.size())};
            return population_errors_gaussian(samples, spec);
        },
        py::arg("samples"), py::arg("mu"), "Population errors for the mixture with identity covariance.");

    m.def(
        "error_cdf",
        [](const std::vector<double>& errors, std::size_t grid_points) {
            const auto cdf = error_cdf(errors, uniform_grid(grid_points));
            return py::make_tuple(cdf.grid, cdf.cdf);
        },
        py::arg("errors"), py::arg("grid_points") = 512);

    m.def(
        "sample_gaussian_mixture",
        [](Eigen::Index dim, double snr, Eigen::Index n, std::uint64_t seed) {
            Rng rng(seed);
            return dataset_tuple(sample_gaussian_mixture(dim, snr, n, rng));
        },
        py::arg("dim"), py::arg("snr"), py::arg("n"), py::arg("seed") = 0);

    m.def(
        "equicorr_dataset",
        [](Eigen::Index n, Eigen::Index m_test, double rho) {
            const auto d = equicorr_dataset(n, m_test, rho);
            return py::make_tuple(dataset_tuple(d.train), dataset_tuple(d.test));
        },
        py::arg("n"), py::arg("m"), py::arg("rho"));

    m.def("orthant_quadrature", [](std::int64_t n, double rho) { return orthant_quadrature({n, rho}); },
          py::arg("n"), py::arg("rho"));
    m.def("orthant_asymptotic", [](std::int64_t n, double rho) { return orthant_asymptotic({n, rho}); },
          py::arg("n"), py::arg("rho"));
    m.def("next_point_correct_asymptotic",
          [](std::int64_t n, double rho) { return next_point_correct_asymptotic({n, rho}); }, py::arg("n"),
          py::arg("rho"));
    m.def("next_point_correct_exact", [](std::int64_t n, double rho) { return next_point_correct_exact({n, rho}); },
          py::arg("n"), py::arg("rho"));
    m.def("limit_cdf", [](std::int64_t n, double rho, double eps) { return limit_cdf({n, rho}, eps); }, py::arg("n"),
          py::arg("rho"), py::arg("eps"));
    m.def("critical_value", [](std::int64_t n, double rho) { return critical_value({n, rho}); }, py::arg("n"),
          py::arg("rho"));
    m.def(
        "simulate_equicorr_rn",
        [](std::int64_t n, double rho, std::size_t draws, std::size_t grid_points, std::uint64_t seed) {
            Rng rng(seed);
            const auto cdf = simulate_equicorr_rn({n, rho}, draws, uniform_grid(grid_points), rng);
            return py::make_tuple(cdf.grid, cdf.cdf);
        },
        py::arg("n"), py::arg("rho"), py::arg("draws") = 100000, py::arg("grid_points") = 512, py::arg("seed") = 0);

    m.def(
        "worst_case_classifier",
        [](const RowMatrix& points, const Eigen::VectorXi& labels, std::uint64_t seed, std::size_t max_iterations) {
            Rng rng(seed);
            WorstCaseOptions opts;
            opts.logistic.max_iterations = max_iterations;
            const auto r = worst_case_classifier(make_dataset(points, labels), rng, opts);
            const auto& d = r.diagnostics;
            py::dict diag;
            diag["n_bad"] = d.n_bad;
            diag["train_accuracy"] = d.train_accuracy;
            diag["bad_accuracy"] = d.bad_accuracy;
            diag["iterations"] = d.iterations;
            diag["converged"] = d.converged;
            diag["warning"] = d.warning;
            return py::make_tuple(r.w, diag);
        },
        py::arg("points"), py::arg("labels"), py::arg("seed") = 0, py::arg("max_iterations") = 100000);

    m.def(
        "run_experiment",
        [](const std::string& task, const std::string& config_json, const std::filesystem::path& out_dir) {
            const auto cfg = ExperimentConfig::from_json(nlohmann::json::parse(config_json), task_from_string(task));
            RunRecord rec;
            {
                py::gil_scoped_release release;
                rec = run_experiment(cfg, out_dir);
            }
            return rec.to_json().dump();
        },
        py::arg("task"), py::arg("config_json") = "{}", py::arg("out_dir") = ".",
        "Runs a configured experiment; returns run.json as a string.");
}
