#pragma once

#include "verspace/core.hpp"
#include "verspace/data.hpp"
#include "verspace/features.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace verspace {

/// Estimated CDF of test errors over interpolating classifiers, on a fixed grid.
struct ErrorCdf {
    std::vector<double> grid;
    std::vector<double> cdf;
    std::size_t n_models = 0;
    /// Test points per error value; 0 when errors are population errors.
    std::size_t n_test = 0;

    /// Throws std::logic_error if the grid is not strictly increasing in [0, 1]
    /// or the cdf is not nondecreasing in [0, 1].
    void validate() const;

    /// Value at the largest grid point <= eps (0 below the grid).
    double at(double eps) const;
};

/// `points` equally spaced values covering [0, 1], endpoints included.
std::vector<double> uniform_grid(std::size_t points = 512);

/// Two-class Gaussian mixture with class means +-mu and shared covariance.
struct GaussianMixtureSpec {
    Vector mu;
    Eigen::MatrixXd sigma;

    /// mu = (snr/sqrt(d), ...), sigma = I.
    static GaussianMixtureSpec isotropic(Eigen::Index dim, double snr);

    /// sqrt(mu' Sigma^-1 mu). Throws std::invalid_argument if Sigma is not
    /// positive definite.
    double snr() const;
};

/// Fraction of test points with y w.phi(x) < 0. Zero scores count as correct.
double empirical_error(const Vector& w, const LabeledDataset& test, const FeatureMap& map);

/// Empirical error of every sample row against test points already in feature space.
std::vector<double> empirical_errors(const RowMatrix& samples, const RowMatrix& test_features,
                                     const Eigen::VectorXi& test_labels);

/// Phi(-w.mu / sqrt(w' Sigma w)). Throws std::invalid_argument for w = 0.
double population_error_gaussian(const Vector& w, const GaussianMixtureSpec& spec);

std::vector<double> population_errors_gaussian(const RowMatrix& samples,
                                               const GaussianMixtureSpec& spec);

/// cdf(eps) = fraction of errors <= eps. Throws std::invalid_argument on an empty list.
ErrorCdf error_cdf(std::span<const double> errors, std::span<const double> grid,
                   std::size_t n_test = 0);

/// Phi(-snr): the Bayes error, a floor for every linear classifier's population error.
double bayes_lower_bound(const GaussianMixtureSpec& spec);

/// Linear-interpolated empirical quantile (q in [0, 1]).
double error_quantile(std::span<const double> errors, double q);

/// 90th minus 10th percentile.
double interdecile_width(std::span<const double> errors);

/// max_k |a.cdf[k] - b.cdf[k]|; grids must match.
double sup_distance(const ErrorCdf& a, const ErrorCdf& b);

struct LogisticOptions {
    double step_scale = 0.1;
    std::size_t max_iterations = 100'000;
    /// Standard deviation of the random initial weights, relative to 1/sqrt(dim).
    double init_scale = 1e-2;
};

struct WorstCaseOptions {
    LogisticOptions logistic;
    /// Number of appended points; defaults to (dim - 1) - n.
    std::optional<Eigen::Index> n_bad;
};

struct WorstCaseDiagnostics {
    Eigen::Index n_bad = 0;
    /// Fraction of S_n with y w.x > 0.
    double train_accuracy = 0.0;
    /// Fraction of appended points with w.b > 0.
    double bad_accuracy = 0.0;
    std::size_t iterations = 0;
    /// All margins on S_n and the appended points became positive.
    bool converged = false;
    /// Training accuracy on S_n fell short of 99%.
    bool warning = false;
    double step_size = 0.0;
};

struct WorstCaseResult {
    Vector w;
    WorstCaseDiagnostics diagnostics;
};

/// Builds "bad" points b_j = -sum_i c_ji y_i x_i with c_ji ~ Uniform(0, 1), each
/// rescaled to the mean training-point norm. They are labeled +1.
RowMatrix make_bad_points(const LabeledDataset& train, Eigen::Index n_bad, Rng& rng);

/// Full-batch gradient descent on the mean logistic loss of the signed rows z_i
/// (loss log(1 + exp(-z_i.w))), stopping once every margin is positive.
/// Returns the weights; `iterations` and `converged` report progress.
Vector fit_logistic_gd(const RowMatrix& signed_rows, const LogisticOptions& opts, Rng& rng,
                       std::size_t* iterations = nullptr, bool* converged = nullptr,
                       double* step_size = nullptr);

/// Appends bad points to S_n (already in feature space) and fits a logistic
/// classifier on the union. A short fall on S_n is reported, not thrown.
WorstCaseResult worst_case_classifier(const LabeledDataset& train, Rng& rng,
                                      const WorstCaseOptions& opts = {});

}  // namespace verspace
