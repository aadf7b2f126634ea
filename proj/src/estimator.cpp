#include "verspace/estimator.hpp"

#include "verspace/special.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace verspace {

void ErrorCdf::validate() const {
    if (grid.size() != cdf.size()) throw std::logic_error("ErrorCdf: grid/cdf size mismatch");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid[k] < 0.0 || grid[k] > 1.0) throw std::logic_error("ErrorCdf: grid outside [0, 1]");
        if (cdf[k] < 0.0 || cdf[k] > 1.0) throw std::logic_error("ErrorCdf: cdf outside [0, 1]");
        if (k > 0 && !(grid[k] > grid[k - 1])) throw std::logic_error("ErrorCdf: grid not increasing");
        if (k > 0 && cdf[k] < cdf[k - 1]) throw std::logic_error("ErrorCdf: cdf decreasing");
    }
}

double ErrorCdf::at(double eps) const {
    auto it = std::upper_bound(grid.begin(), grid.end(), eps);
    if (it == grid.begin()) return 0.0;
    return cdf[static_cast<std::size_t>(it - grid.begin()) - 1];
}

std::vector<double> uniform_grid(std::size_t points) {
    if (points < 2) throw std::invalid_argument("uniform_grid: need at least 2 points");
    std::vector<double> g(points);
    for (std::size_t k = 0; k < points; ++k)
        g[k] = static_cast<double>(k) / static_cast<double>(points - 1);
    return g;
}

GaussianMixtureSpec GaussianMixtureSpec::isotropic(Eigen::Index dim, double snr) {
    return {isotropic_mixture_mean(dim, snr), Eigen::MatrixXd::Identity(dim, dim)};
}

double GaussianMixtureSpec::snr() const {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success || sigma.rows() != mu.size())
        throw std::invalid_argument("GaussianMixtureSpec: covariance must be positive definite");
    return std::sqrt(mu.dot(llt.solve(mu)));
}

double empirical_error(const Vector& w, const LabeledDataset& test, const FeatureMap& map) {
    if (test.size() == 0) throw std::invalid_argument("empirical_error: empty test set");
    const RowMatrix features = map.apply_rows(test.points);
    if (features.cols() != w.size()) throw std::invalid_argument("empirical_error: dimension mismatch");
    const Vector scores = features * w;
    std::size_t wrong = 0;
    for (Eigen::Index i = 0; i < scores.size(); ++i)
        if (test.labels[i] * scores[i] < 0.0) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(test.size());
}

std::vector<double> empirical_errors(const RowMatrix& samples, const RowMatrix& test_features,
                                     const Eigen::VectorXi& test_labels) {
    const Eigen::Index m = test_features.rows();
    if (m == 0) throw std::invalid_argument("empirical_errors: empty test set");
    if (samples.cols() != test_features.cols())
        throw std::invalid_argument("empirical_errors: dimension mismatch");

    // Signed test rows, so that an error is a negative entry of S * W'.
    RowMatrix signed_test = test_features;
    for (Eigen::Index i = 0; i < m; ++i) signed_test.row(i) *= test_labels[i];

    std::vector<double> errors(static_cast<std::size_t>(samples.rows()));
    constexpr Eigen::Index block = 256;
    for (Eigen::Index start = 0; start < samples.rows(); start += block) {
        const Eigen::Index rows = std::min(block, samples.rows() - start);
        const Eigen::MatrixXd margins = samples.middleRows(start, rows) * signed_test.transpose();
        for (Eigen::Index r = 0; r < rows; ++r) {
            const auto wrong = (margins.row(r).array() < 0.0).count();
            errors[static_cast<std::size_t>(start + r)] =
                static_cast<double>(wrong) / static_cast<double>(m);
        }
    }
    return errors;
}

double population_error_gaussian(const Vector& w, const GaussianMixtureSpec& spec) {
    if (w.size() != spec.mu.size()) throw std::invalid_argument("population_error: dimension mismatch");
    const double quad = w.dot(spec.sigma * w);
    if (!(quad > 0.0)) throw std::invalid_argument("population_error: zero weight vector");
    return std_normal_cdf(-w.dot(spec.mu) / std::sqrt(quad));
}

std::vector<double> population_errors_gaussian(const RowMatrix& samples,
                                               const GaussianMixtureSpec& spec) {
    std::vector<double> out(static_cast<std::size_t>(samples.rows()));
    for (Eigen::Index r = 0; r < samples.rows(); ++r)
        out[static_cast<std::size_t>(r)] = population_error_gaussian(samples.row(r).transpose(), spec);
    return out;
}

ErrorCdf error_cdf(std::span<const double> errors, std::span<const double> grid, std::size_t n_test) {
    if (errors.empty()) throw std::invalid_argument("error_cdf: empty error list");
    std::vector<double> sorted(errors.begin(), errors.end());
    std::sort(sorted.begin(), sorted.end());
    ErrorCdf out;
    out.grid.assign(grid.begin(), grid.end());
    out.cdf.reserve(grid.size());
    for (double eps : grid) {
        const auto count = std::upper_bound(sorted.begin(), sorted.end(), eps) - sorted.begin();
        out.cdf.push_back(static_cast<double>(count) / static_cast<double>(sorted.size()));
    }
    out.n_models = sorted.size();
    out.n_test = n_test;
    return out;
}

double bayes_lower_bound(const GaussianMixtureSpec& spec) {
    return std_normal_cdf(-spec.snr());
}

double error_quantile(std::span<const double> errors, double q) {
    if (errors.empty()) throw std::invalid_argument("error_quantile: empty error list");
    std::vector<double> s(errors.begin(), errors.end());
    std::sort(s.begin(), s.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double interdecile_width(std::span<const double> errors) {
    return error_quantile(errors, 0.9) - error_quantile(errors, 0.1);
}

double sup_distance(const ErrorCdf& a, const ErrorCdf& b) {
    if (a.grid != b.grid) throw std::invalid_argument("sup_distance: grids differ");
    double d = 0.0;
    for (std::size_t k = 0; k < a.cdf.size(); ++k) d = std::max(d, std::abs(a.cdf[k] - b.cdf[k]));
    return d;
}

// ---------------------------------------------------------------------------
// Worst-case construction

RowMatrix make_bad_points(const LabeledDataset& train, Eigen::Index n_bad, Rng& rng) {
    train.validate();
    if (train.size() == 0) throw std::invalid_argument("make_bad_points: empty training set");
    RowMatrix flipped = train.points;
    for (Eigen::Index i = 0; i < train.size(); ++i) flipped.row(i) *= -train.labels[i];
    const double target_norm = train.points.rowwise().norm().mean();

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RowMatrix bad(n_bad, train.dim());
    Eigen::RowVectorXd coeffs(train.size());
    for (Eigen::Index j = 0; j < n_bad; ++j) {
        for (Eigen::Index i = 0; i < train.size(); ++i) coeffs[i] = unit(rng);
        bad.row(j) = coeffs * flipped;
        const double norm = bad.row(j).norm();
        if (norm > 0.0) bad.row(j) *= target_norm / norm;
    }
    return bad;
}

namespace {

double largest_singular_value_squared(const RowMatrix& z) {
    Vector v = Vector::Ones(z.cols()) / std::sqrt(static_cast<double>(z.cols()));
    double lambda = 0.0;
    for (int it = 0; it < 100; ++it) {
        Vector next = z.transpose() * (z * v);
        const double norm = next.norm();
        if (norm == 0.0) return 0.0;
        v = next / norm;
        if (std::abs(norm - lambda) <= 1e-10 * norm) return norm;
        lambda = norm;
    }
    return lambda;
}

}  // namespace

Vector fit_logistic_gd(const RowMatrix& z, const LogisticOptions& opts, Rng& rng,
                       std::size_t* iterations, bool* converged, double* step_size) {
    if (z.rows() == 0) throw std::invalid_argument("fit_logistic_gd: no data");
    const double rows = static_cast<double>(z.rows());
    const double curvature = largest_singular_value_squared(z) / rows;
    const double step = curvature > 0.0 ? opts.step_scale / curvature : opts.step_scale;
    if (step_size) *step_size = step;

    std::normal_distribution<double> normal(0.0, opts.init_scale / std::sqrt(static_cast<double>(z.cols())));
    Vector w(z.cols());
    for (Eigen::Index j = 0; j < w.size(); ++j) w[j] = normal(rng);

    bool done = false;
    std::size_t it = 0;
    for (; it < opts.max_iterations; ++it) {
        const Vector margins = z * w;
        if (margins.minCoeff() > 0.0) {
            done = true;
            break;
        }
        // d/dw mean log(1 + exp(-m)) = -mean sigmoid(-m) z
        const Vector weights = (1.0 / (1.0 + margins.array().exp())).matrix();
        w += (step / rows) * (z.transpose() * weights);
    }
    if (!done && (z * w).minCoeff() > 0.0) done = true;
    if (iterations) *iterations = it;
    if (converged) *converged = done;
    return w;
}

WorstCaseResult worst_case_classifier(const LabeledDataset& train, Rng& rng,
                                      const WorstCaseOptions& opts) {
    train.validate();
    const Eigen::Index n = train.size();
    const Eigen::Index d = train.dim();
    Eigen::Index n_bad;
    if (opts.n_bad) {
        n_bad = *opts.n_bad;
    } else {
        if (n >= d)
            throw std::invalid_argument("worst_case_classifier: need n < dimension (n = " +
                                        std::to_string(n) + ", d = " + std::to_string(d) + ")");
        n_bad = (d - 1) - n;
    }
    if (n_bad < 0) throw std::invalid_argument("worst_case_classifier: negative bad-point count");

    RowMatrix bad = make_bad_points(train, n_bad, rng);
    RowMatrix z(n + n_bad, d);
    for (Eigen::Index i = 0; i < n; ++i) z.row(i) = train.points.row(i) * train.labels[i];
    z.bottomRows(n_bad) = bad;

    WorstCaseResult out;
    auto& diag = out.diagnostics;
    diag.n_bad = n_bad;
    out.w = fit_logistic_gd(z, opts.logistic, rng, &diag.iterations, &diag.converged, &diag.step_size);

    const Vector m = z * out.w;
    diag.train_accuracy = static_cast<double>((m.head(n).array() > 0.0).count()) / static_cast<double>(n);
    diag.bad_accuracy = n_bad == 0 ? 1.0
                                   : static_cast<double>((m.tail(n_bad).array() > 0.0).count()) /
                                         static_cast<double>(n_bad);
    diag.warning = diag.train_accuracy < 0.99;
    return out;
}

}  // namespace verspace
