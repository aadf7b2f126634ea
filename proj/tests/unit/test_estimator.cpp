#include "verspace/estimator.hpp"
#include "verspace/features.hpp"
#include "verspace/special.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace verspace;

namespace {

LabeledDataset three_points() {
    LabeledDataset d;
    d.points = RowMatrix(3, 2);
    d.points << 1, 0, 0, 1, -1, -1;
    d.labels = Eigen::Vector3i(1, 1, 1);
    return d;
}

}  // namespace

TEST_CASE("empirical error counts sign disagreements, ties count as correct") {
    const auto d = three_points();
    const auto lin = FeatureMap::linear(2);
    Vector w(2);
    w << 1, 1;
    CHECK(empirical_error(w, d, lin) == doctest::Approx(1.0 / 3.0));
    w << 1, 0;  // second point scores exactly 0
    CHECK(empirical_error(w, d, lin) == doctest::Approx(1.0 / 3.0));
    CHECK(empirical_error(Vector(-w), d, lin) == doctest::Approx(1.0 / 3.0));
    auto all_right = d;
    all_right.labels << 1, 1, -1;
    w << 1, 1;
    CHECK(empirical_error(w, all_right, lin) == 0.0);
}

TEST_CASE("property: batched errors equal per-sample errors; w and -w sum to 1 off ties") {
    Rng rng(3);
    std::normal_distribution<double> g;
    RowMatrix test(300, 5), samples(600, 5);
    for (auto* m : {&test, &samples})
        for (Eigen::Index i = 0; i < m->rows(); ++i)
            for (Eigen::Index j = 0; j < 5; ++j) (*m)(i, j) = g(rng);
    Eigen::VectorXi labels(300);
    for (auto& y : labels) y = g(rng) > 0 ? 1 : -1;
    LabeledDataset d{test, labels, std::nullopt};
    const auto batched = empirical_errors(samples, test, labels);
    const RowMatrix flipped = -samples;
    const auto negated = empirical_errors(flipped, test, labels);
    for (Eigen::Index r = 0; r < samples.rows(); ++r) {
        const Vector w = samples.row(r).transpose();
        REQUIRE(batched[static_cast<std::size_t>(r)] == empirical_error(w, d, FeatureMap::linear(5)));
        REQUIRE(batched[static_cast<std::size_t>(r)] + negated[static_cast<std::size_t>(r)] ==
                doctest::Approx(1.0));
    }
}

TEST_CASE("population error under the gaussian mixture") {
    const auto spec = GaussianMixtureSpec::isotropic(4, 2.0);
    CHECK(spec.snr() == doctest::Approx(2.0));
    CHECK(population_error_gaussian(spec.mu, spec) == doctest::Approx(0.0227501319481792));
    Vector orth(4);
    orth << 1, -1, 0, 0;
    CHECK(population_error_gaussian(orth, spec) == doctest::Approx(0.5));
    CHECK(population_error_gaussian(Vector(3.7 * spec.mu), spec) ==
          doctest::Approx(population_error_gaussian(spec.mu, spec)));
    CHECK_THROWS_AS(population_error_gaussian(Vector::Zero(4), spec), std::invalid_argument);
    CHECK(bayes_lower_bound(spec) == doctest::Approx(0.0227501319481792));
    CHECK(bayes_lower_bound(GaussianMixtureSpec::isotropic(4, 5.0)) == doctest::Approx(2.866515718791939e-07));

    // Sigma = sigma^2 I reduces to Phi(-|mu| / sigma).
    GaussianMixtureSpec scaled{spec.mu, 4.0 * Eigen::MatrixXd::Identity(4, 4)};
    CHECK(bayes_lower_bound(scaled) == doctest::Approx(std_normal_cdf(-1.0)));
    CHECK(population_error_gaussian(spec.mu, scaled) == doctest::Approx(std_normal_cdf(-1.0)));
}

TEST_CASE("population error matches Monte Carlo on the mixture") {
    Rng rng(12);
    const auto spec = GaussianMixtureSpec::isotropic(6, 1.0);
    Vector w(6);
    w << 1, 0.5, -0.2, 0, 2, -1;
    std::normal_distribution<double> g;
    std::bernoulli_distribution coin(0.5);
    const int trials = 400000;
    int wrong = 0;
    for (int t = 0; t < trials; ++t) {
        const int y = coin(rng) ? 1 : -1;
        Vector x(6);
        for (auto& v : x) v = g(rng);
        x += y * spec.mu;
        if (y * w.dot(x) < 0) ++wrong;
    }
    const double p = population_error_gaussian(w, spec);
    CHECK(std::abs(static_cast<double>(wrong) / trials - p) < 4.0 * std::sqrt(p * (1 - p) / trials));
}

TEST_CASE("error cdf counts errors at or below each grid point") {
    const std::vector<double> errs{0.1, 0.2, 0.3};
    const std::vector<double> grid{0.0, 0.05, 0.2, 0.25, 1.0};
    const auto cdf = error_cdf(errs, grid, 3);
    CHECK(cdf.cdf == std::vector<double>{0.0, 0.0, 2.0 / 3.0, 2.0 / 3.0, 1.0});
    CHECK_NOTHROW(cdf.validate());
    CHECK(cdf.at(0.2) == doctest::Approx(2.0 / 3.0));
    const auto g = uniform_grid();
    CHECK(g.size() == 512);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    CHECK_THROWS(error_cdf(std::vector<double>{}, grid));
}

TEST_CASE("quantiles and sup distance") {
    const std::vector<double> errs{0.4, 0.0, 0.1, 0.3, 0.2};
    CHECK(error_quantile(errs, 0.5) == doctest::Approx(0.2));
    CHECK(error_quantile(errs, 0.1) == doctest::Approx(0.04));
    CHECK(interdecile_width(errs) == doctest::Approx(0.32));
    const auto grid = uniform_grid(11);
    const auto a = error_cdf(errs, grid);
    const auto b = error_cdf(std::vector<double>{0.45}, grid);
    CHECK(sup_distance(a, b) == doctest::Approx(1.0));
    CHECK(sup_distance(a, a) == 0.0);
}

TEST_CASE("bad points are sign-flipped combinations at the mean training norm") {
    LabeledDataset train;
    train.points = RowMatrix(2, 3);
    train.points << 1, 0, 0, 0, 3, 0;
    train.labels = Eigen::Vector2i(1, -1);
    Rng rng(4);
    const auto bad = make_bad_points(train, 50, rng);
    for (Eigen::Index j = 0; j < bad.rows(); ++j) {
        CHECK(bad.row(j).norm() == doctest::Approx(2.0));
        CHECK(bad(j, 0) <= 0.0);   // -c * (+1) * e1
        CHECK(bad(j, 1) >= 0.0);   // -c * (-1) * 3 e2
        CHECK(bad(j, 2) == 0.0);
    }
}

TEST_CASE("worst case: one point and its mirror leave w orthogonal to it") {
    LabeledDataset train;
    train.points = RowMatrix(1, 2);
    train.points << 1.0, 0.0;
    train.labels = Eigen::VectorXi::Ones(1);
    Rng rng(6);
    WorstCaseOptions opts;
    opts.n_bad = 1;
    opts.logistic.max_iterations = 5000;
    const auto r = worst_case_classifier(train, rng, opts);
    CHECK(std::abs(r.w[0]) < 1e-6 * r.w.norm());
    CHECK_FALSE(r.diagnostics.converged);
    GaussianMixtureSpec along_x{Vector::Unit(2, 0) * 2.0, Eigen::MatrixXd::Identity(2, 2)};
    CHECK(population_error_gaussian(r.w, along_x) == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("worst case without bad points is a plain separating logistic fit") {
    Rng rng(7);
    std::normal_distribution<double> g;
    LabeledDataset train;
    train.points = RowMatrix(9, 10);
    train.labels.resize(9);
    for (Eigen::Index i = 0; i < 9; ++i) {
        for (Eigen::Index j = 0; j < 10; ++j) train.points(i, j) = g(rng);
        train.labels[i] = i % 2 ? 1 : -1;
    }
    const auto r = worst_case_classifier(train, rng);
    CHECK(r.diagnostics.n_bad == 0);
    CHECK(r.diagnostics.converged);
    CHECK(r.diagnostics.train_accuracy == 1.0);
    CHECK_FALSE(r.diagnostics.warning);
}

TEST_CASE("bad points oppose every interpolator of S_n") {
    // Every b_j is a negative combination of the y_i x_i, so no w can be positive on
    // both; GD therefore trades training accuracy against the bad points.
    Rng rng(8);
    std::normal_distribution<double> g;
    LabeledDataset train;
    train.points = RowMatrix(5, 20);
    train.labels.resize(5);
    for (Eigen::Index i = 0; i < 5; ++i) {
        for (Eigen::Index j = 0; j < 20; ++j) train.points(i, j) = g(rng);
        train.labels[i] = 1;
    }
    WorstCaseOptions opts;
    opts.logistic.max_iterations = 3000;
    const auto r = worst_case_classifier(train, rng, opts);
    CHECK(r.diagnostics.n_bad == 14);
    CHECK_FALSE(r.diagnostics.converged);
    CHECK(r.diagnostics.train_accuracy + r.diagnostics.bad_accuracy < 2.0);
}
