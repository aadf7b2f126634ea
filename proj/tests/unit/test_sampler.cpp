#include "verspace/sampler.hpp"

#include "stats.hpp"

#include <boost/math/distributions/normal.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <thread>

using namespace verspace;
using verspace::testing::ks_pvalue;
using verspace::testing::ks_statistic;

namespace {

const boost::math::normal_distribution<double> kNormal;

double normal_cdf(double x) { return boost::math::cdf(kNormal, x); }

// Random constraint set that `state` satisfies strictly.
ConstraintSet random_cone(const Vector& state, Eigen::Index n, Rng& rng) {
    std::normal_distribution<double> g;
    RowMatrix a(n, state.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < state.size(); ++j) a(i, j) = g(rng);
        if (a.row(i).dot(state) < 0) a.row(i) *= -1.0;
    }
    return ConstraintSet(a);
}

Vector gaussian_vector(Eigen::Index d, Rng& rng) {
    std::normal_distribution<double> g;
    Vector v(d);
    for (auto& x : v) x = g(rng);
    return v;
}

}  // namespace

static std::vector<double> col(const RowMatrix& m, Eigen::Index j) {
    std::vector<double> out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m(i, j);
    return out;
}

TEST_CASE("constraint set rejects zero rows and non-finite entries") {
    RowMatrix a = RowMatrix::Ones(2, 3);
    a.row(1).setZero();
    CHECK_THROWS_AS(ConstraintSet{a}, DataError);
    a.row(1).setOnes();
    a(0, 0) = std::nan("");
    CHECK_THROWS_AS(ConstraintSet{a}, DataError);
}

TEST_CASE("feasible arcs match a brute-force angle scan") {
    Rng rng(11);
    std::uniform_int_distribution<int> dims(2, 8), counts(1, 30);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index d = dims(rng);
        const Vector x = gaussian_vector(d, rng);
        const Vector nu = gaussian_vector(d, rng);
        const auto cs = random_cone(x, counts(rng), rng);
        const auto arcs = feasible_arcs(x, nu, cs);
        CHECK(arcs.contains(0.0));
        for (int k = 0; k < 10000; ++k) {
            const double theta = -std::numbers::pi + 2.0 * std::numbers::pi * (k + 0.5) / 10000.0;
            const Vector w = x * std::cos(theta) + nu * std::sin(theta);
            const Vector p = cs.products(w);
            const double margin = (p.array() / cs.row_norms().array()).minCoeff() / w.norm();
            if (std::abs(margin) < 1e-9) continue;  // boundary: either answer is fine
            if ((margin > 0) != arcs.contains(theta)) {
                FAIL("arc mismatch at trial " << trial << " theta " << theta);
            }
        }
    }
}

TEST_CASE("arc sampling is uniform by length and stays inside the set") {
    AngularIntervalSet s{{{-0.5, 0.25}}};
    CHECK(s.total_measure() == doctest::Approx(0.75));
    CHECK(s.sample(0.0) == doctest::Approx(-0.5));
    CHECK(s.sample(0.5) == doctest::Approx(-0.125));
    for (double u = 0.0; u < 1.0; u += 0.01) CHECK(s.contains(s.sample(u)));
}

TEST_CASE("infeasible arc input is a logic error") {
    Vector p(1), q(1), norms(1);
    p << -1.0;
    q << 0.0;
    norms << 1.0;
    CHECK_THROWS_AS(feasible_arcs_from_products(p, q, norms), std::logic_error);
}

TEST_CASE("unconstrained chain reproduces N(0, I)") {
    ChainConfig cfg;
    cfg.n_samples = 5000;
    cfg.seed = 3;
    Rng rng(cfg.seed);
    const auto chain = sample_version_space(ConstraintSet::unconstrained(3), cfg, rng);
    for (Eigen::Index j = 0; j < 3; ++j) {
        const auto xs = col(chain.samples, j);
        CHECK(ks_pvalue(ks_statistic(xs, normal_cdf), xs.size()) > 0.01);
    }
}

TEST_CASE("half-space in 2D: half-normal and normal marginals, exact feasibility") {
    RowMatrix a(1, 2);
    a << 1.0, 0.0;
    const ConstraintSet cs(a);
    ChainConfig cfg;
    cfg.n_samples = 10000;
    cfg.seed = 5;
    Rng rng(cfg.seed);
    const auto chain = sample_version_space(cs, cfg, rng);
    for (Eigen::Index i = 0; i < chain.samples.rows(); ++i) REQUIRE(chain.samples(i, 0) >= 0.0);
    const auto x0 = col(chain.samples, 0);
    const auto x1 = col(chain.samples, 1);
    const auto half = [](double x) { return x <= 0 ? 0.0 : 2.0 * normal_cdf(x) - 1.0; };
    CHECK(ks_pvalue(ks_statistic(x0, half), x0.size()) > 0.01);
    CHECK(ks_pvalue(ks_statistic(x1, normal_cdf), x1.size()) > 0.01);
}

TEST_CASE("wedge in 2D: direction angle is uniform on the wedge") {
    const double open = 1.0;
    RowMatrix a(2, 2);
    a << 0.0, 1.0,                            // angle >= 0
        std::sin(open), -std::cos(open);      // angle <= open
    ChainConfig cfg;
    cfg.n_samples = 5000;
    cfg.seed = 9;
    Rng rng(cfg.seed);
    const auto chain = sample_version_space(ConstraintSet(a), cfg, rng);
    std::vector<double> angles;
    for (Eigen::Index i = 0; i < chain.samples.rows(); ++i)
        angles.push_back(std::atan2(chain.samples(i, 1), chain.samples(i, 0)));
    const auto uniform = [open](double t) { return std::clamp(t / open, 0.0, 1.0); };
    CHECK(ks_pvalue(ks_statistic(angles, uniform), angles.size()) > 0.01);
}

TEST_CASE("property: random cones yield only feasible samples") {
    Rng rng(21);
    std::uniform_int_distribution<int> dims(2, 40);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index d = dims(rng);
        std::uniform_int_distribution<int> counts(1, static_cast<int>(d) - 1 + 5);
        const auto cs = random_cone(gaussian_vector(d, rng), counts(rng), rng);
        ChainConfig cfg;
        cfg.n_samples = 100;
        cfg.warmup = 50;
        cfg.thinning = 2;
        cfg.seed = static_cast<std::uint64_t>(trial);
        Rng chain_rng(cfg.seed);
        const auto chain = sample_version_space(cs, cfg, chain_rng);
        for (Eigen::Index i = 0; i < chain.samples.rows(); ++i)
            REQUIRE(cs.min_product(chain.samples.row(i).transpose()) >= 0.0);
    }
}

TEST_CASE("perceptron start is strictly feasible; contradictory constraints are infeasible") {
    Rng rng(1);
    const Vector x = gaussian_vector(10, rng);
    const auto cs = random_cone(x, 8, rng);
    const Vector w = initial_feasible_point(cs, rng);
    CHECK(cs.min_product(w) > 0.0);
    CHECK(w.norm() == doctest::Approx(std::sqrt(10.0)));

    RowMatrix bad(2, 3);
    bad << 1, 2, 3, -1, -2, -3;
    CHECK_THROWS_AS(initial_feasible_point(ConstraintSet(bad), rng, 10000), InfeasibleError);
}

TEST_CASE("chains are deterministic and independent of thread count") {
    Rng rng(2);
    const auto cs = random_cone(gaussian_vector(20, rng), 10, rng);
    ChainConfig cfg;
    cfg.n_samples = 203;
    cfg.warmup = 20;
    cfg.thinning = 3;
    cfg.seed = 42;
    std::vector<std::size_t> offsets;
    const auto one = sample_version_space_chains(cs, cfg, 4, 1, &offsets);
    const auto many = sample_version_space_chains(cs, cfg, 4, 3);
    const auto again = sample_version_space_chains(cs, cfg, 4, 1);
    CHECK(one.samples.rows() == 203);
    CHECK(one.samples == many.samples);
    CHECK(one.samples == again.samples);
    CHECK(offsets == std::vector<std::size_t>{0, 51, 102, 153});
    cfg.seed = 43;
    CHECK_FALSE(sample_version_space_chains(cs, cfg, 4, 1).samples == one.samples);
}

TEST_CASE("chain config validation") {
    ChainConfig cfg;
    cfg.thinning = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.thinning = 1;
    cfg.n_samples = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("chain length and step count follow warm-up and thinning") {
    RowMatrix a(1, 2);
    a << 1.0, 0.0;
    ChainConfig cfg;
    cfg.n_samples = 10000;
    Rng rng(0);
    const auto chain = sample_version_space(ConstraintSet(a), cfg, rng);
    CHECK(chain.samples.rows() == 10000);
    CHECK(chain.steps == 1000 + 10 * 10000);

    ChainConfig iid{100, 0, 1, 0};
    Rng r2(1);
    const auto free = sample_version_space(ConstraintSet::unconstrained(3), iid, r2);
    CHECK(free.samples.colwise().mean().cwiseAbs().maxCoeff() < 4.0 / std::sqrt(100.0));
}
