#include "verspace/special.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace verspace;

TEST_CASE("normal cdf and pdf agree with boost") {
    const boost::math::normal_distribution<double> nd;
    for (double x = -30.0; x <= 8.0; x += 0.37) {
        CHECK(std_normal_cdf(x) == doctest::Approx(boost::math::cdf(nd, x)).epsilon(1e-13));
        CHECK(std_normal_pdf(x) == doctest::Approx(boost::math::pdf(nd, x)).epsilon(1e-13));
    }
}

TEST_CASE("log cdf is accurate in both tails") {
    const boost::math::normal_distribution<double> nd;
    for (double x = -35.0; x <= 35.0; x += 0.5) {
        const double ref = x > 0 ? std::log1p(-boost::math::cdf(boost::math::complement(nd, x)))
                                 : std::log(boost::math::cdf(nd, x));
        CHECK(std_normal_log_cdf(x) == doctest::Approx(ref).epsilon(1e-12));
    }
    // Beyond double range for Phi itself: log Phi(x) ~ -x^2/2 - log(-x) - log sqrt(2 pi).
    for (double x : {-40.0, -100.0, -1e4}) {
        const double lead = -0.5 * x * x - std::log(-x) - 0.5 * std::log(2 * M_PI);
        CHECK(std_normal_log_cdf(x) == doctest::Approx(lead - std::log1p(1.0 / (x * x))).epsilon(1e-9));
    }
}

TEST_CASE("quantile inverts the cdf") {
    const boost::math::normal_distribution<double> nd;
    for (double p : {1e-300, 1e-20, 1e-8, 0.001, 0.1, 0.5, 0.7, 0.999, 1 - 1e-12}) {
        CHECK(std_normal_quantile(p) == doctest::Approx(boost::math::quantile(nd, p)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(std::nan("")), std::domain_error);
}

TEST_CASE("regularized gamma matches boost over a grid") {
    for (double a : {0.1, 0.25, 0.5, 1.0, 2.5, 7.0, 40.0}) {
        for (double x : {1e-6, 0.01, 0.3, 1.0, 2.0, 5.0, 20.0, 100.0}) {
            CHECK(regularized_gamma_p(a, x) == doctest::Approx(boost::math::gamma_p(a, x)).epsilon(1e-12));
            CHECK(regularized_gamma_q(a, x) == doctest::Approx(boost::math::gamma_q(a, x)).epsilon(1e-11));
        }
    }
    CHECK(regularized_gamma_p(1.0, 0.0) == 0.0);
}

TEST_CASE("property: P + Q = 1 and P is monotone in x") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(0.05, 20.0), ux(0.0, 40.0);
    for (int t = 0; t < 500; ++t) {
        const double a = ua(rng), x = ux(rng), dx = ux(rng) * 0.1;
        CHECK(regularized_gamma_p(a, x) + regularized_gamma_q(a, x) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(regularized_gamma_p(a, x + dx) >= regularized_gamma_p(a, x) - 1e-15);
    }
}
