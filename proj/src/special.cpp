#include "verspace/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace verspace {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Evaluates a polynomial with coefficients in increasing degree.
template <std::size_t N>
double poly(const double (&c)[N], double x) {
    double r = 0.0;
    for (std::size_t i = N; i-- > 0;) r = r * x + c[i];
    return r;
}

// Series / continued fraction for the incomplete gamma function. Both return the
// value without the prefactor x^a e^-x / Gamma(a), which the caller applies in log space.
double gamma_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 10000; ++k) {
        term *= x / (a + k);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) return sum;
    }
    throw std::runtime_error("regularized_gamma: series did not converge");
}

double gamma_continued_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) return h;
    }
    throw std::runtime_error("regularized_gamma: continued fraction did not converge");
}

double gamma_prefactor_log(double a, double x) {
    return a * std::log(x) - x - std::lgamma(a);
}

void check_gamma_args(double a, double x) {
    if (!(a > 0.0) || !std::isfinite(a)) throw std::domain_error("regularized_gamma: shape must be > 0");
    if (!(x >= 0.0)) throw std::domain_error("regularized_gamma: x must be >= 0");
}

}  // namespace

double std_normal_pdf(double x) {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x * kInvSqrt2);
}

double std_normal_log_cdf(double x) {
    if (x > 0.0) return std::log1p(-std_normal_cdf(-x));
    if (x > -37.0) return std::log(std_normal_cdf(x));
    // Mills ratio expansion: Phi(x) = phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...)
    const double z2 = 1.0 / (x * x);
    const double series = 1.0 - z2 * (1.0 - 3.0 * z2 * (1.0 - 5.0 * z2 * (1.0 - 7.0 * z2)));
    return -0.5 * x * x - kLogSqrt2Pi - std::log(-x) + std::log(series);
}

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("std_normal_quantile: p must lie in (0, 1)");

    // Wichura (1988), Algorithm AS 241, PPND16.
    static constexpr double a[] = {3.3871328727963666080e0, 1.3314166789178437745e+2,
                                   1.9715909503065514427e+3, 1.3731693765509461125e+4,
                                   4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                   3.3430575583588128105e+4, 2.5090809287301226727e+3};
    static constexpr double b[] = {1.0, 4.2313330701600911252e+1, 6.8718700749205790830e+2,
                                   5.3941960214247511077e+3, 2.1213794301586595867e+4,
                                   3.9307895800092710610e+4, 2.8729085735721942674e+4,
                                   5.2264952788528545610e+3};
    static constexpr double c[] = {1.42343711074968357734e0, 4.63033784615654529590e0,
                                   5.76949722146069140550e0, 3.64784832476320460504e0,
                                   1.27045825245236838258e0, 2.41780725177450611770e-1,
                                   2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static constexpr double d[] = {1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
                                   6.89767334985100004550e-1, 1.48103976427480074590e-1,
                                   1.51986665636164571966e-2, 5.47593808499534494600e-4,
                                   1.05075007164441684324e-9};
    static constexpr double e[] = {6.65790464350110377720e0, 5.46378491116411436990e0,
                                   1.78482653991729133580e0, 2.96560571828504891230e-1,
                                   2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                   2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static constexpr double f[] = {1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
                                   1.48753612908506148525e-2, 7.86869131145613259100e-4,
                                   1.84631831751005468180e-5, 1.42151175831644588870e-7,
                                   2.04426310338993978564e-15};

    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * poly(a, r) / poly(b, r);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = poly(c, r) / poly(d, r);
    } else {
        r -= 5.0;
        x = poly(e, r) / poly(f, r);
    }
    return q < 0.0 ? -x : x;
}

double regularized_gamma_p(double a, double x) {
    check_gamma_args(a, x);
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return std::exp(gamma_prefactor_log(a, x)) * gamma_series(a, x);
    return 1.0 - std::exp(gamma_prefactor_log(a, x)) * gamma_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
    check_gamma_args(a, x);
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - std::exp(gamma_prefactor_log(a, x)) * gamma_series(a, x);
    return std::exp(gamma_prefactor_log(a, x)) * gamma_continued_fraction(a, x);
}

}  // namespace verspace
