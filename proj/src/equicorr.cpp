#include "verspace/equicorr.hpp"

#include "verspace/quadrature.hpp"
#include "verspace/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace verspace {

namespace {

constexpr double kZMax = 12.0;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// log of the integrand Phi(az)^n phi(z).
double log_integrand(double z, double n, double a) {
    return n * std_normal_log_cdf(a * z) - 0.5 * z * z - kLogSqrt2Pi;
}

// The log integrand is concave; its derivative n a phi(az)/Phi(az) - z is decreasing.
double peak_location(double n, double a) {
    if (n == 0.0) return 0.0;
    auto slope = [&](double z) {
        const double inv_mills = std::exp(-0.5 * a * a * z * z - kLogSqrt2Pi - std_normal_log_cdf(a * z));
        return n * a * inv_mills - z;
    };
    double lo = -kZMax, hi = kZMax;
    if (slope(hi) >= 0.0) return hi;
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct ScaledIntegral {
    double log_scale;
    double value;  // integral of exp(log_integrand - log_scale)
};

// Integral of Phi(az)^n phi(z) over [from, kZMax], returned as log_scale + log(value).
ScaledIntegral scaled_integral(const EquicorrModel& m, double from) {
    const double n = static_cast<double>(m.n());
    const double a = m.a();
    const double peak = peak_location(n, a);
    const double log_scale = log_integrand(peak, n, a);
    if (from >= kZMax) return {log_scale, 0.0};

    // Curvature of the log integrand at its peak sets the breakpoint spacing.
    const double h = 1e-4;
    const double curv = (log_integrand(peak + h, n, a) - 2.0 * log_integrand(peak, n, a) +
                         log_integrand(peak - h, n, a)) / (h * h);
    const double width = curv < 0.0 ? 1.0 / std::sqrt(-curv) : 1.0;
    std::array<double, 9> cuts{};
    const double offsets[9] = {-16, -8, -4, -2, 0, 2, 4, 8, 16};
    for (int i = 0; i < 9; ++i) cuts[static_cast<std::size_t>(i)] = peak + offsets[i] * width;

    auto f = [&](double z) { return std::exp(log_integrand(z, n, a) - log_scale); };
    quad::Options opts;
    opts.rel_tol = 1e-13;
    opts.abs_tol = 1e-300;
    const auto r = quad::integrate(f, std::max(from, -kZMax), kZMax, cuts, opts);
    if (!r.converged)
        throw NumericalError("orthant quadrature did not converge (n = " + std::to_string(m.n()) +
                             ", rho = " + std::to_string(m.rho()) + ")");
    return {log_scale, r.value};
}

}  // namespace

EquicorrModel::EquicorrModel(std::int64_t n, double rho) : n_(n), rho_(rho) {
    if (n < 0) throw std::invalid_argument("EquicorrModel: n must be >= 0");
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("EquicorrModel: rho must lie in (0, 1)");
    a_ = std::sqrt(rho / (1.0 - rho));
    shape_ = (1.0 - rho) / rho;
}

double log_orthant_quadrature(const EquicorrModel& model) {
    if (model.n() == 0) return 0.0;
    const auto s = scaled_integral(model, -kZMax);
    return s.log_scale + std::log(s.value);
}

double orthant_quadrature(const EquicorrModel& model) {
    return std::exp(log_orthant_quadrature(model));
}

double log_orthant_asymptotic(const EquicorrModel& model) {
    if (model.n() < 2) throw std::invalid_argument("orthant_asymptotic: requires n >= 2");
    const double s = model.gamma_shape();
    const double n = static_cast<double>(model.n());
    return 0.5 * std::log(s) + std::lgamma(s) +
           0.5 * (s - 1.0) * std::log(4.0 * std::numbers::pi * std::log(n)) - s * std::log(n);
}

double orthant_asymptotic(const EquicorrModel& model) {
    return std::exp(log_orthant_asymptotic(model));
}

double next_point_correct_asymptotic(const EquicorrModel& model) {
    if (model.n() < 1) throw std::invalid_argument("next_point_correct_asymptotic: requires n >= 1");
    return 1.0 - critical_value(model);
}

double next_point_correct_exact(const EquicorrModel& model) {
    return std::exp(log_orthant_quadrature(model.with_n(model.n() + 1)) -
                    log_orthant_quadrature(model));
}

double limit_cdf(const EquicorrModel& model, double eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("limit_cdf: eps must be >= 0");
    return regularized_gamma_p(model.gamma_shape(), static_cast<double>(model.n()) * eps);
}

double critical_value(const EquicorrModel& model) {
    if (model.n() < 1) throw std::invalid_argument("critical_value: requires n >= 1");
    return (1.0 - model.rho()) / (static_cast<double>(model.n()) * model.rho());
}

double exact_rn(const EquicorrModel& model, double eps) {
    if (eps <= 0.0) return 0.0;
    if (eps >= 1.0) return 1.0;
    // 1 - Phi(az) <= eps  <=>  z >= -Phi^-1(eps) / a
    const double from = -std_normal_quantile(eps) / model.a();
    const auto total = scaled_integral(model, -kZMax);
    const auto part = scaled_integral(model, from);
    return std::clamp(part.value / total.value, 0.0, 1.0);
}

ErrorCdf simulate_equicorr_rn(const EquicorrModel& model, std::size_t n_draws,
                              std::span<const double> grid, Rng& rng, double* effective_draws) {
    if (n_draws == 0) throw std::invalid_argument("simulate_equicorr_rn: n_draws must be >= 1");
    const double n = static_cast<double>(model.n());
    const double a = model.a();

    std::normal_distribution<double> normal;
    std::vector<double> log_w(n_draws), err(n_draws);
    for (std::size_t k = 0; k < n_draws; ++k) {
        const double z = normal(rng);
        log_w[k] = n * std_normal_log_cdf(a * z);
        err[k] = std_normal_cdf(-a * z);
    }
    const double top = *std::max_element(log_w.begin(), log_w.end());
    if (!std::isfinite(top))
        throw NumericalError("simulate_equicorr_rn: all weights underflow; use more draws or smaller n");

    std::vector<std::size_t> order(n_draws);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return err[i] < err[j]; });

    double total = 0.0, total_sq = 0.0;
    std::vector<double> w(n_draws);
    for (std::size_t k = 0; k < n_draws; ++k) {
        w[k] = std::exp(log_w[k] - top);
        total += w[k];
        total_sq += w[k] * w[k];
    }
    if (!(total > 0.0) || !std::isfinite(total))
        throw NumericalError("simulate_equicorr_rn: degenerate importance weights");
    if (effective_draws) *effective_draws = total * total / total_sq;

    ErrorCdf out;
    out.grid.assign(grid.begin(), grid.end());
    out.cdf.reserve(grid.size());
    out.n_models = n_draws;
    std::size_t pos = 0;
    double acc = 0.0;
    for (double eps : grid) {
        while (pos < n_draws && err[order[pos]] <= eps) acc += w[order[pos++]];
        out.cdf.push_back(std::min(1.0, acc / total));
    }
    return out;
}

EquicorrData equicorr_dataset(Eigen::Index n, Eigen::Index m, double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("equicorr_dataset: rho must lie in (0, 1)");
    const Eigen::Index dim = n + m + 1;
    const double own = std::sqrt(1.0 - rho);
    const double shared = std::sqrt(rho);
    auto block = [&](Eigen::Index count, Eigen::Index first) {
        LabeledDataset d;
        d.points = RowMatrix::Zero(count, dim);
        d.labels = Eigen::VectorXi::Ones(count);
        for (Eigen::Index i = 0; i < count; ++i) {
            d.points(i, 0) = shared;
            d.points(i, first + i) = own;
        }
        return d;
    };
    return {block(n, 1), block(m, n + 1)};
}

std::vector<TheoryRow> theory_table(std::span<const std::int64_t> ns, std::span<const double> rhos) {
    std::vector<TheoryRow> rows;
    for (double rho : rhos) {
        for (auto n : ns) {
            const EquicorrModel model(n, rho);
            const double lq = log_orthant_quadrature(model);
            const double la = log_orthant_asymptotic(model);
            rows.push_back({n, rho, std::exp(lq), std::exp(la), std::exp(la - lq)});
        }
    }
    return rows;
}

}  // namespace verspace
