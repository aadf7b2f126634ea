#pragma once

#include "verspace/core.hpp"
#include "verspace/data.hpp"
#include "verspace/estimator.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace verspace {

/// n training points whose signed, unit-norm feature vectors all have pairwise
/// inner product rho (test points included).
///
/// Writing zeta_i = sqrt(1 - rho) Z_i + sqrt(rho) Z, everything below is a function
/// of a = sqrt(rho / (1 - rho)) and of the Gamma shape (1 - rho) / rho = 1 / a^2.
class EquicorrModel {
public:
    /// Throws std::invalid_argument unless 0 < rho < 1 and n >= 0.
    EquicorrModel(std::int64_t n, double rho);

    std::int64_t n() const noexcept { return n_; }
    double rho() const noexcept { return rho_; }
    double a() const noexcept { return a_; }
    double gamma_shape() const noexcept { return shape_; }

    EquicorrModel with_n(std::int64_t n) const { return {n, rho_}; }

private:
    std::int64_t n_;
    double rho_;
    double a_;
    double shape_;
};

/// log P(zeta_1 >= 0, ..., zeta_n >= 0) = log E[Phi(aZ)^n], by adaptive
/// Gauss-Kronrod over z in [-12, 12] with the integrand scaled by its peak.
double log_orthant_quadrature(const EquicorrModel& model);

/// exp of the above (may underflow to 0 for extreme n, rho).
double orthant_quadrature(const EquicorrModel& model);

/// sqrt((1-rho)/rho) Gamma((1-rho)/rho) (4 pi log n)^(((1-rho)/rho - 1)/2) n^(-(1-rho)/rho),
/// in log space. Requires n >= 2.
double log_orthant_asymptotic(const EquicorrModel& model);
double orthant_asymptotic(const EquicorrModel& model);

/// 1 - (1 - rho) / (n rho): large-n probability that an interpolator labels one
/// more equicorrelated point correctly.
double next_point_correct_asymptotic(const EquicorrModel& model);

/// The same probability computed exactly as P_{n+1} / P_n by quadrature.
double next_point_correct_exact(const EquicorrModel& model);

/// P(U <= n eps), U ~ Gamma((1 - rho) / rho, 1).
double limit_cdf(const EquicorrModel& model, double eps);

/// (1 - rho) / (n rho).
double critical_value(const EquicorrModel& model);

/// Finite-n population-error CDF E[1(1 - Phi(aZ) <= eps) Phi(aZ)^n] / E[Phi(aZ)^n],
/// by quadrature.
double exact_rn(const EquicorrModel& model, double eps);

/// Importance-sampling oracle for R_n: Z ~ N(0, 1), weight Phi(aZ)^n, error
/// 1 - Phi(aZ). Weights are normalized in log space; throws NumericalError if the
/// normalized weights are degenerate. `effective_draws`, if given, receives the
/// Kish effective sample size.
ErrorCdf simulate_equicorr_rn(const EquicorrModel& model, std::size_t n_draws,
                              std::span<const double> grid, Rng& rng,
                              double* effective_draws = nullptr);

/// Explicit data with the equicorrelated Gram structure: phi_i = sqrt(1-rho) e_i +
/// sqrt(rho) e_0 in dimension n + m + 1, all labels +1. The first n are training
/// points, the next m test points.
struct EquicorrData {
    LabeledDataset train;
    LabeledDataset test;
};
EquicorrData equicorr_dataset(Eigen::Index n, Eigen::Index m, double rho);

struct TheoryRow {
    std::int64_t n;
    double rho;
    double quadrature;
    double asymptotic;
    double ratio;  ///< asymptotic / quadrature
};

std::vector<TheoryRow> theory_table(std::span<const std::int64_t> ns, std::span<const double> rhos);

}  // namespace verspace
