#pragma once

namespace verspace {

/// Standard normal density.
double std_normal_pdf(double x);

/// Standard normal CDF, accurate to full relative precision in both tails
/// (computed from erfc, never as 1 - something).
double std_normal_cdf(double x);

/// log Phi(x), finite for all finite x (uses an asymptotic series below -37).
double std_normal_log_cdf(double x);

/// Inverse of Phi (Wichura's AS241, ~1e-16 relative). Throws std::domain_error
/// unless 0 < p < 1.
double std_normal_quantile(double p);

/// Regularized lower incomplete gamma P(shape, x) for shape > 0, x >= 0.
/// Series below x = shape + 1, Lentz continued fraction above.
double regularized_gamma_p(double shape, double x);

/// Complement Q(shape, x) = 1 - P(shape, x), without cancellation.
double regularized_gamma_q(double shape, double x);

}  // namespace verspace
