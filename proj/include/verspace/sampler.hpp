#pragma once

#include "verspace/core.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace verspace {

/// The version-space cone {w : A w >= 0}. Row i of A is y_i * phi(x_i).
class ConstraintSet {
public:
    /// Throws DataError on non-finite entries or an all-zero row.
    explicit ConstraintSet(RowMatrix rows);

    /// Zero constraints in `dim` dimensions.
    static ConstraintSet unconstrained(Eigen::Index dim);

    const RowMatrix& rows() const noexcept { return rows_; }
    const Vector& row_norms() const noexcept { return norms_; }
    Eigen::Index size() const noexcept { return rows_.rows(); }
    Eigen::Index dim() const noexcept { return rows_.cols(); }

    /// A w.
    Vector products(const Vector& w) const;

    /// True iff (A w)_i >= 0 for every i, as evaluated by products().
    bool feasible(const Vector& w) const;

    /// min_i (A w)_i, or +inf with no constraints.
    double min_product(const Vector& w) const;

private:
    RowMatrix rows_;
    Vector norms_;
};

struct ChainConfig {
    std::size_t n_samples = 1000;
    std::size_t warmup = 1000;
    std::size_t thinning = 10;
    std::uint64_t seed = 0;

    /// Throws ConfigError on n_samples == 0 or thinning == 0.
    void validate() const;
};

/// Samples from the constrained Gaussian, one per row.
struct WeightChain {
    RowMatrix samples;
    ChainConfig config;
    /// Elliptical slice transitions performed, warm-up included.
    std::size_t steps = 0;
    /// Steps where the rounding guard had to pull theta toward the current state.
    std::size_t guard_corrections = 0;
};

/// A union of closed arcs on the circle, stored as signed angles in [-pi, pi].
/// The current state of the chain sits at theta = 0.
struct AngularIntervalSet {
    struct Interval {
        double lo;
        double hi;
    };

    std::vector<Interval> intervals;

    double total_measure() const;
    bool contains(double theta) const;

    /// Maps u in [0, 1) onto the set, uniformly by arc length.
    double sample(double u) const;
};

/// Angles theta for which A (state cos(theta) + direction sin(theta)) >= 0.
///
/// Constraint i contributes the half circle centred on atan2(a_i.direction, a_i.state);
/// constraints with sqrt((a_i.state)^2 + (a_i.direction)^2) < 1e-12 |a_i| are ignored.
/// Requires a feasible state, so every arc contains theta = 0 and the result is a
/// single interval (or the full circle). Throws std::logic_error if state is infeasible.
AngularIntervalSet feasible_arcs(const Vector& state, const Vector& direction,
                                 const ConstraintSet& constraints);

/// Same, from precomputed products p = A state and q = A direction.
AngularIntervalSet feasible_arcs_from_products(const Vector& p, const Vector& q,
                                               const Vector& row_norms);

/// One rejection-free elliptical slice transition. `products` must hold A*state on
/// entry and holds A*result on exit. `guard_hits`, when given, counts rounding repairs.
Vector elliptical_slice_step(const Vector& state, Vector& products,
                             const ConstraintSet& constraints, Rng& rng,
                             std::size_t* guard_hits = nullptr);

/// Convenience overload that recomputes A*state.
Vector elliptical_slice_step(const Vector& state, const ConstraintSet& constraints, Rng& rng);

/// Strictly feasible start via perceptron updates, rescaled to norm sqrt(dim).
/// Throws InfeasibleError after `max_updates` updates.
Vector initial_feasible_point(const ConstraintSet& constraints, Rng& rng,
                              std::size_t max_updates = 1'000'000);

/// warmup steps, then keeps every `thinning`-th state until n_samples are stored.
WeightChain sample_version_space(const ConstraintSet& constraints, const ChainConfig& config,
                                 Rng& rng);

/// Runs `n_chains` independent chains (seeds derived from config.seed) on up to
/// `threads` threads and concatenates them in chain order. Each chain stores
/// ceil(n_samples / n_chains) samples; the result is truncated to n_samples.
WeightChain sample_version_space_chains(const ConstraintSet& constraints,
                                        const ChainConfig& config, std::size_t n_chains,
                                        std::size_t threads = 1,
                                        std::vector<std::size_t>* chain_offsets = nullptr);

}  // namespace verspace
