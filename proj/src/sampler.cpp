#include "verspace/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace verspace {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegenerateTol = 1e-12;
constexpr double kRoundingTol = 1e-10;
constexpr int kMaxGuardHalvings = 64;

Vector gaussian_vector(Eigen::Index dim, Rng& rng) {
    std::normal_distribution<double> normal;
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal(rng);
    return v;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// ConstraintSet

ConstraintSet::ConstraintSet(RowMatrix rows) : rows_(std::move(rows)) {
    if (!rows_.allFinite()) throw DataError("constraint matrix has non-finite entries");
    norms_ = rows_.rowwise().norm();
    for (Eigen::Index i = 0; i < norms_.size(); ++i) {
        if (norms_[i] == 0.0)
            throw DataError("constraint row " + std::to_string(i) +
                            " is all zero (feature vector vanishes; point is unclassifiable)");
    }
}

ConstraintSet ConstraintSet::unconstrained(Eigen::Index dim) {
    return ConstraintSet(RowMatrix(0, dim));
}

Vector ConstraintSet::products(const Vector& w) const {
    if (w.size() != dim()) throw std::invalid_argument("ConstraintSet: dimension mismatch");
    return rows_ * w;
}

bool ConstraintSet::feasible(const Vector& w) const {
    return size() == 0 || products(w).minCoeff() >= 0.0;
}

double ConstraintSet::min_product(const Vector& w) const {
    if (size() == 0) return std::numeric_limits<double>::infinity();
    return products(w).minCoeff();
}

void ChainConfig::validate() const {
    if (n_samples == 0) throw ConfigError("chain: n_samples must be positive");
    if (thinning == 0) throw ConfigError("chain: thinning must be >= 1");
}

// ---------------------------------------------------------------------------
// Angular intervals

double AngularIntervalSet::total_measure() const {
    double total = 0.0;
    for (const auto& iv : intervals) total += iv.hi - iv.lo;
    return total;
}

bool AngularIntervalSet::contains(double theta) const {
    // Bring theta into [-pi, pi].
    theta = std::remainder(theta, 2.0 * kPi);
    return std::any_of(intervals.begin(), intervals.end(),
                       [theta](const Interval& iv) { return theta >= iv.lo && theta <= iv.hi; });
}

double AngularIntervalSet::sample(double u) const {
    double target = u * total_measure();
    for (const auto& iv : intervals) {
        const double len = iv.hi - iv.lo;
        if (target < len) return iv.lo + target;
        target -= len;
    }
    return intervals.back().hi;
}

AngularIntervalSet feasible_arcs_from_products(const Vector& p, const Vector& q,
                                               const Vector& row_norms) {
    double lo = -kPi;
    double hi = kPi;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double r = std::hypot(p[i], q[i]);
        if (r < kDegenerateTol * row_norms[i]) continue;
        if (p[i] < 0.0) throw std::logic_error("feasible_arcs: current state violates a constraint");
        // p cos(t) + q sin(t) = r cos(t - phi) >= 0  <=>  |t - phi| <= pi/2
        const double phi = std::atan2(q[i], p[i]);
        lo = std::max(lo, phi - 0.5 * kPi);
        hi = std::min(hi, phi + 0.5 * kPi);
    }
    if (!(hi > lo)) throw std::logic_error("feasible_arcs: empty feasible set");
    return AngularIntervalSet{{{lo, hi}}};
}

AngularIntervalSet feasible_arcs(const Vector& state, const Vector& direction,
                                 const ConstraintSet& constraints) {
    if (direction.size() != state.size())
        throw std::invalid_argument("feasible_arcs: state/direction dimension mismatch");
    return feasible_arcs_from_products(constraints.products(state),
                                       constraints.products(direction),
                                       constraints.row_norms());
}

// ---------------------------------------------------------------------------
// Transitions

Vector elliptical_slice_step(const Vector& state, Vector& products,
                             const ConstraintSet& constraints, Rng& rng,
                             std::size_t* guard_hits) {
    const Vector nu = gaussian_vector(state.size(), rng);
    const Vector q = constraints.rows() * nu;
    const auto arcs = feasible_arcs_from_products(products, q, constraints.row_norms());

    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    double theta = arcs.sample(uniform(rng));

    for (int attempt = 0;; ++attempt) {
        Vector next = std::cos(theta) * state + std::sin(theta) * nu;
        Vector next_products = constraints.rows() * next;
        if (constraints.size() == 0 || next_products.minCoeff() >= 0.0) {
            products = std::move(next_products);
            return next;
        }
        const double scale = kRoundingTol * next.norm();
        for (Eigen::Index i = 0; i < next_products.size(); ++i) {
            if (next_products[i] < -scale * constraints.row_norms()[i])
                throw NumericalError("elliptical slice step: constraint " + std::to_string(i) +
                                     " violated by " + std::to_string(-next_products[i]) +
                                     ", beyond rounding tolerance");
        }
        if (attempt == kMaxGuardHalvings)
            throw NumericalError("elliptical slice step: rounding guard did not recover feasibility");
        if (guard_hits) ++*guard_hits;
        theta *= 0.5;
    }
}

Vector elliptical_slice_step(const Vector& state, const ConstraintSet& constraints, Rng& rng) {
    Vector products = constraints.products(state);
    return elliptical_slice_step(state, products, constraints, rng);
}

Vector initial_feasible_point(const ConstraintSet& constraints, Rng& rng,
                              std::size_t max_updates) {
    const Eigen::Index dim = constraints.dim();
    if (constraints.size() == 0) return gaussian_vector(dim, rng);

    const auto& A = constraints.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(A.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    Vector w = Vector::Zero(dim);
    std::size_t updates = 0;
    while (true) {
        std::shuffle(order.begin(), order.end(), rng);
        bool clean_pass = true;
        for (Eigen::Index i : order) {
            if (A.row(i).dot(w) > 0.0) continue;
            if (updates == max_updates)
                throw InfeasibleError("infeasible or not strictly separable: no strictly feasible "
                                      "point after " + std::to_string(max_updates) +
                                      " perceptron updates");
            w += A.row(i).transpose();
            ++updates;
            clean_pass = false;
        }
        if (!clean_pass) continue;
        Vector scaled = w * (std::sqrt(static_cast<double>(dim)) / w.norm());
        if ((A * scaled).minCoeff() > 0.0) return scaled;
        if ((A * w).minCoeff() > 0.0) return w;
    }
}

WeightChain sample_version_space(const ConstraintSet& constraints, const ChainConfig& config,
                                 Rng& rng) {
    config.validate();
    WeightChain chain;
    chain.config = config;
    chain.samples.resize(static_cast<Eigen::Index>(config.n_samples), constraints.dim());

    Vector state = initial_feasible_point(constraints, rng);
    Vector products = constraints.products(state);

    for (std::size_t i = 0; i < config.warmup; ++i) {
        state = elliptical_slice_step(state, products, constraints, rng, &chain.guard_corrections);
        ++chain.steps;
    }
    for (std::size_t s = 0; s < config.n_samples; ++s) {
        for (std::size_t t = 0; t < config.thinning; ++t) {
            state = elliptical_slice_step(state, products, constraints, rng,
                                          &chain.guard_corrections);
            ++chain.steps;
        }
        chain.samples.row(static_cast<Eigen::Index>(s)) = state.transpose();
    }
    return chain;
}

WeightChain sample_version_space_chains(const ConstraintSet& constraints,
                                        const ChainConfig& config, std::size_t n_chains,
                                        std::size_t threads,
                                        std::vector<std::size_t>* chain_offsets) {
    config.validate();
    if (n_chains == 0) throw ConfigError("chain: number of chains must be positive");
    threads = std::clamp<std::size_t>(threads, 1, n_chains);

    const std::size_t per_chain = (config.n_samples + n_chains - 1) / n_chains;
    std::vector<WeightChain> chains(n_chains);
    std::vector<std::exception_ptr> failures(n_chains);

    auto run = [&](std::size_t c) {
        try {
            ChainConfig cc = config;
            cc.n_samples = per_chain;
            cc.seed = derive_seed(config.seed, c);
            Rng rng(cc.seed);
            chains[c] = sample_version_space(constraints, cc, rng);
        } catch (...) {
            failures[c] = std::current_exception();
        }
    };

    // Chains are assigned round-robin; each owns its rng, so the result does not
    // depend on the thread count.
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t c = t; c < n_chains; c += threads) run(c);
        });
    }
    for (auto& th : pool) th.join();
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);

    WeightChain merged;
    merged.config = config;
    merged.samples.resize(static_cast<Eigen::Index>(config.n_samples), constraints.dim());
    if (chain_offsets) chain_offsets->clear();
    Eigen::Index row = 0;
    for (const auto& c : chains) {
        if (chain_offsets) chain_offsets->push_back(static_cast<std::size_t>(row));
        const Eigen::Index take = std::min<Eigen::Index>(c.samples.rows(), merged.samples.rows() - row);
        merged.samples.middleRows(row, take) = c.samples.topRows(take);
        row += take;
        merged.steps += c.steps;
        merged.guard_corrections += c.guard_corrections;
    }
    return merged;
}

}  // namespace verspace
