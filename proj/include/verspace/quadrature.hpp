#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

namespace verspace::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

struct Options {
    double rel_tol = 1e-12;
    double abs_tol = 0.0;
    int max_subintervals = 4000;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 abscissae).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo, hi, value, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod15(const F& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * pair;
        if (j % 2 == 1) gauss += kWg[j / 2] * pair;
    }
    return {lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [lo, hi], with
/// optional interior breakpoints. Bisects the segment with the largest error
/// estimate until the summed estimate meets max(abs_tol, rel_tol * |value|).
template <class F>
Result integrate(const F& f, double lo, double hi, std::span<const double> breakpoints = {},
                 const Options& opts = {}) {
    if (!(hi > lo)) throw std::invalid_argument("quad::integrate: empty interval");

    std::vector<double> cuts{lo};
    for (double b : breakpoints)
        if (b > lo && b < hi) cuts.push_back(b);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<detail::Segment> heap;
    Result out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto s = detail::gauss_kronrod15(f, cuts[i], cuts[i + 1]);
        out.value += s.value;
        out.error += s.error;
        out.evaluations += 15;
        heap.push(s);
    }

    while (out.error > std::max(opts.abs_tol, opts.rel_tol * std::abs(out.value))) {
        if (static_cast<int>(heap.size()) >= opts.max_subintervals) return out;
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) return out;
        auto left = detail::gauss_kronrod15(f, worst.lo, mid);
        auto right = detail::gauss_kronrod15(f, mid, worst.hi);
        out.value += left.value + right.value - worst.value;
        out.error += left.error + right.error - worst.error;
        out.evaluations += 30;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift from incremental updates.
    out.value = 0.0;
    out.error = 0.0;
    while (!heap.empty()) {
        out.value += heap.top().value;
        out.error += heap.top().error;
        heap.pop();
    }
    out.converged = true;
    return out;
}

}  // namespace verspace::quad
