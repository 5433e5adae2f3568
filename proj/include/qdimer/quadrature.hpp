// quadrature.hpp: globally adaptive Gauss-Kronrod (7/15) integration
//
// The interval with the largest error estimate is bisected until the summed
// estimate drops below rel_tol * |I| (or abs_tol). The embedded error estimate
// is |K15 - G7| per interval, which is pessimistic for smooth integrands.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <queue>
#include <vector>

#include "qdimer/errors.hpp"

namespace qdimer::quad {

struct Options {
    double rel_tol{1e-10};
    double abs_tol{0.0};
    std::size_t max_intervals{2000};
};

struct Result {
    double value{0.0};
    double abs_error{0.0};
    std::size_t intervals{0};
    std::size_t evaluations{0};
};

namespace detail {

// Abscissae in decreasing order; odd indices are the 7-point Gauss nodes.
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename F>
Segment gauss_kronrod_15(const F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kronrod_weights[7];
    double gauss = fc * gauss_weights[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kronrod_weights[j] * sum;
        if (j % 2 == 1) gauss += gauss_weights[j / 2] * sum;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

} // namespace detail

// Integrates f over [a, b], starting from the given breakpoints (which must lie
// inside (a, b)). Throws ConvergenceError carrying the best estimate when the
// interval budget is exhausted.
template <typename F>
Result integrate(const F& f, double a, double b, std::initializer_list<double> breakpoints = {},
                 const Options& opts = {}) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidInput("integrate: non-finite limits");
    if (a == b) return {};
    const double sign = b > a ? 1.0 : -1.0;
    if (sign < 0) std::swap(a, b);

    std::vector<double> edges{a};
    for (double p : breakpoints)
        if (p > a && p < b) edges.push_back(p);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());

    std::priority_queue<detail::Segment> heap;
    Result r;
    double total = 0.0, error = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        auto s = detail::gauss_kronrod_15(f, edges[i], edges[i + 1]);
        total += s.value;
        error += s.error;
        heap.push(s);
        r.evaluations += 15;
    }

    auto converged = [&] { return error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
    while (!converged()) {
        if (heap.size() >= opts.max_intervals) {
            throw ConvergenceError("integrate: interval budget exhausted before reaching tolerance",
                                   sign * total, error);
        }
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw ConvergenceError("integrate: interval cannot be subdivided further", sign * total, error);
        }
        const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        r.evaluations += 30;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum from the segments to shed the drift of the running updates.
    double value = 0.0, err = 0.0;
    r.intervals = heap.size();
    while (!heap.empty()) {
        value += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    r.value = sign * value;
    r.abs_error = err;
    return r;
}

// Integrates f over [a, inf) through x = a + (1 - s)/s, s in (0, 1].
template <typename F>
Result integrate_to_infinity(const F& f, double a, const Options& opts = {}) {
    auto mapped = [&f, a](double s) {
        const double x = a + (1.0 - s) / s;
        return f(x) / (s * s);
    };
    return integrate(mapped, 0.0, 1.0, {}, opts);
}

} // namespace qdimer::quad
