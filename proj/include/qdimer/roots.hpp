// roots.hpp: safeguarded bracketing root finder (regula falsi + bisection)

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "qdimer/errors.hpp"

namespace qdimer::roots {

struct Options {
    double x_tol{1e-12}; // absolute bracket width at which to stop
    double f_tol{0.0};   // |f(x)| at which to stop
    std::size_t max_iterations{200};
};

struct Result {
    double x{0.0};
    double fx{0.0};
    double lo{0.0};
    double hi{0.0};
    std::size_t iterations{0};
};

// Finds a sign change of f inside [lo, hi]. A secant step through the bracket
// ends is taken when it lands inside and the bracket halved on the previous
// iteration; otherwise the bracket is bisected. Throws NoRootError (NoSignChange)
// when f(lo) and f(hi) share a sign.
template <typename F>
Result find_root(const F& f, double lo, double hi, const Options& opts = {}) {
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return {a, fa, a, a, 0};
    if (fb == 0.0) return {b, fb, b, b, 0};
    if (std::signbit(fa) == std::signbit(fb))
        throw NoRootError("find_root: no sign change on bracket", NoRootError::Side::NoSignChange, fa, fb);

    bool force_bisect = false;
    Result r;
    for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
        const double width = std::abs(b - a);
        double x = b - fb * (b - a) / (fb - fa);
        if (force_bisect || !(x > std::min(a, b) && x < std::max(a, b))) x = 0.5 * (a + b);
        const double fx = f(x);
        r.iterations = it;
        if (fx == 0.0) return {x, fx, x, x, it};
        if (std::signbit(fx) == std::signbit(fa)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        force_bisect = std::abs(b - a) > 0.5 * width;
        const bool small_f = std::abs(fx) <= opts.f_tol;
        if (std::abs(b - a) <= opts.x_tol || small_f) {
            const bool take_a = std::abs(fa) < std::abs(fb);
            r.x = small_f ? x : (take_a ? a : b);
            r.fx = small_f ? fx : (take_a ? fa : fb);
            r.lo = std::min(a, b);
            r.hi = std::max(a, b);
            return r;
        }
    }
    throw ConvergenceError("find_root: iteration budget exhausted", std::abs(fa) < std::abs(fb) ? a : b,
                           std::abs(b - a));
}

} // namespace qdimer::roots
