// golden.hpp: golden-section search for a minimum of a unimodal function

#pragma once

#include <cmath>
#include <cstddef>

namespace qdimer::golden {

struct Result {
    double x{0.0};
    double fx{0.0};
    std::size_t iterations{0};
};

// Shrinks [a, b] by the golden ratio until its width is below rel_tol * |midpoint|
// (or abs_tol). f must be unimodal on [a, b]; only interior points are sampled.
template <typename F>
Result minimize(const F& f, double a, double b, double rel_tol = 1e-8, double abs_tol = 0.0,
                std::size_t max_iterations = 500) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    std::size_t it = 0;
    while (it < max_iterations) {
        const double mid = 0.5 * (a + b);
        if (std::abs(b - a) <= std::max(rel_tol * std::abs(mid), abs_tol)) break;
        ++it;
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x), it};
}

} // namespace qdimer::golden
