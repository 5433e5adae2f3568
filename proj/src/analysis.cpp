#include "qdimer/analysis.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "qdimer/errors.hpp"
#include "qdimer/golden.hpp"
#include "qdimer/roots.hpp"

namespace qdimer {

namespace {

// Quadrature tolerance for Phi inside the solvers; log V_r inherits its absolute error.
constexpr double solver_quad_tol = 1e-12;

BathParams at_temperature(BathParams bath, double T) {
    bath.temperature = T;
    return bath;
}

} // namespace

CriticalTemperatureResult critical_temperature(double delta_gamma, double V, const BathParams& bath,
                                               double T_lo, double T_hi, double tol,
                                               const UnitSystem& units) {
    if (!(delta_gamma > 0.0) || !std::isfinite(delta_gamma))
        throw DomainError("critical_temperature: dgamma must be > 0 (V_r(T) > 0 at every finite T, so "
                          "dgamma = 0 never reaches the exceptional point)");
    if (!(V > 0.0) || !std::isfinite(V)) throw DomainError("critical_temperature: V must be positive");
    if (!(T_lo >= 0.0 && T_hi > T_lo) || !std::isfinite(T_hi))
        throw InvalidInput("critical_temperature: bracket must satisfy 0 <= T_lo < T_hi");
    if (!(tol > 0.0 && tol < 1.0)) throw InvalidInput("critical_temperature: tol must lie in (0, 1)");
    validate_bath(at_temperature(bath, T_lo));

    // log(2 V_r(T)) - log(dgamma/2): decreasing in T, well scaled even when V_r underflows.
    const double log_target = std::log(delta_gamma / 2.0);
    const double log_two_v = std::log(2.0 * V);
    auto log_gap = [&](double T) {
        return log_two_v - fc_exponent(at_temperature(bath, T), solver_quad_tol, units).phi - log_target;
    };
    auto residual_of = [&](double g) { return delta_gamma / 2.0 * std::expm1(g); };

    const double g_lo = log_gap(T_lo);
    const double g_hi = log_gap(T_hi);
    if (g_lo <= 0.0) {
        throw NoRootError("critical_temperature: already incoherent at bracket start (2 V_r(T_lo) <= dgamma/2)",
                          NoRootError::Side::BelowBracket, residual_of(g_lo), residual_of(g_hi));
    }
    if (g_hi >= 0.0) {
        throw NoRootError("critical_temperature: no exceptional point in bracket (2 V_r(T_hi) >= dgamma/2)",
                          NoRootError::Side::AboveBracket, residual_of(g_lo), residual_of(g_hi));
    }

    roots::Options opts;
    opts.x_tol = 1e-12 * T_hi;
    opts.f_tol = 0.25 * tol;
    const auto root = roots::find_root(log_gap, T_lo, T_hi, opts);
    return {root.x, residual_of(root.fx), {root.lo, root.hi}, root.iterations};
}

double transfer_probability(const Dimer& p, double t, const UnitSystem& units) {
    const auto c = propagate_general(p, t, units);
    const double pll = std::norm(c(0)), plm = std::norm(c(1));
    const double total = pll + plm;
    return total > 0.0 ? plm / total : 0.0;
}

PassageTimeResult passage_time(const Dimer& p, double t_max, std::size_t grid_n, const UnitSystem& units,
                               double rel_tol) {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InvalidInput("passage_time: t_max must be positive");
    if (grid_n < 64) throw InvalidInput("passage_time: grid_n must be >= 64");

    PassageTimeResult result;
    result.search_window = {0.0, t_max};

    std::vector<double> pm(grid_n + 1);
    for (std::size_t i = 0; i <= grid_n; ++i) pm[i] = transfer_probability(p, t_max * double(i) / double(grid_n), units);

    const double noise = 64.0 * std::numeric_limits<double>::epsilon();
    std::size_t peak = 0;
    for (std::size_t i = 1; i < grid_n; ++i) {
        if (pm[i] >= pm[i - 1] && pm[i] - pm[i + 1] > noise * pm[i]) {
            peak = i;
            break;
        }
    }
    if (peak == 0) return result;

    // P_ll / P_lm is a strictly decreasing function of p_m with the same
    // maximizer, and it resolves the flat top of p_m to full precision.
    auto ratio = [&](double t) {
        const auto c = propagate_general(p, t, units);
        const double plm = std::norm(c(1));
        return plm > 0.0 ? std::norm(c(0)) / plm : std::numeric_limits<double>::infinity();
    };
    const double a = t_max * double(peak - 1) / double(grid_n);
    const double b = t_max * double(peak + 1) / double(grid_n);
    const auto best = golden::minimize(ratio, a, b, rel_tol);
    result.tau_p = best.x;
    result.p_m_at_tau = transfer_probability(p, best.x, units);
    return result;
}

CoherenceTimeResult coherence_time(const Dimer& p, double threshold, double t_max, const UnitSystem& units,
                                   double tol_ep) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidInput("coherence_time: threshold must lie in (0, 1)");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InvalidInput("coherence_time: t_max must be positive");
    const Regime regime = classify_regime(p, tol_ep);
    if (regime != Regime::Coherent)
        throw NotApplicable(std::string("coherence_time: defined only in the coherent regime, got ") +
                            to_string(regime));
    const double rabi = eigenvalues(p).rabi().real() * units.conv_cm1_to_radps;
    if (!(rabi > 0.0)) throw NotApplicable("coherence_time: no oscillation (zero Rabi frequency)");

    CoherenceTimeResult out;
    out.rabi_period = 2.0 * std::numbers::pi / rabi;

    constexpr double max_samples = double(1 << 21);
    double h = std::min(out.rabi_period, t_max) / 256.0;
    h = std::max(h, (t_max + out.rabi_period) / max_samples);
    const auto window = static_cast<std::size_t>(std::ceil(out.rabi_period / h));
    const auto starts = static_cast<std::size_t>(std::floor(t_max / h)) + 1;
    const std::size_t n = starts + window;

    std::vector<double> dp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto c = propagate_general(p, h * double(k), units);
        dp[k] = std::norm(c(0)) - std::norm(c(1));
    }

    // Sliding max/min over [k, k + window] with monotone deques.
    std::deque<std::size_t> hi, lo;
    std::size_t last_above = starts; // sentinel: never above threshold
    bool any_above = false;
    std::size_t next = 0;
    for (std::size_t start = 0; start < starts; ++start) {
        for (; next < n && next <= start + window; ++next) {
            while (!hi.empty() && dp[hi.back()] <= dp[next]) hi.pop_back();
            hi.push_back(next);
            while (!lo.empty() && dp[lo.back()] >= dp[next]) lo.pop_back();
            lo.push_back(next);
        }
        while (hi.front() < start) hi.pop_front();
        while (lo.front() < start) lo.pop_front();
        if (dp[hi.front()] - dp[lo.front()] >= threshold) {
            last_above = start;
            any_above = true;
        }
    }

    if (!any_above) {
        out.time = 0.0;
    } else if (last_above + 1 >= starts) {
        out.time = t_max;
        out.persists = true;
    } else {
        out.time = h * double(last_above + 1);
    }
    return out;
}

} // namespace qdimer
