// acceptance.cpp: one PASS/FAIL line per acceptance criterion
//
//   acceptance        run all ten
//   acceptance 4      run criterion 4 only (ctest registers each separately)
//
// Exit status is non-zero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qdimer/analysis.hpp"
#include "qdimer/bath.hpp"
#include "qdimer/dynamics.hpp"
#include "qdimer/errors.hpp"
#include "qdimer/output.hpp"
#include "qdimer/quadrature.hpp"
#include "qdimer/roots.hpp"
#include "qdimer/sweep.hpp"

#ifndef QDIMER_PRESET_DIR
#define QDIMER_PRESET_DIR "presets"
#endif

using namespace qdimer;
using C = std::complex<double>;

namespace {

constexpr double conv = constants::cm1_to_radps;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string preset(const std::string& name) { return std::string(QDIMER_PRESET_DIR) + "/" + name + ".conf"; }

// 1. closed forms and eigendecomposition against the stepped RK4 oracle
Outcome oracle_equivalence() {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> u(0, 1);
    auto log_uniform = [&](double lo, double hi) { return std::exp(std::log(lo) + u(rng) * std::log(hi / lo)); };

    const int n = 1200;
    int regimes[3] = {0, 0, 0};
    double worst_amp = 0, worst_pop = 0;
    for (int k = 0; k < n; ++k) {
        Dimer p;
        switch (k % 3) {
        case 0: { // fully random, biased
            const double de = 500 * u(rng);
            p = {de / 2, -de / 2, log_uniform(1, 500), 100 * u(rng), 100 * u(rng)};
            break;
        }
        case 1: // degenerate
            p = {0, 0, log_uniform(1, 500), 100 * u(rng), 100 * u(rng)};
            break;
        default: { // exactly at the exceptional point: gamma_m - gamma_l = 4 V_r
            const double v = log_uniform(1, 25);
            const double gl = (100 - 4 * v) * u(rng);
            p = {0, 0, v, gl, gl + 4 * v};
        }
        }
        const double t = 5 * u(rng);
        regimes[int(classify_regime(p))]++;

        const auto ref = propagate_oracle(p, t, oracle_steps_for(p, t));
        const double scale = ref.norm() > 0 ? ref.norm() : 1.0;
        worst_amp = std::max(worst_amp, (propagate_general(p, t) - ref).cwiseAbs().maxCoeff() / scale);
        if (p.degenerate()) {
            const auto pop = populations_degenerate(p, t);
            const double norm = ref.squaredNorm() > 0 ? ref.squaredNorm() : 1.0;
            worst_pop = std::max({worst_pop, std::abs(pop.P_ll - std::norm(ref(0))) / norm,
                                  std::abs(pop.P_lm - std::norm(ref(1))) / norm});
        }
    }
    const bool all_regimes = regimes[0] > 0 && regimes[1] > 0 && regimes[2] > 0;
    const bool pass = all_regimes && worst_amp <= 1e-8 && worst_pop <= 1e-8;
    return {pass, std::to_string(n) + " sets (coherent " + std::to_string(regimes[0]) + ", incoherent " +
                      std::to_string(regimes[1]) + ", EP " + std::to_string(regimes[2]) +
                      "); max amplitude rel err " + sci(worst_amp) + ", population rel err " + sci(worst_pop) +
                      " (tol 1e-8)"};
}

// 2. gamma = 0, E_l = E_m: unit norm and the Rabi period
Outcome hermitian_limit() {
    double worst_norm = 0, worst_period = 0;
    for (double v : {1.0, 7.3, 58.0, 250.0, 500.0}) {
        const Dimer p{0, 0, v, 0, 0};
        for (int k = 0; k <= 2000; ++k) {
            const double t = 5.0 * k / 2000;
            worst_norm = std::max(worst_norm, std::abs(populations_degenerate(p, t).total() - 1.0));
            worst_norm = std::max(worst_norm, std::abs(propagate_general(p, t).squaredNorm() - 1.0));
        }
        // P_lm = sin^2(V_r tau) repeats with the zeros of Im c_m = -sin(V_r tau)
        auto im_cm = [&](double t) { return propagate_general(p, t)(1).imag(); };
        const double period = 2 * std::numbers::pi / (2 * v * conv);
        roots::Options o;
        o.x_tol = 1e-15 * period;
        o.max_iterations = 400;
        const double z1 = roots::find_root(im_cm, 0.9 * period, 1.1 * period, o).x;
        const double z2 = roots::find_root(im_cm, 1.9 * period, 2.1 * period, o).x;
        worst_period = std::max(worst_period, std::abs((z2 - z1) - period) / period);
    }
    return {worst_norm <= 1e-12 && worst_period <= 1e-9,
            "max |P_ll + P_lm - 1| " + sci(worst_norm) + " (tol 1e-12); period rel err " + sci(worst_period) +
                " (tol 1e-9)"};
}

// 3. gamma_l = gamma_m: normalized populations periodic, norm = exp(-gamma_bar t conv)
Outcome equal_dissipation() {
    const Dimer p{0, 0, 100, 5, 5};
    const double period = 2 * std::numbers::pi / (200 * conv);
    double worst_periodic = 0, worst_norm = 0;
    for (int k = 0; k <= 20000; ++k) {
        const double t = 10 * period * k / 20000;
        const auto a = populations_degenerate(p, t), b = populations_degenerate(p, t + period);
        worst_periodic = std::max(worst_periodic, std::abs(a.P_lm / a.total() - b.P_lm / b.total()));
        const double env = std::exp(-p.gamma_bar() * t * conv);
        worst_norm = std::max(worst_norm, std::abs(a.total() - env) / env);
    }
    return {worst_periodic <= 1e-9 && worst_norm <= 1e-9,
            "max |p_m(t) - p_m(t + T_R)| over 10 periods " + sci(worst_periodic) + " (tol 1e-9); norm rel err " +
                sci(worst_norm) + " (tol 1e-9)"};
}

// 4. exceptional-point formulas and O(Omega^2) convergence of the other branches
Outcome ep_branch() {
    const Dimer p{0, 0, 2.5, 0, 10};
    const double gs = (p.gamma_l - p.gamma_m) / 2; // gamma* in the printed formulas
    double worst = 0;
    for (int k = 0; k <= 1000; ++k) {
        const double t = 3.0 * k / 1000, tau = t * conv, env = std::exp(-p.gamma_bar() * tau);
        const double pll = std::pow(1 - gs * tau / 2, 2) * env, plm = std::pow(gs * tau / 2, 2) * env;
        const double dp = (1 - gs * tau) * env;
        const auto pop = populations_degenerate(p, t);
        const auto c = propagate_general(p, t);
        worst = std::max({worst, std::abs(pop.P_ll - pll), std::abs(pop.P_lm - plm), std::abs(pop.delta() - dp),
                          std::abs(std::norm(c(0)) - pll), std::abs(std::norm(c(1)) - plm)});
    }

    const double g = 5.0;
    auto gap = [&](double eps, Regime branch) {
        const double s = branch == Regime::Coherent ? 1 : -1; // Omega^2 = s eps 4 V_r^2
        const Dimer near{0, 0, g / (2 * std::sqrt(1 - s * eps)), 0, 2 * g};
        const Dimer at{0, 0, g / 2, 0, 2 * g};
        double e = 0;
        for (int k = 0; k <= 400; ++k) {
            const double t = 2.0 * k / 400;
            const auto a = populations_branch(near, t, branch), b = populations_branch(at, t, Regime::ExceptionalPoint);
            e = std::max({e, std::abs(a.P_ll - b.P_ll), std::abs(a.P_lm - b.P_lm)});
        }
        return e;
    };
    bool conv_ok = true;
    std::string orders;
    for (Regime r : {Regime::Coherent, Regime::Incoherent}) {
        const double e6 = gap(1e-6, r), e8 = gap(1e-8, r);
        const double order = std::log10(e6 / e8) / 2;
        const double extrapolated = (100 * e8 - e6) / 99; // Richardson, error ~ c eps
        conv_ok = conv_ok && std::abs(order - 1) <= 0.05 && std::abs(extrapolated) <= 1e-2 * e8;
        orders += std::string(" ") + to_string(r) + " order " + sci(order) + " (Richardson residue " +
                  sci(std::abs(extrapolated)) + ")";
    }
    return {worst <= 1e-9 && conv_ok, "max deviation from printed EP formulas " + sci(worst) + " (tol 1e-9);" + orders};
}

// 5. coalescence, biorthogonality, defective basis
Outcome eigenvalue_coalescence() {
    const Dimer ep{0, 0, 250, 0, 1000};
    const auto e = eigenvalues(ep);
    const double gap = std::abs(e.rabi());

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0, 1);
    double worst = 0;
    int tested = 0;
    for (int k = 0; k < 2000 && tested < 1000; ++k) {
        const Dimer p{k % 2 ? 200 * u(rng) : 0.0, 0, 1 + 100 * u(rng), 20 * u(rng), 20 * u(rng)};
        if (std::abs(detail::q_squared(p)) < 1e-3 * p.coupling * p.coupling) continue; // away from the EP
        const auto o = eigen_modes(p, 0.2 * u(rng)).overlap();
        worst = std::max({worst, std::abs(o(0, 1)), std::abs(o(1, 0))});
        ++tested;
    }

    bool defective = false;
    try {
        eigen_modes(ep, 0.1);
    } catch (const DefectiveBasis&) {
        try {
            state_amplitudes(ep, 0.1);
        } catch (const DefectiveBasis&) {
            defective = true;
        }
    }
    return {gap <= 1e-10 * ep.coupling && worst <= 1e-12 && defective,
            "EP gap |E+ - E-| = " + sci(gap) + " (tol 1e-10 V_r = " + sci(1e-10 * ep.coupling) +
                "); max |<left_s|right_a>| over " + std::to_string(tested) + " sets " + sci(worst) +
                " (tol 1e-12); defective basis raised: " + (defective ? "yes" : "no")};
}

// 6. quadrature: sum rule and Simpson oracle
Outcome fc_quadrature() {
    BathParams b{200, 50, 0.05, 5e4, 0};
    const auto sum = quad::integrate_to_infinity(
        [&](double w) { return w > 0 ? spectral_density(w, b) / w : 0.0; }, 0.0);
    const double sum_err = std::abs(sum.value - b.lambda_b) / b.lambda_b;

    double worst = 0;
    std::string vals;
    for (double T : {0.0, 77.0, 300.0}) {
        b.temperature = T;
        const double adaptive = fc_exponent(b).phi, simpson = oracle::simpson_phi(b);
        worst = std::max(worst, std::abs(adaptive - simpson) / simpson);
        vals += " Phi(" + sci(T) + " K) = " + format_number(adaptive);
    }
    return {sum_err <= 1e-6 && worst <= 5e-7, "sum rule rel err " + sci(sum_err) + " (tol 1e-6); vs Simpson 1e6 pts " +
                                                  sci(worst) + " (tol 5e-7, 6 significant digits);" + vals};
}

// 7. T_c(dgamma): existence, monotonicity, planted root
Outcome fig4_trends() {
    const BathParams def{200, 50, 0.05, 5e4, 0};
    const BathParams cut{200, 50, 25, 5e4, 0};
    auto decreasing = [](const BathParams& b, double lo, double hi, int n, int& solved) {
        double prev = INFINITY;
        bool ok = true;
        for (int k = 0; k < n; ++k) {
            const double dg = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k / (n - 1));
            const double T = critical_temperature(dg, 250, b).T_c;
            ok = ok && T < prev;
            prev = T;
            ++solved;
        }
        return ok;
    };
    int solved_def = 0, solved_cut = 0;
    bool mono = false;
    std::string why;
    try {
        // with the default cutoff V_r(T) is tiny: roots in (1, 1000) K need dgamma below ~1e-31
        mono = decreasing(def, 1e-250, 1e-40, 30, solved_def) && decreasing(cut, 0.5, 50, 30, solved_cut);
    } catch (const Error& e) {
        why = std::string(" error: ") + e.what();
    }

    auto plant = [](const BathParams& b, double T) {
        BathParams at = b;
        at.temperature = T;
        const double dg = 4 * 250 * std::exp(-oracle::simpson_phi(at));
        return critical_temperature(dg, 250, b).T_c - T;
    };
    const double err300 = std::abs(plant(cut, 300.0)), err5 = std::abs(plant(def, 5.0));
    return {mono && err300 <= 1e-3 && err5 <= 1e-3,
            "strictly decreasing over " + std::to_string(solved_def) + " default-cutoff and " +
                std::to_string(solved_cut) + " omega_min = 25 points: " + (mono ? "yes" : "no") +
                "; planted 300 K recovered to " + sci(err300) + " K, planted 5 K to " + sci(err5) + " K (tol 1e-3)" +
                why};
}

// 8. tau_p ordering over the Fig. 5 preset grid; Hermitian speed limit
Outcome fig5_trends() {
    const auto grid = run_sweep(load_config(preset("fig5")));
    const auto& dg = grid.coords[0];
    const auto& T = grid.coords[1];
    int na = 0, bad_dg = 0, bad_T = 0;
    for (std::size_t i = 0; i < dg.size(); ++i)
        for (std::size_t j = 0; j < T.size(); ++j) {
            const auto& c = grid.at(i, j);
            if (!c) {
                ++na;
                continue;
            }
            if (i > 0 && grid.at(i - 1, j) && !(*c < *grid.at(i - 1, j))) ++bad_dg;
            if (j > 0 && grid.at(i, j - 1) && !(*c > *grid.at(i, j - 1))) ++bad_T;
        }

    double worst = 0;
    for (double v : {1.0, 25.0, 250.0, 480.0}) {
        const double expected = std::numbers::pi / (2 * v * conv);
        const auto r = passage_time(Dimer{0, 0, v, 0, 0}, 2.5 * expected);
        worst = std::max(worst, r.tau_p ? std::abs(*r.tau_p - expected) / expected : INFINITY);
    }
    const bool pass = na == 0 && bad_dg == 0 && bad_T == 0 && worst <= 1e-8;
    return {pass, std::to_string(dg.size()) + "x" + std::to_string(T.size()) + " grid, NA cells " + std::to_string(na) +
                      ", violations (dgamma) " + std::to_string(bad_dg) + ", (T) " + std::to_string(bad_T) +
                      "; tau_p(300 K) from " + format_number(*grid.at(0, T.size() - 1)) + " to " +
                      format_number(*grid.at(dg.size() - 1, T.size() - 1)) + " ps; Hermitian rel err " + sci(worst) +
                      " (tol 1e-8)"};
}

// 9. coherence time for the Fig. 2a preset at 77 K
Outcome coherence_scale() {
    auto spec = load_config(preset("fig2a"));
    const auto& f = spec.fixed;
    BathParams b{f.at("lambda_b"), f.at("omega0"), f.at("omega_min"), f.at("omega_max"), 77.0};
    const double vr = renormalized_coupling(f.at("V"), b).vr;
    const Dimer p{f.at("E_l"), f.at("E_m"), vr, f.at("gamma_l"), f.at("gamma_m")};
    const double t_max = 100.0;
    const auto r = coherence_time(p, f.at("threshold"), t_max);
    const double envelope = std::log(2 / f.at("threshold")) / (p.gamma_bar() * conv);
    const bool pass = !r.persists && r.time >= 0.1 && r.time <= 1.0;
    return {pass, "coherence time " + format_number(r.time) + " ps (V_r = " + format_number(vr) + ", Rabi period " +
                      format_number(r.rabi_period) + " ps), expected decade 0.1-1 ps; the exp(-gamma_bar t) envelope "
                      "alone keeps the swing above threshold until " + format_number(envelope) + " ps"};
}

// 10. byte-identical CSV across runs and thread counts
Outcome determinism() {
    const char* names[] = {"fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig4",
                           "fig5"};
    int mismatches = 0;
    std::size_t bytes = 0;
    for (const char* n : names) {
        const auto spec = load_config(preset(n));
        auto csv = [&](unsigned threads) {
            std::ostringstream os;
            write_csv(run_sweep(spec, threads), os);
            return os.str();
        };
        const std::string a = csv(1), b = csv(1), c = csv(4);
        if (a != b || a != c) ++mismatches;
        bytes += a.size();
    }
    return {mismatches == 0, std::to_string(std::size(names)) + " presets, " + std::to_string(bytes) +
                                 " bytes compared at 1, 1 and 4 threads; mismatching presets " +
                                 std::to_string(mismatches)};
}

struct Criterion {
    const char* name;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {"oracle equivalence", oracle_equivalence},   {"Hermitian limit", hermitian_limit},
        {"equal-dissipation coherence", equal_dissipation}, {"EP branch", ep_branch},
        {"eigenvalue coalescence", eigenvalue_coalescence}, {"FC quadrature", fc_quadrature},
        {"Fig. 4 trends", fig4_trends},               {"Fig. 5 trends", fig5_trends},
        {"coherence persistence scale", coherence_scale}, {"determinism", determinism},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        const int k = std::atoi(argv[i]);
        if (k < 1 || k > int(all.size())) {
            std::fprintf(stderr, "usage: %s [criterion 1-%zu ...]\n", argv[0], all.size());
            return 2;
        }
        selected.push_back(k);
    }
    if (selected.empty())
        for (int k = 1; k <= int(all.size()); ++k) selected.push_back(k);

    int failed = 0;
    for (int k : selected) {
        const auto& c = all[k - 1];
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", k, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed ? 1 : 0;
}
