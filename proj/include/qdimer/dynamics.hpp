// dynamics.hpp: time evolution of the dissipative (non-Hermitian) dimer
//
// H_eff = [ E_l - i gamma_l/2      V_r          ]
//         [ V_r                    E_m - i gamma_m/2 ]
//
// Amplitudes evolve as c(t) = exp(-i H_eff tau) c(0) with tau = conv * t.
// Writing H_eff = mu I + M with M = [[delta, V], [V, -delta]] and M^2 = q^2 I,
//
//   exp(-i H_eff tau) = e^{-i mu tau} [ cos(q tau) I - i sin(q tau)/q M ].
//
// Both cos(q tau) and sin(q tau)/q are entire in z = (q tau)^2, so the
// exceptional point (q = 0, a Jordan block) is the z -> 0 limit of the same
// expression: exp(-i H_eff tau) = e^{-i mu tau} (I - i tau M). For |z| < 1 the
// Taylor series in z is used; elsewhere the two eigen-exponentials.
//
// Conventions: gamma* = (gamma_m - gamma_l)/2, gamma_bar = (gamma_m + gamma_l)/2,
// Omega^2 = 4 V_r^2 - gamma*^2. For E_l = E_m and initial site l,
//   c_l = e^{-gamma_bar tau/2} [cos(Omega tau/2) + (gamma*/Omega) sin(Omega tau/2)]
//   c_m = -i e^{-gamma_bar tau/2} (2 V_r/Omega) sin(Omega tau/2)
// The + sign in c_l is what diagonalizing H_eff gives; it makes the initially
// occupied site lose population at its own rate gamma_l at t = 0.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qdimer/errors.hpp"
#include "qdimer/params.hpp"
#include "qdimer/units.hpp"

namespace qdimer {

enum class Regime { Coherent, Incoherent, ExceptionalPoint };

inline const char* to_string(Regime r) {
    switch (r) {
    case Regime::Coherent: return "coherent";
    case Regime::Incoherent: return "incoherent";
    case Regime::ExceptionalPoint: return "exceptional-point";
    }
    return "?";
}

template <typename Real>
using Matrix2c = Eigen::Matrix<std::complex<Real>, 2, 2>;
template <typename Real>
using Vector2c = Eigen::Matrix<std::complex<Real>, 2, 1>;
// (c_l, c_m)
template <typename Real>
using AmplitudePair = Vector2c<Real>;

inline constexpr double default_tol_ep = 1e-9;

template <typename Real>
AmplitudePair<Real> localized_at_l() {
    return AmplitudePair<Real>(std::complex<Real>(1), std::complex<Real>(0));
}

template <typename Real>
struct DerivedRates {
    Real gamma_star{};
    Real gamma_bar{};
    Real omega_sq{};  // 4 V_r^2 - gamma*^2
    Real omega{};     // sqrt(|omega_sq|), tagged by regime
    Regime regime{Regime::Coherent};
    std::complex<Real> cos_theta{}; // i gamma*/Omega with Omega = sqrt(omega_sq) as a complex number
    std::complex<Real> sin_theta{}; // 2 V_r/Omega
};

template <typename Real>
struct Eigenvalues {
    std::complex<Real> plus;
    std::complex<Real> minus;
    // Complex Rabi frequency E_+ - E_-: real part sets the oscillation, imaginary part the decay asymmetry.
    std::complex<Real> rabi() const { return plus - minus; }
};

template <typename Real>
struct Populations {
    Real P_ll{};
    Real P_lm{};
    Real delta() const { return P_ll - P_lm; }
    Real total() const { return P_ll + P_lm; }
};

// Coefficients in the (|l>, |m>) basis of the resonant symmetric/antisymmetric
// states and their adjoints, in the printed closed form with cos(theta) = i gamma*/Omega.
template <typename Real>
struct ResonantStates {
    Vector2c<Real> chi_s;
    Vector2c<Real> chi_a;
    Vector2c<Real> chi_s_adjoint;
    Vector2c<Real> chi_a_adjoint;
    std::complex<Real> cos_theta;
    std::complex<Real> sin_theta;
};

// Right eigenmodes of H_eff evolved to time t, and the adjoint (left) modes
// evolved under H_eff^dagger. overlap()(i, j) = <left_i | right_j> is the identity.
template <typename Real>
struct EigenModes {
    Vector2c<Real> right_s;
    Vector2c<Real> right_a;
    Vector2c<Real> left_s;
    Vector2c<Real> left_a;

    Matrix2c<Real> overlap() const {
        Matrix2c<Real> o;
        o(0, 0) = left_s.dot(right_s);
        o(0, 1) = left_s.dot(right_a);
        o(1, 0) = left_a.dot(right_s);
        o(1, 1) = left_a.dot(right_a);
        return o;
    }
};

struct PopulationTrace {
    std::vector<double> times;
    std::vector<double> P_ll;
    std::vector<double> P_lm;
    std::vector<double> delta_P;
};

namespace detail {

template <typename Real>
Real scaled_time(Real t, const UnitSystem& units) {
    if (!(t >= 0) || !std::isfinite(static_cast<double>(t)))
        throw InvalidInput("time must be finite and >= 0");
    return Real(units.conv_cm1_to_radps) * t;
}

template <typename Real>
void check_dimer(const DimerParams<Real>& p) {
    std::vector<FieldViolation> bad;
    auto finite = [](Real v) { return std::isfinite(static_cast<double>(v)); };
    if (!finite(p.E_l)) bad.push_back({"E_l", "must be finite"});
    if (!finite(p.E_m)) bad.push_back({"E_m", "must be finite"});
    if (!(p.coupling > 0) || !finite(p.coupling)) bad.push_back({"V_r", "effective coupling must be positive"});
    if (!(p.gamma_l >= 0) || !finite(p.gamma_l)) bad.push_back({"gamma_l", "decay rate must be >= 0"});
    if (!(p.gamma_m >= 0) || !finite(p.gamma_m)) bad.push_back({"gamma_m", "decay rate must be >= 0"});
    if (!bad.empty()) throw ValidationError(std::move(bad));
}

template <typename Real>
void require_degenerate(const DimerParams<Real>& p, const char* op) {
    if (!p.degenerate())
        throw WrongOperation(std::string(op) + ": requires E_l == E_m; use propagate_general for biased dimers");
}

// cos(sqrt z) and sin(sqrt z)/sqrt z by their Taylor series; meant for |z| < 1.
template <typename Scalar>
void cos_sinc_series(const Scalar& z, Scalar& cos_part, Scalar& sinc_part) {
    using Real = decltype(std::abs(z));
    Scalar c_term(1), s_term(1);
    cos_part = c_term;
    sinc_part = s_term;
    for (int k = 1; k < 40; ++k) {
        c_term *= -z / Real((2 * k - 1) * (2 * k));
        s_term *= -z / Real((2 * k) * (2 * k + 1));
        cos_part += c_term;
        sinc_part += s_term;
        if (std::abs(c_term) <= std::numeric_limits<Real>::epsilon() * std::abs(cos_part) &&
            std::abs(s_term) <= std::numeric_limits<Real>::epsilon() * std::abs(sinc_part))
            break;
    }
}

// q^2 = V^2 + delta^2 evaluated as (V + i delta)(V - i delta): exact zero at a
// symmetric exceptional point instead of a rounding residue.
template <typename Real>
std::complex<Real> q_squared(const DimerParams<Real>& p) {
    const std::complex<Real> i(0, 1);
    const std::complex<Real> delta((p.E_l - p.E_m) / 2, p.gamma_star() / 2);
    return (p.coupling + i * delta) * (p.coupling - i * delta);
}

// Root with non-negative real part (non-negative imaginary part on ties).
template <typename Real>
std::complex<Real> canonical_sqrt(const std::complex<Real>& z) {
    auto q = std::sqrt(z);
    if (q.real() < 0 || (q.real() == 0 && q.imag() < 0)) q = -q;
    return q;
}

} // namespace detail

template <typename Real>
Regime classify_regime(const DimerParams<Real>& p, Real tol_ep = Real(default_tol_ep)) {
    detail::check_dimer(p);
    const Real two_v = 2 * p.coupling;
    const Real g = std::abs(p.gamma_star());
    if (std::abs(two_v - g) <= tol_ep * two_v) return Regime::ExceptionalPoint;
    return two_v > g ? Regime::Coherent : Regime::Incoherent;
}

template <typename Real>
DerivedRates<Real> derived_rates(const DimerParams<Real>& p, Real tol_ep = Real(default_tol_ep)) {
    DerivedRates<Real> d;
    d.regime = classify_regime(p, tol_ep);
    d.gamma_star = p.gamma_star();
    d.gamma_bar = p.gamma_bar();
    const Real two_v = 2 * p.coupling;
    d.omega_sq = (two_v - d.gamma_star) * (two_v + d.gamma_star);
    d.omega = std::sqrt(std::abs(d.omega_sq));
    if (d.omega_sq != 0) {
        const std::complex<Real> omega_c = std::sqrt(std::complex<Real>(d.omega_sq, 0));
        d.cos_theta = std::complex<Real>(0, d.gamma_star) / omega_c;
        d.sin_theta = two_v / omega_c;
    } else {
        const Real nan = std::numeric_limits<Real>::quiet_NaN();
        d.cos_theta = d.sin_theta = std::complex<Real>(nan, nan);
    }
    return d;
}

template <typename Real>
Matrix2c<Real> effective_hamiltonian(const DimerParams<Real>& p) {
    Matrix2c<Real> h;
    h << std::complex<Real>(p.E_l, -p.gamma_l / 2), std::complex<Real>(p.coupling, 0),
         std::complex<Real>(p.coupling, 0), std::complex<Real>(p.E_m, -p.gamma_m / 2);
    return h;
}

// Eigenvalues of H_eff, ordered by real part (ties: imaginary part), E_plus first.
template <typename Real>
Eigenvalues<Real> eigenvalues(const DimerParams<Real>& p) {
    detail::check_dimer(p);
    const std::complex<Real> mean((p.E_l + p.E_m) / 2, -p.gamma_bar() / 2);
    const auto q = detail::canonical_sqrt(detail::q_squared(p));
    return {mean + q, mean - q};
}

// exp(-i H_eff conv t) applied to `initial`. Valid in every regime, including
// exactly at the exceptional point, and for E_l != E_m.
template <typename Real>
AmplitudePair<Real> propagate_general(const DimerParams<Real>& p, Real t,
                                      const UnitSystem& units = UnitSystem::physical(),
                                      const AmplitudePair<Real>& initial = localized_at_l<Real>()) {
    using C = std::complex<Real>;
    detail::check_dimer(p);
    const Real tau = detail::scaled_time(t, units);
    const C i(0, 1);
    const C mean((p.E_l + p.E_m) / 2, -p.gamma_bar() / 2);
    const C delta((p.E_l - p.E_m) / 2, p.gamma_star() / 2);
    const C q2 = detail::q_squared(p);
    const C z = q2 * tau * tau;

    C cos_part, sin_over_q;
    if (std::abs(z) < 1) {
        C c, sinc;
        detail::cos_sinc_series(z, c, sinc);
        const C phase = std::exp(-i * mean * tau);
        cos_part = phase * c;
        sin_over_q = phase * tau * sinc;
    } else {
        const C q = detail::canonical_sqrt(q2);
        const C e_plus = std::exp(-i * (mean + q) * tau);
        const C e_minus = std::exp(-i * (mean - q) * tau);
        cos_part = (e_plus + e_minus) / Real(2);
        sin_over_q = (e_minus - e_plus) / (Real(2) * i * q);
    }

    Matrix2c<Real> m;
    m << delta, C(p.coupling, 0), C(p.coupling, 0), -delta;
    const Matrix2c<Real> u = cos_part * Matrix2c<Real>::Identity() - i * sin_over_q * m;
    return u * initial;
}

// Closed-form populations for a specific branch, evaluated as printed:
// Coherent (trigonometric, needs Omega^2 > 0), Incoherent (hyperbolic, needs
// Omega^2 < 0) or ExceptionalPoint (algebraic Jordan limit). No regime routing.
template <typename Real>
Populations<Real> populations_branch(const DimerParams<Real>& p, Real t, Regime branch,
                                     const UnitSystem& units = UnitSystem::physical()) {
    detail::check_dimer(p);
    detail::require_degenerate(p, "populations_branch");
    const Real tau = detail::scaled_time(t, units);
    const Real gs = p.gamma_star();
    const Real gb = p.gamma_bar();
    const Real v = p.coupling;
    const Real two_v = 2 * v;
    const Real omega_sq = (two_v - gs) * (two_v + gs);

    switch (branch) {
    case Regime::ExceptionalPoint: {
        const Real env = std::exp(-gb * tau);
        const Real a_l = 1 + gs * tau / 2;
        return {a_l * a_l * env, v * tau * v * tau * env};
    }
    case Regime::Coherent: {
        if (!(omega_sq > 0)) throw DomainError("populations_branch: coherent formula needs 4V_r^2 > gamma*^2");
        const Real omega = std::sqrt(omega_sq);
        const Real x = omega * tau / 2;
        const Real env = std::exp(-gb * tau);
        const Real a_l = std::cos(x) + gs / omega * std::sin(x);
        const Real a_m = two_v / omega * std::sin(x);
        return {a_l * a_l * env, a_m * a_m * env};
    }
    case Regime::Incoherent: {
        if (!(omega_sq < 0)) throw DomainError("populations_branch: incoherent formula needs 4V_r^2 < gamma*^2");
        const Real omega = std::sqrt(-omega_sq);
        const Real x = omega * tau / 2;
        const Real y = gb * tau / 2;
        // e^{-y} cosh x and e^{-y} sinh x without forming cosh x (x <= y).
        const Real up = std::exp(x - y), down = std::exp(-x - y);
        const Real ch = (up + down) / 2, sh = (up - down) / 2;
        const Real a_l = ch + gs / omega * sh;
        const Real a_m = two_v / omega * sh;
        return {a_l * a_l, a_m * a_m};
    }
    }
    throw InvalidInput("populations_branch: unknown branch");
}

// Populations for E_l = E_m with the exciton initially at site l. The regime
// decides the formula; within |Omega tau/2| < 1 the Taylor series around the
// exceptional point is used, which joins the three branches continuously.
template <typename Real>
Populations<Real> populations_degenerate(const DimerParams<Real>& p, Real t,
                                         const UnitSystem& units = UnitSystem::physical(),
                                         Real tol_ep = Real(default_tol_ep)) {
    detail::require_degenerate(p, "populations_degenerate");
    const Regime regime = classify_regime(p, tol_ep);
    if (regime == Regime::ExceptionalPoint) return populations_branch(p, t, regime, units);

    const Real tau = detail::scaled_time(t, units);
    const Real gs = p.gamma_star();
    const Real two_v = 2 * p.coupling;
    const Real omega_sq = (two_v - gs) * (two_v + gs);
    const Real z = omega_sq * tau * tau / 4;
    if (std::abs(z) < 1) {
        Real c, sinc;
        detail::cos_sinc_series(z, c, sinc);
        const Real env = std::exp(-p.gamma_bar() * tau);
        const Real a_l = c + gs * tau / 2 * sinc;
        const Real a_m = p.coupling * tau * sinc;
        return {a_l * a_l * env, a_m * a_m * env};
    }
    return populations_branch(p, t, regime, units);
}

// The resonant states and adjoints as closed-form coefficients. Throws
// DefectiveBasis at the exceptional point, where Omega = 0 and cos(theta) diverges.
template <typename Real>
ResonantStates<Real> state_amplitudes(const DimerParams<Real>& p, Real t,
                                      const UnitSystem& units = UnitSystem::physical(),
                                      Real tol_ep = Real(default_tol_ep)) {
    using C = std::complex<Real>;
    detail::require_degenerate(p, "state_amplitudes");
    const auto d = derived_rates(p, tol_ep);
    if (d.regime == Regime::ExceptionalPoint || d.omega_sq == 0)
        throw DefectiveBasis("state_amplitudes: exceptional point, the resonant states coalesce into one "
                             "self-orthogonal state");
    const Real tau = detail::scaled_time(t, units);
    const C i(0, 1);
    const C omega = std::sqrt(C(d.omega_sq, 0));
    const C x = omega * tau / Real(2);
    const C c = std::cos(x), s = std::sin(x);
    const Real env = std::exp(-d.gamma_bar * tau / 2);

    ResonantStates<Real> r;
    r.cos_theta = d.cos_theta;
    r.sin_theta = d.sin_theta;
    const C diag_minus = env * (c - i * d.cos_theta * s);
    const C diag_plus = env * (c + i * d.cos_theta * s);
    const C off = env * i * d.sin_theta * s;
    r.chi_s << diag_minus, off;
    r.chi_a << diag_minus, -off;
    r.chi_s_adjoint << diag_plus, -off;
    r.chi_a_adjoint << diag_plus, off;
    return r;
}

// Biorthogonal eigenmodes of H_eff evolved to t. Works for E_l != E_m.
// Throws DefectiveBasis when |q^2| <= 2 tol_ep V_r^2 (eigenvector coalescence).
template <typename Real>
EigenModes<Real> eigen_modes(const DimerParams<Real>& p, Real t,
                             const UnitSystem& units = UnitSystem::physical(),
                             Real tol_ep = Real(default_tol_ep)) {
    using C = std::complex<Real>;
    detail::check_dimer(p);
    const Real tau = detail::scaled_time(t, units);
    const C q2 = detail::q_squared(p);
    if (std::abs(q2) <= 2 * tol_ep * p.coupling * p.coupling)
        throw DefectiveBasis("eigen_modes: exceptional point, eigenvectors coalesce");
    const C q = detail::canonical_sqrt(q2);
    const C delta((p.E_l - p.E_m) / 2, p.gamma_star() / 2);
    const C v(p.coupling, 0);

    auto mode = [&](const C& lambda) {
        Vector2c<Real> vec;
        if (std::abs(lambda - delta) >= std::abs(lambda + delta))
            vec << v, lambda - delta;
        else
            vec << lambda + delta, v;
        // bilinear (not Hermitian) normalization: vec^T vec = 1
        return Vector2c<Real>(vec / std::sqrt(vec(0) * vec(0) + vec(1) * vec(1)));
    };
    const auto ev = eigenvalues(p);
    const C i(0, 1);
    EigenModes<Real> m;
    const Vector2c<Real> vs = mode(q), va = mode(-q);
    m.right_s = std::exp(-i * ev.plus * tau) * vs;
    m.right_a = std::exp(-i * ev.minus * tau) * va;
    m.left_s = std::exp(-i * std::conj(ev.plus) * tau) * vs.conjugate();
    m.left_a = std::exp(-i * std::conj(ev.minus) * tau) * va.conjugate();
    return m;
}

// Steps for the stepped oracle so that each step advances the fastest phase by at most max_phase.
template <typename Real>
std::size_t oracle_steps_for(const DimerParams<Real>& p, Real t, const UnitSystem& units = UnitSystem::physical(),
                             Real max_phase = Real(0.004)) {
    const auto ev = eigenvalues(p);
    const Real tau = detail::scaled_time(t, units);
    const Real rate = std::max(std::abs(ev.plus), std::abs(ev.minus));
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(static_cast<double>(rate * tau / max_phase))));
}

// Independent check: classical fourth-order Runge-Kutta for i dc/dtau = H_eff c at
// fixed step tau/n_steps. With check_step the run is repeated at half the step and
// StepSizeError is thrown if the result moves by more than 1e-6 relative.
template <typename Real>
AmplitudePair<Real> propagate_oracle(const DimerParams<Real>& p, Real t, std::size_t n_steps,
                                     const UnitSystem& units = UnitSystem::physical(),
                                     const AmplitudePair<Real>& initial = localized_at_l<Real>(),
                                     bool check_step = true) {
    using C = std::complex<Real>;
    detail::check_dimer(p);
    if (n_steps < 1) throw InvalidInput("propagate_oracle: n_steps must be >= 1");
    const Real tau = detail::scaled_time(t, units);
    const Matrix2c<Real> gen = C(0, -1) * effective_hamiltonian(p);

    auto run = [&](std::size_t n) {
        const Real h = tau / Real(n);
        AmplitudePair<Real> c = initial;
        for (std::size_t k = 0; k < n; ++k) {
            const AmplitudePair<Real> k1 = gen * c;
            const AmplitudePair<Real> k2 = gen * (c + (h / 2) * k1);
            const AmplitudePair<Real> k3 = gen * (c + (h / 2) * k2);
            const AmplitudePair<Real> k4 = gen * (c + h * k3);
            c += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
        }
        return c;
    };

    const AmplitudePair<Real> coarse = run(n_steps);
    if (check_step && tau > 0) {
        const AmplitudePair<Real> fine = run(2 * n_steps);
        const Real scale = fine.norm();
        const Real change = scale > 0 ? (coarse - fine).norm() / scale : (coarse - fine).norm();
        if (change > Real(1e-6))
            throw StepSizeError("propagate_oracle: halving the step changed the result by more than 1e-6",
                                static_cast<double>(change));
    }
    return coarse;
}

inline PopulationTrace population_trace(const Dimer& p, const std::vector<double>& times,
                                        const UnitSystem& units = UnitSystem::physical()) {
    PopulationTrace tr;
    tr.times = times;
    tr.P_ll.reserve(times.size());
    tr.P_lm.reserve(times.size());
    tr.delta_P.reserve(times.size());
    for (double t : times) {
        const auto c = propagate_general(p, t, units);
        const double pll = std::norm(c(0)), plm = std::norm(c(1));
        tr.P_ll.push_back(pll);
        tr.P_lm.push_back(plm);
        tr.delta_P.push_back(pll - plm);
    }
    return tr;
}

} // namespace qdimer
