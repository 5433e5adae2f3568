// analysis.hpp: observables derived from the dimer dynamics and the bath
//
//  * critical_temperature: T_c with 2 V_r(T_c) = |gamma*| = dgamma/2, i.e. the
//    temperature at which the dimer sits on its exceptional point.
//  * passage_time: first maximizer of the normalized transfer probability
//    p_m(t) = P_lm / (P_ll + P_lm). In the Hermitian degenerate limit this is
//    pi / (2 V_r conv), the two-level speed limit.
//  * coherence_time: earliest time after which the peak-to-peak swing of
//    dP(t) over one Rabi period stays below a threshold.

#pragma once

#include <cstddef>
#include <optional>
#include <utility>

#include "qdimer/bath.hpp"
#include "qdimer/dynamics.hpp"
#include "qdimer/params.hpp"
#include "qdimer/units.hpp"

namespace qdimer {

struct CriticalTemperatureResult {
    double T_c{0.0};
    double residual{0.0}; // 2 V_r(T_c) - dgamma/2, cm^-1
    std::pair<double, double> bracket{0.0, 0.0};
    std::size_t iterations{0};
};

struct PassageTimeResult {
    std::optional<double> tau_p; // empty when p_m has no interior maximum on the window
    double p_m_at_tau{0.0};
    std::pair<double, double> search_window{0.0, 0.0};

    bool at_boundary() const { return !tau_p.has_value(); }
};

struct CoherenceTimeResult {
    double time{0.0};
    bool persists{false}; // oscillations still above threshold at t_max
    double rabi_period{0.0};
};

inline constexpr double default_T_lo = 1.0;
inline constexpr double default_T_hi = 1000.0;

// tol is relative on the exceptional-point condition: |2 V_r(T_c) - dgamma/2| <= tol * dgamma/2.
// Throws DomainError for dgamma <= 0 and NoRootError (BelowBracket: already
// incoherent at T_lo; AboveBracket: no exceptional point up to T_hi).
CriticalTemperatureResult critical_temperature(double delta_gamma, double V, const BathParams& bath,
                                               double T_lo = default_T_lo, double T_hi = default_T_hi,
                                               double tol = 1e-8,
                                               const UnitSystem& units = UnitSystem::physical());

// Normalized transfer probability P_lm / (P_ll + P_lm) at time t.
double transfer_probability(const Dimer& p, double t, const UnitSystem& units = UnitSystem::physical());

PassageTimeResult passage_time(const Dimer& p, double t_max, std::size_t grid_n = 256,
                               const UnitSystem& units = UnitSystem::physical(), double rel_tol = 1e-8);

// Throws NotApplicable outside the coherent regime.
CoherenceTimeResult coherence_time(const Dimer& p, double threshold, double t_max,
                                   const UnitSystem& units = UnitSystem::physical(),
                                   double tol_ep = default_tol_ep);

} // namespace qdimer
