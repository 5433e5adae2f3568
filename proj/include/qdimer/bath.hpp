// bath.hpp: Drude (overdamped Brownian oscillator) bath and Franck-Condon renormalization
//
//   J(w)   = (2/pi) lambda_b omega0 w / (w^2 + omega0^2)
//   Phi(T) = int_{omega_min}^{omega_max} J(w)/w^2 coth(w / 2 kB T) dw
//   V_r(T) = V exp(-Phi(T))
//
// Phi is integrated in u = ln(w), split at omega0, so the six decades between
// the cutoffs are sampled evenly.

#pragma once

#include "qdimer/params.hpp"
#include "qdimer/units.hpp"

namespace qdimer {

struct FcExponent {
    double phi{0.0};
    double abs_err_estimate{0.0};
};

struct FcResult {
    double phi{0.0};
    double abs_err_estimate{0.0};
    double vr{0.0};
};

// Throws DomainError for omega < 0.
double spectral_density(double omega, const BathParams& bath);

// Checks the bath constraints; throws ValidationError listing every violation.
void validate_bath(const BathParams& bath);

// tol is the relative quadrature tolerance, in (0, 1e-2]. Throws ConvergenceError
// (with the best estimate) when the tolerance cannot be met.
FcExponent fc_exponent(const BathParams& bath, double tol = 1e-10,
                       const UnitSystem& units = UnitSystem::physical());

// V exp(-Phi). Throws DomainError for V <= 0 and RangeError when the result
// underflows the normal double range (Phi beyond ~700 for V ~ 1e2).
FcResult renormalized_coupling(double V, const BathParams& bath, double tol = 1e-10,
                               const UnitSystem& units = UnitSystem::physical());

} // namespace qdimer
