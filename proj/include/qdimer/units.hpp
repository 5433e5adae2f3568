// units.hpp: unit system and the conversions used by the physics modules
//
// The engine works in (cm^-1, ps, K). Energies E are turned into angular
// frequencies E * conv_cm1_to_radps, and thermal factors use kB in cm^-1/K.
// The natural-unit system sets both constants to 1 (hbar = kB = 1).

#pragma once

#include "qdimer/params.hpp"

namespace qdimer {

namespace constants {
// 2 pi c with c = 0.0299792458 cm/ps, 10 significant digits.
inline constexpr double cm1_to_radps = 0.1883651567;
// k_B / (h c) in cm^-1 per K, 10 significant digits.
inline constexpr double kB_cm1_per_K = 0.6950348005;
} // namespace constants

struct UnitSystem {
    double conv_cm1_to_radps{constants::cm1_to_radps};
    double kB_cm1_per_K{constants::kB_cm1_per_K};

    static constexpr UnitSystem physical() { return {}; }
    static constexpr UnitSystem natural() { return {1.0, 1.0}; }

    bool is_natural() const { return conv_cm1_to_radps == 1.0 && kB_cm1_per_K == 1.0; }
};

// E (cm^-1) -> rad/ps. Throws InvalidInput for non-finite E.
double wavenumber_to_angular_frequency(double energy, const UnitSystem& units = UnitSystem::physical());

// coth(omega / (2 kB T)); exactly 1 at T = 0. Throws DomainError for omega <= 0 or T < 0.
double coth_thermal(double omega, double temperature, const UnitSystem& units = UnitSystem::physical());

struct ValidatedParams {
    Dimer dimer;       // coupling holds the bare V
    BathParams bath;
    double gamma_star; // (gamma_m - gamma_l) / 2
    double gamma_bar;  // (gamma_m + gamma_l) / 2
};

// Checks every constraint and reports all violations at once (ValidationError).
ValidatedParams validate(const Dimer& dimer, const BathParams& bath);

} // namespace qdimer
