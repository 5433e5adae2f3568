// params.hpp: parameter bundles for the dimer and its phonon bath

#pragma once

namespace qdimer {

// All energies in cm^-1 (or natural units), temperature in K.
struct BathParams {
    double lambda_b{200.0};    // reorganization energy
    double omega0{50.0};       // Drude cutoff
    double omega_min{0.05};    // infrared cutoff of the Franck-Condon integral
    double omega_max{50000.0}; // ultraviolet truncation
    double temperature{0.0};

    // Bath with the infrared/ultraviolet cutoffs placed at 1e-3 and 1e3 times omega0.
    static BathParams with_default_cutoffs(double lambda_b, double omega0, double temperature) {
        return {lambda_b, omega0, 1e-3 * omega0, 1e3 * omega0, temperature};
    }
};

// Dimer with equal-footing site energies, intersite coupling and total site
// decay rates (phonon + non-phonon). `coupling` is the bare V when passed to
// units::validate and the effective V_r everywhere in the dynamics module.
template <typename Real = double>
struct DimerParams {
    Real E_l{0};
    Real E_m{0};
    Real coupling{1};
    Real gamma_l{0};
    Real gamma_m{0};

    Real gamma_star() const { return (gamma_m - gamma_l) / 2; }
    Real gamma_bar() const { return (gamma_m + gamma_l) / 2; }
    bool degenerate() const { return E_l == E_m; }

    template <typename Other>
    DimerParams<Other> cast() const {
        return {Other(E_l), Other(E_m), Other(coupling), Other(gamma_l), Other(gamma_m)};
    }
};

using Dimer = DimerParams<double>;

} // namespace qdimer
