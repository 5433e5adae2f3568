#include "qdimer/units.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "qdimer/errors.hpp"

namespace qdimer {

double wavenumber_to_angular_frequency(double energy, const UnitSystem& units) {
    if (!std::isfinite(energy)) throw InvalidInput("wavenumber_to_angular_frequency: non-finite energy");
    return energy * units.conv_cm1_to_radps;
}

double coth_thermal(double omega, double temperature, const UnitSystem& units) {
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw DomainError("coth_thermal: frequency must be positive and finite, got " + std::to_string(omega));
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
        throw DomainError("coth_thermal: temperature must be >= 0, got " + std::to_string(temperature));
    if (temperature == 0.0) return 1.0;
    const double x = omega / (2.0 * units.kB_cm1_per_K * temperature);
    return 1.0 / std::tanh(x);
}

ValidatedParams validate(const Dimer& dimer, const BathParams& bath) {
    std::vector<FieldViolation> bad;
    auto check = [&bad](bool ok, const char* field, const char* message) {
        if (!ok) bad.push_back({field, message});
    };
    auto finite = [](double v) { return std::isfinite(v); };

    check(finite(dimer.E_l), "E_l", "must be finite");
    check(finite(dimer.E_m), "E_m", "must be finite");
    check(finite(dimer.coupling) && dimer.coupling > 0.0, "V", "coupling must be positive");
    check(finite(dimer.gamma_l) && dimer.gamma_l >= 0.0, "gamma_l", "decay rate must be >= 0");
    check(finite(dimer.gamma_m) && dimer.gamma_m >= 0.0, "gamma_m", "decay rate must be >= 0");
    check(finite(bath.lambda_b) && bath.lambda_b >= 0.0, "lambda_b", "reorganization energy must be >= 0");
    check(finite(bath.omega0) && bath.omega0 > 0.0, "omega0", "bath cutoff must be positive");
    check(finite(bath.omega_min) && bath.omega_min > 0.0 && bath.omega_min < bath.omega0, "omega_min",
          "infrared cutoff must satisfy 0 < omega_min < omega0 (the Franck-Condon integral diverges at 0)");
    check(finite(bath.omega_max) && bath.omega_max > bath.omega0, "omega_max",
          "ultraviolet truncation must exceed omega0");
    check(finite(bath.temperature) && bath.temperature >= 0.0, "T", "temperature must be >= 0");

    if (!bad.empty()) throw ValidationError(std::move(bad));
    return {dimer, bath, dimer.gamma_star(), dimer.gamma_bar()};
}

} // namespace qdimer
