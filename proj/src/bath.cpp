#include "qdimer/bath.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "qdimer/errors.hpp"
#include "qdimer/quadrature.hpp"

namespace qdimer {

double spectral_density(double omega, const BathParams& bath) {
    if (!(omega >= 0.0)) throw DomainError("spectral_density: frequency must be >= 0");
    if (std::isinf(omega)) return 0.0;
    const double w0 = bath.omega0;
    return 2.0 / std::numbers::pi * bath.lambda_b * w0 * omega / (omega * omega + w0 * w0);
}

void validate_bath(const BathParams& bath) {
    std::vector<FieldViolation> bad;
    if (!(bath.lambda_b >= 0.0) || !std::isfinite(bath.lambda_b))
        bad.push_back({"lambda_b", "reorganization energy must be >= 0"});
    if (!(bath.omega0 > 0.0) || !std::isfinite(bath.omega0)) bad.push_back({"omega0", "must be positive"});
    if (!(bath.omega_min > 0.0 && bath.omega_min < bath.omega0))
        bad.push_back({"omega_min", "must satisfy 0 < omega_min < omega0"});
    if (!(bath.omega_max > bath.omega0) || !std::isfinite(bath.omega_max))
        bad.push_back({"omega_max", "must exceed omega0"});
    if (!(bath.temperature >= 0.0) || !std::isfinite(bath.temperature))
        bad.push_back({"T", "temperature must be >= 0"});
    if (!bad.empty()) throw ValidationError(std::move(bad));
}

FcExponent fc_exponent(const BathParams& bath, double tol, const UnitSystem& units) {
    validate_bath(bath);
    if (!(tol > 0.0 && tol <= 1e-2)) throw InvalidInput("fc_exponent: tol must lie in (0, 1e-2]");
    if (bath.lambda_b == 0.0) return {};

    const double T = bath.temperature;
    const double w0 = bath.omega0;
    const double prefactor = 2.0 / std::numbers::pi * bath.lambda_b * w0;
    // J(w)/w^2 coth(...) dw = J(w)/w coth(...) du with w = e^u.
    auto integrand = [&](double u) {
        const double w = std::exp(u);
        const double thermal = T > 0.0 ? 1.0 / std::tanh(w / (2.0 * units.kB_cm1_per_K * T)) : 1.0;
        return prefactor / (w * w + w0 * w0) * thermal;
    };

    quad::Options opts;
    opts.rel_tol = tol;
    const auto r = quad::integrate(integrand, std::log(bath.omega_min), std::log(bath.omega_max),
                                   {std::log(w0)}, opts);
    return {r.value, r.abs_error};
}

FcResult renormalized_coupling(double V, const BathParams& bath, double tol, const UnitSystem& units) {
    if (!(V > 0.0) || !std::isfinite(V)) throw DomainError("renormalized_coupling: V must be positive");
    const auto fc = fc_exponent(bath, tol, units);
    const double vr = V * std::exp(-fc.phi);
    if (!(vr >= std::numeric_limits<double>::min())) {
        throw RangeError("renormalized_coupling: V exp(-Phi) underflows double precision (Phi = " +
                         std::to_string(fc.phi) + "); raise omega_min or lower T");
    }
    return {fc.phi, fc.abs_err_estimate, vr};
}

} // namespace qdimer
