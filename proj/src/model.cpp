#include "yns/model.hpp"

#include <cmath>
#include <string>

#include "yns/error.hpp"

namespace yns {

const char* to_string(Regime r) {
    switch (r) {
        case Regime::Stable: return "stable";
        case Regime::Unstable: return "unstable";
        case Regime::Critical: return "critical";
    }
    return "unknown";
}

void validate(const PhysicalParams& p) {
    if (!(p.rho_bar > 0.0) || !std::isfinite(p.rho_bar))
        throw ValidationError("density hypothesis rho_bar>0 violated (rho_bar=" +
                              std::to_string(p.rho_bar) + ")");
    if (!(p.mu > 0.0) || !std::isfinite(p.mu))
        throw ValidationError("viscosity hypothesis μ>0 violated (mu=" + std::to_string(p.mu) +
                              ")");
    if (!(2.0 * p.mu + p.mu_prime > 0.0) || !std::isfinite(p.mu_prime))
        throw ValidationError("viscosity hypothesis 2μ+μ'>0 violated (2mu+mu'=" +
                              std::to_string(2.0 * p.mu + p.mu_prime) + ")");
    if (!std::isfinite(p.gamma)) throw ValidationError("gamma must be finite");
    if (const auto* law = std::get_if<GammaLaw>(&p.pressure)) {
        if (!(law->A > 0.0)) throw ValidationError("pressure law requires A>0");
        if (!(law->g >= 1.0)) throw ValidationError("pressure law requires g>=1");
    } else {
        const auto& slope = std::get<DirectSlope>(p.pressure);
        if (!std::isfinite(slope.p_prime_at_rho_bar))
            throw ValidationError("pressure slope must be finite");
    }
}

double pressure_slope(const PressureLaw& law, double rho, double rho_bar) {
    if (const auto* g = std::get_if<GammaLaw>(&law)) {
        if (!(rho > 0.0)) throw VacuumError("pressure slope evaluated at non-positive density");
        return g->A * g->g * std::pow(rho, g->g - 1.0);
    }
    if (rho != rho_bar)
        throw ValidationError("DirectSlope pressure law only defines P'(rho_bar); "
                              "nonlinear terms need a GammaLaw");
    return std::get<DirectSlope>(law).p_prime_at_rho_bar;
}

double pressure_coupling(const PressureLaw& law, double rho_tilde, double rho_bar) {
    const double rho = rho_tilde + rho_bar;
    return pressure_slope(law, rho, rho_bar) / rho -
           pressure_slope(law, rho_bar, rho_bar) / rho_bar;
}

Coefficients derive_coefficients(const PhysicalParams& params) {
    validate(params);
    const double p_prime = pressure_slope(params.pressure, params.rho_bar, params.rho_bar);
    Coefficients c;
    c.alpha1 = p_prime / params.rho_bar;
    c.alpha2 = params.rho_bar;
    c.alpha3 = params.mu / params.rho_bar;
    c.alpha4 = (params.mu + params.mu_prime) / params.rho_bar;
    c.eta = c.alpha3 + c.alpha4;
    c.stability_margin = p_prime + params.gamma * params.rho_bar;
    c.gamma = params.gamma;
    c.rho_bar = params.rho_bar;
    return c;
}

Regime classify_regime(const Coefficients& coeffs, double tolerance) {
    const double m = coeffs.stability_margin;
    if (std::abs(m) <= tolerance) return Regime::Critical;
    return m > 0.0 ? Regime::Stable : Regime::Unstable;
}

}  // namespace yns
