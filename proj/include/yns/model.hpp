#pragma once

#include <variant>

namespace yns {

/// P(ρ) = A·ρ^g.
struct GammaLaw {
    double A = 1.0;
    double g = 1.4;
};

/// Supplies P'(ρ̄) directly. Only usable for linear theory.
struct DirectSlope {
    double p_prime_at_rho_bar = 1.0;
};

using PressureLaw = std::variant<GammaLaw, DirectSlope>;

struct PhysicalParams {
    double rho_bar = 1.0;
    double mu = 1.0;
    double mu_prime = 0.0;
    double gamma = 0.0;
    PressureLaw pressure = GammaLaw{};
};

/// Linearisation coefficients about the constant state (ρ̄, 0).
struct Coefficients {
    double alpha1 = 0;  // P'(ρ̄)/ρ̄
    double alpha2 = 0;  // ρ̄
    double alpha3 = 0;  // μ/ρ̄
    double alpha4 = 0;  // (μ+μ')/ρ̄
    double eta = 0;     // alpha3 + alpha4
    double stability_margin = 0;  // P'(ρ̄) + γρ̄
    double gamma = 0;
    double rho_bar = 0;

    /// P'(ρ̄), recovered as alpha1·ρ̄.
    double p_prime() const { return alpha1 * rho_bar; }

    bool operator==(const Coefficients&) const = default;
};

enum class Regime { Stable, Unstable, Critical };

const char* to_string(Regime r);

/// Throws ValidationError naming the violated hypothesis.
void validate(const PhysicalParams& params);

/// P'(ρ) for the given law. DirectSlope only answers at ρ = ρ̄ and throws
/// ValidationError elsewhere.
double pressure_slope(const PressureLaw& law, double rho, double rho_bar);

/// F(ρ̃) = P'(ρ̃+ρ̄)/(ρ̃+ρ̄) − P'(ρ̄)/ρ̄, so F(0) = 0.
double pressure_coupling(const PressureLaw& law, double rho_tilde, double rho_bar);

/// k(ρ̃) = ρ̃/(ρ̃+ρ̄).
inline double viscosity_defect(double rho_tilde, double rho_bar) {
    return rho_tilde / (rho_tilde + rho_bar);
}

Coefficients derive_coefficients(const PhysicalParams& params);

Regime classify_regime(const Coefficients& coeffs, double tolerance = 0.0);

}  // namespace yns
