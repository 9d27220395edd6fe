#pragma once

// Perturbation fields (ρ̃, u) on the periodic grid and the Fourier-multiplier
// machinery acting on them.

#include <cstdint>
#include <optional>
#include <vector>

#include "yns/grid.hpp"
#include "yns/model.hpp"
#include "yns/spectral.hpp"

namespace yns {

struct FieldState {
    GridSpec grid;
    RealField rho;               // ρ̃
    std::vector<RealField> u;    // grid.dim components

    static FieldState zeros(const GridSpec& grid);
    bool all_finite() const;
};

/// Fourier coefficients of a FieldState.
struct SpectralState {
    SpectralField rho;
    std::vector<SpectralField> u;
};

SpectralState to_spectral(SpectralGrid& sg, const FieldState& s);
FieldState to_physical(SpectralGrid& sg, const SpectralState& s);

/// Throws VacuumError when min ρ̃ ≤ −ρ̄ + margin.
void check_vacuum(std::span<const double> rho, double rho_bar, double margin);

// Diagonal multipliers on coefficient arrays.
void dealias(const Lattice& lat, SpectralField& c);
void zero_nyquist(const Lattice& lat, SpectralField& c);
SpectralField derivative(const Lattice& lat, const SpectralField& c, int axis);
SpectralField laplacian(const Lattice& lat, const SpectralField& c);
SpectralField divergence(const Lattice& lat, const std::vector<SpectralField>& u);

/// φ̂ = ρ̂/(1+|ξ|²), including ξ = 0.
SpectralField bessel_potential(const Lattice& lat, const SpectralField& rho);
RealField bessel_potential(SpectralGrid& sg, std::span<const double> rho);

struct HelmholtzParts {
    std::vector<SpectralField> solenoidal;    // Pu
    std::vector<SpectralField> longitudinal;  // Qu
};

/// Q̂u = ξ(ξ·û)/|ξ|², Pu = u − Qu, mean flow in Pu. In 1D, Pu = 0 and Qu = u.
HelmholtzParts helmholtz_project(const Lattice& lat, const std::vector<SpectralField>& u);

/// v = Λ⁻¹ div u: v̂ = iξ·û/|ξ|, v̂(0) = 0.
SpectralField lambda_div(const Lattice& lat, const std::vector<SpectralField>& u);
/// u_long = −Λ⁻¹∇v: û = −i(ξ/|ξ|)v̂, inverse of lambda_div on curl-free fields.
std::vector<SpectralField> lambda_inv_grad(const Lattice& lat, const SpectralField& v);

struct NonlinearOptions {
    bool dealias = true;
    double vacuum_margin_fraction = 0.1;  // margin = fraction·ρ̄
};

struct NonlinearTerms {
    SpectralField n1;               // −div(ρ̃u)
    std::vector<SpectralField> n2;  // −u·∇u − F(ρ̃)∇ρ̃ − α₃k(ρ̃)Δu − α₄k(ρ̃)∇div u
};

/// Pseudospectral N₁, N₂. Derivatives are spectral, products pointwise; with
/// dealiasing on, inputs and products are truncated by the 2/3 rule.
NonlinearTerms nonlinear_terms(SpectralGrid& sg, const SpectralState& state,
                               const Coefficients& coeffs, const PressureLaw& law,
                               const NonlinearOptions& opts = {});

/// Real-space convenience wrapper: returns (N₁, N₂ components).
std::pair<RealField, std::vector<RealField>> nonlinear_terms(SpectralGrid& sg,
                                                             const FieldState& state,
                                                             const Coefficients& coeffs,
                                                             const PressureLaw& law,
                                                             const NonlinearOptions& opts = {});

/// G = Qu − (α₁/(α₃+α₄))Δ⁻¹∇ρ̃, with the mean of ρ̃ dropped.
std::vector<RealField> effective_flux(SpectralGrid& sg, const FieldState& state,
                                      const Coefficients& coeffs);

struct UnstableDataSpec {
    double theta_bar = 0;                // Θ̄ ∈ (0, Θ/2]
    std::optional<double> zeta_bar;      // auto when absent
    double amplitude = 1.0;              // δ
    int min_shells = 8;
};

struct UnstableData {
    FieldState state;
    double zeta_bar = 0;
    double min_growth_in_support = 0;  // min Re λ₀ over the support
    int shells = 0;                    // distinct |ξ| values in the support
};

/// Smooth radial bump: 1 on | |ξ|−k₀ | ≤ ζ̄, 0 beyond 2ζ̄.
double bump_profile(double k, double k0, double zeta_bar);

// Real band-limited random data: Gaussian coefficients on 0 < |ξ| ≤ k_cut
// (retained, non-Nyquist), each of ρ̃ and u scaled to L² norm `amplitude`.
FieldState make_random_data(const GridSpec& grid, double k_cut, double amplitude,
                            std::uint64_t seed);

/// Largest ζ̄ ≤ k₀/4 with Re λ₊ ≥ Θ − Θ̄ on [k₀−2ζ̄, k₀+2ζ̄].
double select_zeta_bar(const Coefficients& coeffs, const GrowthSummary& summary,
                       double theta_bar);

/// Eigenvector data ρ̂₀ = δΨ/‖Ψ‖, v̂₀ = −δλ₀Ψ/(ρ̄|ξ|‖Ψ‖), u₀ = −Λ⁻¹∇v₀.
UnstableData make_unstable_data(const GridSpec& grid, const Coefficients& coeffs,
                                const GrowthSummary& summary, const UnstableDataSpec& spec);

}  // namespace yns
