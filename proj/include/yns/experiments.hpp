#pragma once

// Drivers that turn the linear and nonlinear theory into measured numbers.

#include <optional>
#include <string>
#include <vector>

#include "yns/fields.hpp"
#include "yns/fit.hpp"
#include "yns/solver.hpp"
#include "yns/spectral.hpp"

namespace yns {

struct DecaySpec {
    int dim = 3;
    double p = 2.0;
    double sigma = 1.5;
    double sigma1 = 0.0;
    double t_min = 1e2;
    double t_max = 1e4;
    int n_times = 21;       // log-spaced
    double fit_lo = 1e2;
    double fit_hi = 1e4;
    bool heat_surrogate = false;  // coupling removed, data carried by v
    double rel_tol = 1e-9;
    int refinement = 0;     // each radial panel split into 2^refinement pieces

    // ValidationError naming the violated exponent range.
    void validate() const;
    // −(d/2)(1/2 − 1/p) − (σ + σ₁)/2
    double theorem_exponent() const;
    // Exponent of ‖Λ^{σ₁}U(t)‖_{L²} for the borderline profile.
    double l2_exponent() const;
    std::vector<double> times() const;
};

struct DecaySeries {
    std::vector<double> t;
    std::vector<double> norm;  // ‖Λ^{σ₁}U(t)‖_{L²}
    LineFit fit;
    double predicted = 0;
    double theorem_exponent = 0;
};

// RegimeError unless stable (ignored for the heat surrogate); QuadratureError
// when the adaptive error estimate misses rel_tol.
DecaySeries linear_decay_quadrature(const Coefficients& coeffs, const DecaySpec& spec,
                                    int threads = 1);

// Grid version of the borderline profile: ρ̂ ∝ |ξ|^{σ−d/2} on 0 < |ξ| ≤ 1, u = 0,
// scaled to ‖ρ̃‖_{L²} = amplitude. ResolutionError if the unit ball is not retained.
FieldState make_decay_data(const GridSpec& grid, double sigma, double amplitude);

struct DecayFit {
    LineFit fit;
    double gap_time = 0;  // L²/(4π²η)
    std::string caveat;
};

// WindowError when fit_hi exceeds the torus spectral-gap time.
DecayFit nonlinear_decay_fit(const RunRecord& record, const DecaySpec& spec, const GridSpec& grid,
                             const Coefficients& coeffs);

struct SandwichRow {
    double t = 0;
    double rho_l2 = 0, rho_lower = 0, rho_upper = 0;
    double u_l2 = 0, u_lower = 0, u_upper = 0;
    bool ok = true;
};

struct SandwichViolation {
    double t = 0;
    std::string bound;  // rho_lower | rho_upper | u_lower | u_upper
    double slack = 0;   // relative amount by which the bound is missed
};

struct InstabilityReport {
    GrowthSummary summary;
    double theta_bar = 0;
    double zeta_bar = 0;
    int shells = 0;
    double min_growth_in_support = 0;
    double tol = 0;               // 1e−6 + shell correction at t_end
    double shell_correction = 0;  // e^{max(0, Θ−Θ̄−min growth)·t_end} − 1
    std::vector<SandwichRow> rows;
    std::optional<SandwichViolation> first_violation;
    // ‖ρ̃(t_end)‖/‖ρ̃₀‖ for the given ζ̄ and for ζ̄/2
    double ratio = 0;
    std::optional<double> narrowed_ratio;

    bool passed() const { return !first_violation.has_value(); }
};

struct InstabilitySpec {
    UnstableDataSpec data;
    double t_end = 10.0;
    double sample_dt = 0.1;
    bool check_narrowing = true;
};

InstabilityReport instability_linear_experiment(const Coefficients& coeffs, const GridSpec& grid,
                                                const InstabilitySpec& spec);

struct EscapeSpec {
    double epsilon0 = 0.1;
    std::vector<double> deltas{1e-3, 1e-4, 1e-5, 1e-6};
    double theta_bar = 0;  // 0 selects Θ/2
    std::optional<double> zeta_bar;
    double t_cap = 200.0;
    double dt = 0.05;

    void validate() const;  // ε₀ > 0, deltas strictly decreasing and positive
};

struct EscapeRow {
    double delta = 0;
    bool escaped = false;
    double t_escape = 0;
    double predicted = 0;  // (1/Θ) ln(2ε₀/δ)
    double rho_l2 = 0;     // at T^δ
    double u_l2 = 0;
    bool aborted = false;
    std::string error;     // NoEscapeError or abort message
};

struct EscapeReport {
    GrowthSummary summary;
    double theta_bar = 0;
    double zeta_bar = 0;
    double epsilon0_u = 0;  // ε₀Θ/(ρ̄k₀)
    std::vector<EscapeRow> rows;
    std::optional<LineFit> fit;  // T^δ against ln(1/δ)
    double slope_rel_error = 0;  // |slope·Θ − 1|
    bool monotone = false;
    bool u_threshold_met = false;  // ‖u(T^δ)‖ ≥ ε₀′/e for every escaped δ
    std::string scope_note;
};

EscapeReport escape_time_experiment(const Coefficients& coeffs, const PressureLaw& law,
                                    const GridSpec& grid, const EscapeSpec& spec,
                                    int threads = 1);

}  // namespace yns
