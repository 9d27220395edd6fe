#pragma once

// Time integration of the perturbation system on the periodic grid. The
// linear part is advanced exactly per mode; the nonlinear scheme is a
// second-order exponential integrator built on the same propagator.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "yns/fields.hpp"
#include "yns/model.hpp"

namespace yns {

enum class Scheme { LinearExact, EtdRk2 };

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);  // ValidationError

struct SolverConfig {
    double dt = 1e-2;
    double t_end = 1.0;
    Scheme scheme = Scheme::EtdRk2;
    bool dealias = true;
    int snapshot_every = 0;  // 0: no snapshots
    int norm_every = 1;
    double vacuum_margin = 0.1;  // fraction of ρ̄
    double lp_p = 4.0;
    bool energy = false;  // sample 𝓔∞, 𝓔₁
    int energy_j0 = 0;
    double cfl = 0.5;
    std::optional<double> stop_at_rho_l2;  // finish early once ‖ρ̃‖_{L²} reaches it

    void validate() const;  // ValidationError
    // dt shrunk so that t_end is an integer number of steps.
    double effective_dt() const;
    long steps() const;
};

struct Sample {
    double t = 0;
    double rho_l2 = 0;
    double u_l2 = 0;
    double rho_lp = 0;
    double u_lp = 0;
    double mass = 0;                 // ∫ρ̃
    std::vector<double> momentum;    // ∫(ρ̃+ρ̄)u
    std::optional<double> e_inf;
    std::optional<double> e_one;

    double l2() const;  // ‖(ρ̃, u)‖_{L²}
};

struct RunRecord {
    nlohmann::json manifest;
    std::vector<Sample> samples;
    std::vector<std::string> snapshots;
    bool aborted = false;
    std::string abort_kind;
    std::string abort_reason;
    bool stopped_early = false;
    FieldState final_state;
};

// Fixed-dt stepper holding the per-mode operators for one (grid, coeffs, dt).
class Stepper {
public:
    Stepper(const GridSpec& grid, const Coefficients& coeffs, const PressureLaw& law, double dt,
            Scheme scheme, const NonlinearOptions& opts = {});
    ~Stepper();
    Stepper(const Stepper&) = delete;
    Stepper& operator=(const Stepper&) = delete;

    // Largest |λ| over retained modes.
    double max_rate() const;
    // CflError when the step violates either CFL bound for this state.
    void check_cfl(const SpectralState& state, double cfl) const;
    void step(SpectralState& state);

    SpectralGrid& grid();

private:
    struct Impl;
    Impl* impl_;
};

FieldState step_linear(const FieldState& state, double dt, const Coefficients& coeffs);
FieldState step_nonlinear(const FieldState& state, double dt, const Coefficients& coeffs,
                          const PressureLaw& law, const NonlinearOptions& opts = {});

struct RunHooks {
    // Called every snapshot_every steps; returns a reference stored in the record.
    std::function<std::string(const FieldState&, double t, long step)> snapshot;
};

RunRecord run(const FieldState& initial, const SolverConfig& config, const Coefficients& coeffs,
              const PressureLaw& law, const RunHooks& hooks = {}, nlohmann::json manifest = {});

}  // namespace yns
