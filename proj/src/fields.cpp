#include "yns/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "yns/error.hpp"

namespace yns {

namespace {
constexpr Complex kI{0.0, 1.0};
}

FieldState FieldState::zeros(const GridSpec& grid) {
    FieldState s;
    s.grid = grid;
    s.rho.assign(grid.total(), 0.0);
    s.u.assign(static_cast<std::size_t>(grid.dim), RealField(grid.total(), 0.0));
    return s;
}

bool FieldState::all_finite() const {
    auto finite = [](const RealField& f) {
        return std::all_of(f.begin(), f.end(), [](double v) { return std::isfinite(v); });
    };
    return finite(rho) && std::all_of(u.begin(), u.end(), finite);
}

SpectralState to_spectral(SpectralGrid& sg, const FieldState& s) {
    SpectralState out;
    out.rho = sg.forward(s.rho);
    for (const auto& c : s.u) out.u.push_back(sg.forward(c));
    return out;
}

FieldState to_physical(SpectralGrid& sg, const SpectralState& s) {
    FieldState out;
    out.grid = sg.spec();
    out.rho = sg.inverse(s.rho);
    for (const auto& c : s.u) out.u.push_back(sg.inverse(c));
    return out;
}

void check_vacuum(std::span<const double> rho, double rho_bar, double margin) {
    const double lowest = *std::min_element(rho.begin(), rho.end());
    if (!std::isfinite(lowest) || lowest <= -rho_bar + margin)
        throw VacuumError("non-vacuum guard failed: min rho_tilde=" + std::to_string(lowest) +
                          " <= -rho_bar+margin=" + std::to_string(-rho_bar + margin));
}

void dealias(const Lattice& lat, SpectralField& c) {
    for (std::size_t i = 0; i < c.size(); ++i)
        if (!lat.retained(i)) c[i] = 0.0;
}

void zero_nyquist(const Lattice& lat, SpectralField& c) {
    for (std::size_t i = 0; i < c.size(); ++i)
        if (lat.nyquist(i)) c[i] = 0.0;
}

SpectralField derivative(const Lattice& lat, const SpectralField& c, int axis) {
    SpectralField out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = kI * lat.xi_odd(axis, i) * c[i];
    return out;
}

SpectralField laplacian(const Lattice& lat, const SpectralField& c) {
    SpectralField out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = -lat.k2(i) * c[i];
    return out;
}

SpectralField divergence(const Lattice& lat, const std::vector<SpectralField>& u) {
    SpectralField out(lat.size(), 0.0);
    for (int a = 0; a < static_cast<int>(u.size()); ++a)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += kI * lat.xi_odd(a, i) * u[a][i];
    return out;
}

SpectralField bessel_potential(const Lattice& lat, const SpectralField& rho) {
    SpectralField out(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) out[i] = rho[i] / (1.0 + lat.k2(i));
    return out;
}

RealField bessel_potential(SpectralGrid& sg, std::span<const double> rho) {
    return sg.inverse(bessel_potential(sg.lattice(), sg.forward(rho)));
}

HelmholtzParts helmholtz_project(const Lattice& lat, const std::vector<SpectralField>& u) {
    const int d = static_cast<int>(u.size());
    HelmholtzParts parts;
    if (d == 1) {
        parts.solenoidal.assign(1, SpectralField(lat.size(), 0.0));
        parts.longitudinal = u;
        return parts;
    }
    parts.solenoidal = u;
    parts.longitudinal.assign(static_cast<std::size_t>(d), SpectralField(lat.size(), 0.0));
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const double k2 = lat.k2(i);
        if (k2 == 0.0) continue;
        Complex dot = 0.0;
        for (int a = 0; a < d; ++a) dot += lat.xi(a, i) * u[a][i];
        for (int a = 0; a < d; ++a) {
            const Complex q = lat.xi(a, i) * dot / k2;
            parts.longitudinal[a][i] = q;
            parts.solenoidal[a][i] = u[a][i] - q;
        }
    }
    return parts;
}

SpectralField lambda_div(const Lattice& lat, const std::vector<SpectralField>& u) {
    SpectralField v(lat.size(), 0.0);
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const double k = lat.k(i);
        if (k == 0.0) continue;
        Complex dot = 0.0;
        for (int a = 0; a < static_cast<int>(u.size()); ++a) dot += lat.xi_odd(a, i) * u[a][i];
        v[i] = kI * dot / k;
    }
    return v;
}

std::vector<SpectralField> lambda_inv_grad(const Lattice& lat, const SpectralField& v) {
    const int d = lat.grid().dim;
    std::vector<SpectralField> u(static_cast<std::size_t>(d), SpectralField(lat.size(), 0.0));
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const double k = lat.k(i);
        if (k == 0.0) continue;
        for (int a = 0; a < d; ++a) u[a][i] = -kI * (lat.xi_odd(a, i) / k) * v[i];
    }
    return u;
}

NonlinearTerms nonlinear_terms(SpectralGrid& sg, const SpectralState& state,
                               const Coefficients& coeffs, const PressureLaw& law,
                               const NonlinearOptions& opts) {
    const Lattice& lat = sg.lattice();
    const int d = sg.spec().dim;
    const std::size_t n = lat.size();
    auto truncate = [&](SpectralField& c) {
        if (opts.dealias) dealias(lat, c);
    };

    SpectralField rho_hat = state.rho;
    std::vector<SpectralField> u_hat = state.u;
    truncate(rho_hat);
    for (auto& c : u_hat) truncate(c);

    const RealField rho = sg.inverse(rho_hat);
    check_vacuum(rho, coeffs.rho_bar, opts.vacuum_margin_fraction * coeffs.rho_bar);

    std::vector<RealField> u, grad_rho, lap_u, grad_div;
    std::vector<std::vector<RealField>> grad_u(static_cast<std::size_t>(d));  // [a][b] = ∂_b u_a
    const SpectralField div_hat = divergence(lat, u_hat);
    for (int a = 0; a < d; ++a) {
        u.push_back(sg.inverse(u_hat[a]));
        grad_rho.push_back(sg.inverse(derivative(lat, rho_hat, a)));
        lap_u.push_back(sg.inverse(laplacian(lat, u_hat[a])));
        grad_div.push_back(sg.inverse(derivative(lat, div_hat, a)));
        for (int b = 0; b < d; ++b) grad_u[a].push_back(sg.inverse(derivative(lat, u_hat[a], b)));
    }

    NonlinearTerms out;
    out.n1.assign(n, 0.0);
    RealField work(n);
    for (int a = 0; a < d; ++a) {
        for (std::size_t i = 0; i < n; ++i) work[i] = rho[i] * u[a][i];
        SpectralField flux = sg.forward(work);
        truncate(flux);
        for (std::size_t i = 0; i < n; ++i) out.n1[i] -= kI * lat.xi_odd(a, i) * flux[i];
    }

    RealField f_rho(n), k_rho(n);
    for (std::size_t i = 0; i < n; ++i) {
        f_rho[i] = pressure_coupling(law, rho[i], coeffs.rho_bar);
        k_rho[i] = viscosity_defect(rho[i], coeffs.rho_bar);
    }
    for (int a = 0; a < d; ++a) {
        for (std::size_t i = 0; i < n; ++i) {
            double adv = 0.0;
            for (int b = 0; b < d; ++b) adv += u[b][i] * grad_u[a][b][i];
            work[i] = -adv - f_rho[i] * grad_rho[a][i] -
                      coeffs.alpha3 * k_rho[i] * lap_u[a][i] -
                      coeffs.alpha4 * k_rho[i] * grad_div[a][i];
        }
        SpectralField term = sg.forward(work);
        truncate(term);
        out.n2.push_back(std::move(term));
    }
    return out;
}

std::pair<RealField, std::vector<RealField>> nonlinear_terms(SpectralGrid& sg,
                                                             const FieldState& state,
                                                             const Coefficients& coeffs,
                                                             const PressureLaw& law,
                                                             const NonlinearOptions& opts) {
    const NonlinearTerms t = nonlinear_terms(sg, to_spectral(sg, state), coeffs, law, opts);
    std::vector<RealField> n2;
    for (const auto& c : t.n2) n2.push_back(sg.inverse(c));
    return {sg.inverse(t.n1), std::move(n2)};
}

std::vector<RealField> effective_flux(SpectralGrid& sg, const FieldState& state,
                                      const Coefficients& coeffs) {
    const Lattice& lat = sg.lattice();
    const SpectralState s = to_spectral(sg, state);
    const HelmholtzParts parts = helmholtz_project(lat, s.u);
    const double factor = coeffs.alpha1 / (coeffs.alpha3 + coeffs.alpha4);
    std::vector<RealField> g;
    for (int a = 0; a < sg.spec().dim; ++a) {
        SpectralField c = parts.longitudinal[a];
        for (std::size_t i = 0; i < lat.size(); ++i) {
            if (lat.k2(i) == 0.0) continue;
            c[i] += factor * kI * lat.xi_odd(a, i) / lat.k2(i) * s.rho[i];
        }
        g.push_back(sg.inverse(c));
    }
    return g;
}

double bump_profile(double k, double k0, double zeta_bar) {
    const double dist = std::abs(k - k0);
    if (dist <= zeta_bar) return 1.0;
    if (dist >= 2.0 * zeta_bar) return 0.0;
    const double r = (dist - zeta_bar) / zeta_bar;
    return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

FieldState make_random_data(const GridSpec& grid, double k_cut, double amplitude,
                            std::uint64_t seed) {
    SpectralGrid sg(grid);
    const Lattice& lat = sg.lattice();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    auto draw = [&] {
        SpectralField c(lat.size(), 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            const std::size_t j = lat.mirror(i);
            if (j < i || lat.k(i) == 0.0 || lat.k(i) > k_cut || !lat.retained(i) || lat.nyquist(i))
                continue;
            c[i] = Complex(normal(rng), j == i ? 0.0 : normal(rng));
            c[j] = std::conj(c[i]);
        }
        const double norm = spectral_l2_norm(grid, c);
        if (norm > 0.0)
            for (auto& x : c) x *= amplitude / norm;
        return c;
    };
    SpectralState s;
    s.rho = draw();
    for (int a = 0; a < grid.dim; ++a) s.u.push_back(draw());
    if (grid.dim > 0) {
        double total = 0.0;
        for (const auto& c : s.u) total += std::pow(spectral_l2_norm(grid, c), 2);
        for (auto& c : s.u)
            for (auto& x : c) x *= amplitude / std::sqrt(total);
    }
    return to_physical(sg, s);
}

namespace {

double min_growth_on(const Coefficients& coeffs, double lo, double hi) {
    double worst = std::numeric_limits<double>::infinity();
    constexpr int samples = 257;
    for (int i = 0; i < samples; ++i) {
        const double k = lo + (hi - lo) * i / (samples - 1);
        worst = std::min(worst, analyze_mode(k, coeffs).lambda_plus.real());
    }
    return worst;
}

}  // namespace

double select_zeta_bar(const Coefficients& coeffs, const GrowthSummary& summary,
                       double theta_bar) {
    const double target = summary.theta - theta_bar;
    const double k0 = summary.k0;
    auto ok = [&](double z) { return min_growth_on(coeffs, k0 - 2 * z, k0 + 2 * z) >= target; };
    double hi = 0.25 * k0;
    if (ok(hi)) return hi;
    double lo = 0.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

UnstableData make_unstable_data(const GridSpec& grid, const Coefficients& coeffs,
                                const GrowthSummary& summary, const UnstableDataSpec& spec) {
    if (classify_regime(coeffs) != Regime::Unstable)
        throw RegimeError("unstable initial data needs P'(rho_bar)+gamma*rho_bar<0");
    if (!(spec.theta_bar > 0.0) || spec.theta_bar > 0.5 * summary.theta * (1.0 + 1e-12))
        throw ValidationError("theta_bar must lie in (0, Theta/2]");
    if (!(spec.amplitude > 0.0)) throw ValidationError("amplitude delta must be > 0");
    const double zeta = spec.zeta_bar.value_or(select_zeta_bar(coeffs, summary, spec.theta_bar));
    if (!(zeta > 0.0) || zeta > 0.25 * summary.k0 * (1.0 + 1e-12))
        throw ValidationError("zeta_bar must lie in (0, |xi_0|/4]");

    SpectralGrid sg(grid);
    const Lattice& lat = sg.lattice();
    if (summary.k0 + 2.0 * zeta >= lat.k_max_retained())
        throw ResolutionError("bump annulus exceeds the retained lattice band");

    const std::size_t n = lat.size();
    SpectralField rho_hat(n, 0.0), v_hat(n, 0.0);
    std::set<std::int64_t> shells;
    double min_growth = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double k = lat.k(i);
        if (k == 0.0 || lat.nyquist(i)) continue;
        const double psi = bump_profile(k, summary.k0, zeta);
        if (psi == 0.0) continue;
        const Complex lambda0 = analyze_mode(k, coeffs).lambda_plus;
        rho_hat[i] = psi;
        v_hat[i] = -lambda0 * psi / (coeffs.rho_bar * k);
        shells.insert(lat.m2(i));
        min_growth = std::min(min_growth, lambda0.real());
    }
    if (static_cast<int>(shells.size()) < spec.min_shells)
        throw ResolutionError("only " + std::to_string(shells.size()) +
                              " lattice shells intersect the bump support; need " +
                              std::to_string(spec.min_shells));

    const double scale = spec.amplitude / spectral_l2_norm(grid, rho_hat);
    std::vector<SpectralField> u_hat = lambda_inv_grad(lat, v_hat);

    auto symmetrize = [&](SpectralField& c) {
        SpectralField sym(n);
        for (std::size_t i = 0; i < n; ++i)
            sym[i] = 0.5 * (c[i] + std::conj(c[lat.mirror(i)])) * scale;
        c = std::move(sym);
    };
    symmetrize(rho_hat);
    for (auto& c : u_hat) symmetrize(c);

    UnstableData out;
    out.state = to_physical(sg, SpectralState{rho_hat, u_hat});
    out.zeta_bar = zeta;
    out.min_growth_in_support = min_growth;
    out.shells = static_cast<int>(shells.size());
    return out;
}

}  // namespace yns
