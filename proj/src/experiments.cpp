#include "yns/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "yns/error.hpp"

namespace yns {

namespace {

// Runs body(i) for i in [0, n) on up to `threads` workers.
template <class Body>
void parallel_for(int n, int threads, Body&& body) {
    threads = std::clamp(threads, 1, std::max(n, 1));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

double sphere_area(int d) {
    switch (d) {
        case 1: return 2.0;
        case 2: return 2.0 * std::numbers::pi;
        default: return 4.0 * std::numbers::pi;
    }
}

}  // namespace

void DecaySpec::validate() const {
    if (dim < 1 || dim > 3) throw ValidationError("decay: dim must be 1, 2 or 3");
    if (!(p >= 1.0)) throw ValidationError("decay: p must be >= 1");
    const double sigma0 = 2.0 * dim / p - 0.5 * dim;
    if (!(sigma > 1.0 - 0.5 * dim && sigma <= sigma0 + 1e-12))
        throw ValidationError("decay: sigma must satisfy 1-d/2 < sigma <= 2d/p-d/2 = " +
                              std::to_string(sigma0));
    const double lo = -sigma - dim * (0.5 - 1.0 / p);
    const double hi = dim / p - 1.0;
    if (!(sigma1 > lo && sigma1 <= hi + 1e-12))
        throw ValidationError("decay: sigma1 must satisfy -sigma-d(1/2-1/p) < sigma1 <= d/p-1");
    if (!(t_min > 0.0 && t_max > t_min)) throw ValidationError("decay: need 0 < t_min < t_max");
    if (n_times < 2) throw ValidationError("decay: n_times must be >= 2");
    if (!(fit_lo < fit_hi)) throw ValidationError("decay: fit window is empty");
    if (!(rel_tol > 0.0)) throw ValidationError("decay: rel_tol must be > 0");
    if (refinement < 0 || refinement > 6) throw ValidationError("decay: refinement must be in [0, 6]");
}

double DecaySpec::theorem_exponent() const {
    return -0.5 * dim * (0.5 - 1.0 / p) - 0.5 * (sigma + sigma1);
}

double DecaySpec::l2_exponent() const {
    return -0.5 * (sigma + sigma1);
}

std::vector<double> DecaySpec::times() const {
    std::vector<double> t(static_cast<std::size_t>(n_times));
    const double a = std::log(t_min), b = std::log(t_max);
    for (int i = 0; i < n_times; ++i) t[i] = std::exp(a + (b - a) * i / (n_times - 1));
    t.front() = t_min;
    t.back() = t_max;
    return t;
}

DecaySeries linear_decay_quadrature(const Coefficients& coeffs, const DecaySpec& spec,
                                    int threads) {
    spec.validate();
    if (!spec.heat_surrogate && classify_regime(coeffs) != Regime::Stable)
        throw RegimeError("decay quadrature needs the stable regime P'(rho_bar)+gamma*rho_bar>0");

    const double power = 2.0 * (spec.sigma + spec.sigma1);  // integrand ~ k^{power−1} near 0
    const double area = sphere_area(spec.dim);

    DecaySeries out;
    out.t = spec.times();
    out.norm.assign(out.t.size(), 0.0);
    out.predicted = spec.l2_exponent();
    out.theorem_exponent = spec.theorem_exponent();

    auto squared_norm = [&](double t) {
        // Substituting k = e^y: ∫₀¹ f(k) dk = ∫_{−∞}^0 f(e^y) e^y dy. Panels are one
        // octave wide; below k_lo the propagator is the identity to round-off and
        // the remaining piece k_lo^{power}/power is added in closed form.
        auto integrand = [&](double y) {
            const double k = std::exp(y);
            double amp2;
            if (spec.heat_surrogate) {
                amp2 = std::exp(-2.0 * coeffs.eta * k * k * t);
            } else {
                const Propagator2x2 pr = propagator(k, t, coeffs);
                amp2 = pr.m_rr * pr.m_rr + pr.m_vr * pr.m_vr;
            }
            return amp2 * std::pow(k, power);
        };
        const double scale = 1.0 / std::sqrt(coeffs.eta * t);
        const double k_lo = std::min(1.0, scale) * 1e-7;
        const double y_lo = std::log(k_lo);
        const int octaves = static_cast<int>(std::ceil(-y_lo / std::numbers::ln2));
        const int pieces = octaves << spec.refinement;
        const double width = -y_lo / pieces;
        double total = std::pow(k_lo, power) / power;
        double err_sum = 0.0;
        for (int i = 0; i < pieces; ++i) {
            double err = 0.0;
            total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                integrand, y_lo + i * width, y_lo + (i + 1) * width, 15, 0.1 * spec.rel_tol, &err);
            err_sum += err;
        }
        if (!(err_sum <= spec.rel_tol * total) || !std::isfinite(total))
            throw QuadratureError("adaptive refinement stalled at t=" + std::to_string(t) +
                                  ": error " + std::to_string(err_sum) + " vs value " +
                                  std::to_string(total));
        return area * total;
    };

    parallel_for(static_cast<int>(out.t.size()), threads,
                 [&](int i) { out.norm[i] = std::sqrt(squared_norm(out.t[i])); });

    std::vector<double> ft, fn;
    for (std::size_t i = 0; i < out.t.size(); ++i)
        if (out.t[i] >= spec.fit_lo * (1 - 1e-12) && out.t[i] <= spec.fit_hi * (1 + 1e-12)) {
            ft.push_back(out.t[i]);
            fn.push_back(out.norm[i]);
        }
    out.fit = fit_power_law(ft, fn);
    return out;
}

FieldState make_decay_data(const GridSpec& grid, double sigma, double amplitude) {
    SpectralGrid sg(grid);
    const Lattice& lat = sg.lattice();
    if (lat.k_max_retained() < 1.0) throw ResolutionError("decay profile needs |xi| <= 1 retained");
    if (grid.length <= 2.0 * std::numbers::pi)
        throw ResolutionError("decay profile needs a box longer than 2 pi to sample 0 < |xi| < 1");
    SpectralState s;
    s.rho.assign(lat.size(), 0.0);
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const double k = lat.k(i);
        if (k > 0.0 && k <= 1.0 && !lat.nyquist(i)) s.rho[i] = std::pow(k, sigma - 0.5 * grid.dim);
    }
    const double norm = spectral_l2_norm(grid, s.rho);
    for (auto& c : s.rho) c *= amplitude / norm;
    s.u.assign(static_cast<std::size_t>(grid.dim), SpectralField(lat.size(), 0.0));
    return to_physical(sg, s);
}

DecayFit nonlinear_decay_fit(const RunRecord& record, const DecaySpec& spec, const GridSpec& grid,
                             const Coefficients& coeffs) {
    DecayFit out;
    out.gap_time = grid.length * grid.length / (4.0 * std::numbers::pi * std::numbers::pi * coeffs.eta);
    if (spec.fit_hi > out.gap_time)
        throw WindowError("fit window end " + std::to_string(spec.fit_hi) +
                          " exceeds the spectral-gap time L^2/(4 pi^2 eta) = " +
                          std::to_string(out.gap_time));
    std::vector<double> x, y;
    for (const auto& s : record.samples)
        if (s.t >= spec.fit_lo && s.t <= spec.fit_hi) {
            x.push_back(1.0 + s.t);
            y.push_back(s.l2());
        }
    out.fit = fit_power_law(x, y);
    out.caveat = "periodic box: algebraic decay only holds below the spectral-gap time " +
                 std::to_string(out.gap_time);
    return out;
}

InstabilityReport instability_linear_experiment(const Coefficients& coeffs, const GridSpec& grid,
                                                const InstabilitySpec& spec) {
    if (classify_regime(coeffs) != Regime::Unstable)
        throw RegimeError("instability experiment needs P'(rho_bar)+gamma*rho_bar<0");
    if (!(spec.t_end > 0.0) || !(spec.sample_dt > 0.0))
        throw ValidationError("instability: t_end and sample_dt must be > 0");

    InstabilityReport rep;
    rep.summary = max_growth(coeffs);
    UnstableDataSpec ds = spec.data;
    if (ds.theta_bar == 0.0) ds.theta_bar = 0.5 * rep.summary.theta;
    const UnstableData data = make_unstable_data(grid, coeffs, rep.summary, ds);
    rep.theta_bar = ds.theta_bar;
    rep.zeta_bar = data.zeta_bar;
    rep.shells = data.shells;
    rep.min_growth_in_support = data.min_growth_in_support;

    const double theta = rep.summary.theta;
    const double lower_rate = theta - rep.theta_bar;
    rep.shell_correction =
        std::expm1(std::max(0.0, lower_rate - data.min_growth_in_support) * spec.t_end);
    rep.tol = 1e-6 + rep.shell_correction;

    SolverConfig cfg;
    cfg.scheme = Scheme::LinearExact;
    cfg.dt = spec.sample_dt;
    cfg.t_end = spec.t_end;
    cfg.lp_p = 2.0;
    const RunRecord rec = run(data.state, cfg, coeffs, GammaLaw{});
    const Sample& s0 = rec.samples.front();

    for (const auto& s : rec.samples) {
        SandwichRow row;
        row.t = s.t;
        row.rho_l2 = s.rho_l2;
        row.u_l2 = s.u_l2;
        row.rho_lower = std::exp(lower_rate * s.t) * s0.rho_l2;
        row.rho_upper = std::exp(theta * s.t) * s0.rho_l2;
        row.u_lower = std::exp(lower_rate * s.t) * s0.u_l2;
        row.u_upper = std::exp(theta * s.t) * s0.u_l2;
        auto check = [&](double value, double bound, bool is_lower, const char* name) {
            const double slack = is_lower ? (bound * (1 - rep.tol) - value) / bound
                                          : (value - bound * (1 + rep.tol)) / bound;
            if (slack > 0.0) {
                row.ok = false;
                if (!rep.first_violation) rep.first_violation = SandwichViolation{s.t, name, slack};
            }
        };
        check(row.rho_l2, row.rho_lower, true, "rho_lower");
        check(row.rho_l2, row.rho_upper, false, "rho_upper");
        check(row.u_l2, row.u_lower, true, "u_lower");
        check(row.u_l2, row.u_upper, false, "u_upper");
        rep.rows.push_back(row);
    }
    rep.ratio = rec.samples.back().rho_l2 / s0.rho_l2;

    if (spec.check_narrowing) {
        UnstableDataSpec narrow = ds;
        narrow.zeta_bar = 0.5 * data.zeta_bar;
        const UnstableData nd = make_unstable_data(grid, coeffs, rep.summary, narrow);
        const FieldState end = step_linear(nd.state, spec.t_end, coeffs);
        rep.narrowed_ratio = l2_norm(grid, end.rho) / l2_norm(grid, nd.state.rho);
    }
    return rep;
}

void EscapeSpec::validate() const {
    if (!(epsilon0 > 0.0)) throw ValidationError("escape: epsilon0 must be > 0");
    if (deltas.empty()) throw ValidationError("escape: delta list is empty");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0)) throw ValidationError("escape: deltas must be > 0");
        if (i > 0 && !(deltas[i] < deltas[i - 1]))
            throw ValidationError("escape: deltas must be strictly decreasing");
    }
    if (!(t_cap > 0.0)) throw ValidationError("escape: t_cap must be > 0");
    if (!(dt > 0.0)) throw ValidationError("escape: dt must be > 0");
    if (theta_bar < 0.0) throw ValidationError("escape: theta_bar must be >= 0");
}

EscapeReport escape_time_experiment(const Coefficients& coeffs, const PressureLaw& law,
                                    const GridSpec& grid, const EscapeSpec& spec, int threads) {
    spec.validate();
    if (classify_regime(coeffs) != Regime::Unstable)
        throw RegimeError("escape experiment needs P'(rho_bar)+gamma*rho_bar<0");

    EscapeReport rep;
    rep.summary = max_growth(coeffs);
    const double theta = rep.summary.theta;
    rep.theta_bar = spec.theta_bar > 0.0 ? spec.theta_bar : 0.5 * theta;
    rep.zeta_bar = spec.zeta_bar.value_or(select_zeta_bar(coeffs, rep.summary, rep.theta_bar));
    rep.epsilon0_u = spec.epsilon0 * theta / (coeffs.rho_bar * rep.summary.k0);
    rep.scope_note = grid.dim == 3 ? "three-dimensional: the setting the escape estimate is stated for"
                                   : "extrapolated below three dimensions (estimate stated for d=3)";

    rep.rows.resize(spec.deltas.size());
    parallel_for(static_cast<int>(spec.deltas.size()), threads, [&](int i) {
        EscapeRow& row = rep.rows[i];
        row.delta = spec.deltas[i];
        row.predicted = std::log(2.0 * spec.epsilon0 / row.delta) / theta;
        UnstableDataSpec ds;
        ds.theta_bar = rep.theta_bar;
        ds.zeta_bar = rep.zeta_bar;
        ds.amplitude = row.delta;
        const UnstableData data = make_unstable_data(grid, coeffs, rep.summary, ds);

        SolverConfig cfg;
        cfg.scheme = Scheme::EtdRk2;
        cfg.dt = spec.dt;
        cfg.t_end = spec.t_cap;
        cfg.lp_p = 2.0;
        cfg.stop_at_rho_l2 = spec.epsilon0;
        const RunRecord rec = run(data.state, cfg, coeffs, law);
        const Sample& last = rec.samples.back();
        row.rho_l2 = last.rho_l2;
        row.u_l2 = last.u_l2;
        row.aborted = rec.aborted;
        if (rec.stopped_early) {
            row.escaped = true;
            row.t_escape = last.t;
        } else if (rec.aborted) {
            row.error = rec.abort_kind + ": " + rec.abort_reason;
        } else {
            row.error = NoEscapeError("no escape before t_cap=" + std::to_string(spec.t_cap) +
                                      " for delta=" + std::to_string(row.delta))
                            .what();
        }
    });

    std::vector<double> x, y;
    bool u_ok = true;
    for (const auto& r : rep.rows) {
        if (!r.escaped) continue;
        x.push_back(std::log(1.0 / r.delta));
        y.push_back(r.t_escape);
        u_ok = u_ok && r.u_l2 >= rep.epsilon0_u / std::numbers::e;
    }
    rep.u_threshold_met = u_ok && !x.empty();
    if (x.size() >= 2) {
        rep.fit = fit_line(x, y);
        rep.slope_rel_error = std::abs(rep.fit->slope * theta - 1.0);
    }
    rep.monotone = x.size() == rep.rows.size() && !x.empty();
    for (std::size_t i = 1; i < y.size(); ++i) rep.monotone = rep.monotone && y[i] > y[i - 1];
    return rep;
}

}  // namespace yns
