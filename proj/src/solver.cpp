#include "yns/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "yns/error.hpp"
#include "yns/lp_besov.hpp"
#include "yns/spectral.hpp"

namespace yns {

namespace {

constexpr Complex kI{0.0, 1.0};

// φ₁(z) = (e^z − 1)/z and φ₂(z) = (e^z − 1 − z)/z².
std::pair<double, double> scalar_phi(double z) {
    if (std::abs(z) < 1e-2) {
        const double z2 = z * z, z3 = z2 * z, z4 = z3 * z;
        return {1.0 + z / 2 + z2 / 6 + z3 / 24 + z4 / 120,
                0.5 + z / 6 + z2 / 24 + z3 / 120 + z4 / 720};
    }
    const double em1 = std::expm1(z);
    return {em1 / z, (em1 - z) / (z * z)};
}

// Per-|ξ|² operators for one step h.
struct ModeOps {
    double k = 0;
    Matrix2 e;             // e^{hA}
    Matrix2 phi1, phi2;    // φ₁(hA), φ₂(hA)
    double es = 1, phi1s = 1, phi2s = 0.5;  // solenoidal scalar counterparts
};

ModeOps build_ops(double k, double h, const Coefficients& c, bool with_phi) {
    ModeOps ops;
    ops.k = k;
    const Propagator2x2 p = propagator(k, h, c);
    ops.e = p.matrix();
    ops.es = solenoidal_factor(k, h, c);
    if (!with_phi) return ops;
    const auto [s1, s2] = scalar_phi(-c.alpha3 * k * k * h);
    ops.phi1s = s1;
    ops.phi2s = s2;
    if (k == 0.0) {
        ops.phi1 = Matrix2::identity();
        ops.phi2 = {0.5, 0, 0, 0.5};
        return ops;
    }
    const Matrix2 a = linear_symbol(k, c);
    Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
    m(0, 0) = h * a.a11;
    m(0, 1) = h * a.a12;
    m(1, 0) = h * a.a21;
    m(1, 1) = h * a.a22;
    m.block<2, 2>(0, 2).setIdentity();
    m.block<2, 2>(2, 4).setIdentity();
    const Eigen::Matrix<double, 6, 6> x = m.exp();
    ops.phi1 = {x(0, 2), x(0, 3), x(1, 2), x(1, 3)};
    ops.phi2 = {x(0, 4), x(0, 5), x(1, 4), x(1, 5)};
    return ops;
}

}  // namespace

const char* to_string(Scheme s) { return s == Scheme::LinearExact ? "linear-exact" : "etd-rk2"; }

Scheme scheme_from_string(const std::string& s) {
    if (s == "linear-exact") return Scheme::LinearExact;
    if (s == "etd-rk2") return Scheme::EtdRk2;
    throw ValidationError("unknown scheme '" + s + "' (expected linear-exact or etd-rk2)");
}

void SolverConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be > 0");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ValidationError("t_end must be >= 0");
    if (norm_every < 1) throw ValidationError("norm_every must be >= 1");
    if (snapshot_every < 0) throw ValidationError("snapshot_every must be >= 0");
    if (!(vacuum_margin > 0.0 && vacuum_margin < 1.0))
        throw ValidationError("vacuum_margin must lie in (0, 1)");
    if (!(lp_p >= 1.0)) throw ValidationError("lp_p must be >= 1");
    if (!(cfl > 0.0)) throw ValidationError("cfl must be > 0");
}

long SolverConfig::steps() const {
    if (t_end == 0.0) return 0;
    return static_cast<long>(std::ceil(t_end / dt - 1e-9));
}

double SolverConfig::effective_dt() const {
    const long n = steps();
    return n == 0 ? dt : t_end / static_cast<double>(n);
}

double Sample::l2() const { return std::hypot(rho_l2, u_l2); }

struct Stepper::Impl {
    SpectralGrid sg;
    Coefficients coeffs;
    PressureLaw law;
    double h;
    Scheme scheme;
    NonlinearOptions opts;
    std::vector<ModeOps> ops;
    std::vector<std::uint32_t> op_of;  // lattice index → ops index
    // longitudinal unit vector ξ'/|ξ| per axis, 0 at ξ=0
    std::vector<std::vector<double>> dir;
    double max_rate = 0;

    Impl(const GridSpec& g, const Coefficients& c, const PressureLaw& l, double dt, Scheme s,
         const NonlinearOptions& o)
        : sg(g), coeffs(c), law(l), h(dt), scheme(s), opts(o) {
        const Lattice& lat = sg.lattice();
        const int d = g.dim;
        std::map<std::int64_t, std::uint32_t> index;
        op_of.resize(lat.size());
        dir.assign(static_cast<std::size_t>(d), std::vector<double>(lat.size(), 0.0));
        for (std::size_t i = 0; i < lat.size(); ++i) {
            auto [it, fresh] = index.try_emplace(lat.m2(i), static_cast<std::uint32_t>(ops.size()));
            if (fresh) ops.push_back(build_ops(lat.k(i), h, c, s == Scheme::EtdRk2));
            op_of[i] = it->second;
            const double k = lat.k(i);
            if (k > 0.0)
                for (int a = 0; a < d; ++a) dir[a][i] = lat.xi_odd(a, i) / k;
            if (lat.retained(i) && !lat.nyquist(i)) {
                const ModeAnalysis ma = analyze_mode(k, c);
                max_rate = std::max({max_rate, std::abs(ma.lambda_plus), std::abs(ma.lambda_minus),
                                     c.alpha3 * k * k});
            }
        }
    }

    // Splits û into (v̂, Pû) at mode i.
    void split(const std::vector<SpectralField>& u, std::size_t i, Complex& v,
               std::array<Complex, 3>& p) const {
        const int d = static_cast<int>(u.size());
        Complex dot = 0.0;
        for (int a = 0; a < d; ++a) dot += dir[a][i] * u[a][i];
        v = kI * dot;
        for (int a = 0; a < d; ++a) p[a] = u[a][i] - dir[a][i] * dot;
    }

    void join(std::vector<SpectralField>& u, std::size_t i, Complex v,
              const std::array<Complex, 3>& p) const {
        for (std::size_t a = 0; a < u.size(); ++a) u[a][i] = -kI * dir[a][i] * v + p[a];
    }

    void zero_nyquist_state(SpectralState& s) const {
        const Lattice& lat = sg.lattice();
        zero_nyquist(lat, s.rho);
        for (auto& c : s.u) zero_nyquist(lat, c);
    }

    void linear(SpectralState& s) const {
        const std::size_t n = s.rho.size();
        Complex v;
        std::array<Complex, 3> p{};
        for (std::size_t i = 0; i < n; ++i) {
            const ModeOps& o = ops[op_of[i]];
            split(s.u, i, v, p);
            const Complex r = s.rho[i];
            s.rho[i] = o.e.a11 * r + o.e.a12 * v;
            v = o.e.a21 * r + o.e.a22 * v;
            for (auto& x : p) x *= o.es;
            join(s.u, i, v, p);
        }
    }

    NonlinearTerms terms(const SpectralState& s) {
        return nonlinear_terms(sg, s, coeffs, law, opts);
    }

    void etd(SpectralState& s) {
        const std::size_t n = s.rho.size();
        const NonlinearTerms n0 = terms(s);
        SpectralState a = s;
        Complex v, nv;
        std::array<Complex, 3> p{}, np{};
        for (std::size_t i = 0; i < n; ++i) {
            const ModeOps& o = ops[op_of[i]];
            split(s.u, i, v, p);
            split(n0.n2, i, nv, np);
            const Complex r = s.rho[i], nr = n0.n1[i];
            a.rho[i] = o.e.a11 * r + o.e.a12 * v + h * (o.phi1.a11 * nr + o.phi1.a12 * nv);
            const Complex av = o.e.a21 * r + o.e.a22 * v + h * (o.phi1.a21 * nr + o.phi1.a22 * nv);
            for (std::size_t c = 0; c < s.u.size(); ++c) p[c] = o.es * p[c] + h * o.phi1s * np[c];
            join(a.u, i, av, p);
        }
        const NonlinearTerms n1 = terms(a);
        for (std::size_t i = 0; i < n; ++i) {
            const ModeOps& o = ops[op_of[i]];
            const Complex dr = n1.n1[i] - n0.n1[i];
            std::array<Complex, 3> dp{};
            Complex dv;
            {
                Complex v1, v0;
                std::array<Complex, 3> p1{}, p0{};
                split(n1.n2, i, v1, p1);
                split(n0.n2, i, v0, p0);
                dv = v1 - v0;
                for (std::size_t c = 0; c < s.u.size(); ++c) dp[c] = p1[c] - p0[c];
            }
            split(a.u, i, v, p);
            s.rho[i] = a.rho[i] + h * (o.phi2.a11 * dr + o.phi2.a12 * dv);
            v += h * (o.phi2.a21 * dr + o.phi2.a22 * dv);
            for (std::size_t c = 0; c < s.u.size(); ++c) p[c] += h * o.phi2s * dp[c];
            join(s.u, i, v, p);
        }
    }
};

Stepper::Stepper(const GridSpec& grid, const Coefficients& coeffs, const PressureLaw& law,
                 double dt, Scheme scheme, const NonlinearOptions& opts)
    : impl_(new Impl(grid, coeffs, law, dt, scheme, opts)) {}

Stepper::~Stepper() { delete impl_; }

double Stepper::max_rate() const { return impl_->max_rate; }

SpectralGrid& Stepper::grid() { return impl_->sg; }

void Stepper::check_cfl(const SpectralState& state, double cfl) const {
    if (impl_->scheme != Scheme::EtdRk2) return;
    const double h = impl_->h;
    if (h * impl_->max_rate > cfl)
        throw CflError("dt=" + std::to_string(h) + " exceeds cfl/|lambda|max=" +
                       std::to_string(cfl / impl_->max_rate));
    double umax = 0.0;
    for (const auto& c : state.u) {
        const RealField f = impl_->sg.inverse(c);
        for (double x : f) umax = std::max(umax, std::abs(x));
    }
    const double adv = umax * impl_->sg.lattice().k_max_retained() * h;
    if (!std::isfinite(adv) || adv > cfl)
        throw CflError("advective CFL max|u|*k_max*dt=" + std::to_string(adv) + " exceeds " +
                       std::to_string(cfl));
}

void Stepper::step(SpectralState& state) {
    impl_->zero_nyquist_state(state);
    if (impl_->scheme == Scheme::LinearExact)
        impl_->linear(state);
    else
        impl_->etd(state);
}

FieldState step_linear(const FieldState& state, double dt, const Coefficients& coeffs) {
    Stepper st(state.grid, coeffs, GammaLaw{}, dt, Scheme::LinearExact);
    SpectralState s = to_spectral(st.grid(), state);
    st.step(s);
    return to_physical(st.grid(), s);
}

FieldState step_nonlinear(const FieldState& state, double dt, const Coefficients& coeffs,
                          const PressureLaw& law, const NonlinearOptions& opts) {
    Stepper st(state.grid, coeffs, law, dt, Scheme::EtdRk2, opts);
    SpectralState s = to_spectral(st.grid(), state);
    st.check_cfl(s, 0.5);
    st.step(s);
    return to_physical(st.grid(), s);
}

namespace {

Sample measure(SpectralGrid& sg, const DyadicFilterBank* bank, const FieldState& f,
               const SpectralState& s, const Coefficients& c, const SolverConfig& cfg, double t) {
    const GridSpec& g = sg.spec();
    Sample out;
    out.t = t;
    out.rho_l2 = l2_norm(g, f.rho);
    double u2 = 0.0;
    for (const auto& comp : f.u) u2 += std::pow(l2_norm(g, comp), 2);
    out.u_l2 = std::sqrt(u2);
    out.rho_lp = lp_norm(g, f.rho, cfg.lp_p);
    out.u_lp = lp_norm(g, f.u, cfg.lp_p);
    out.mass = g.volume() * s.rho[0].real();
    for (const auto& comp : f.u) {
        double m = 0.0;
        for (std::size_t i = 0; i < comp.size(); ++i) m += (f.rho[i] + c.rho_bar) * comp[i];
        out.momentum.push_back(m * g.cell_volume());
    }
    if (bank) {
        const EnergyFunctionals e = energy_functionals(sg, *bank, f, cfg.lp_p, cfg.energy_j0);
        out.e_inf = e.e_inf;
        out.e_one = e.e_one;
    }
    return out;
}

}  // namespace

RunRecord run(const FieldState& initial, const SolverConfig& config, const Coefficients& coeffs,
              const PressureLaw& law, const RunHooks& hooks, nlohmann::json manifest) {
    config.validate();
    initial.grid.validate();
    if (!initial.all_finite()) throw ValidationError("initial state has non-finite values");

    RunRecord rec;
    rec.manifest = std::move(manifest);
    rec.manifest["dt_effective"] = config.effective_dt();
    rec.manifest["steps"] = config.steps();

    NonlinearOptions opts;
    opts.dealias = config.dealias;
    opts.vacuum_margin_fraction = config.vacuum_margin;
    Stepper stepper(initial.grid, coeffs, law, config.effective_dt(), config.scheme, opts);
    SpectralGrid& sg = stepper.grid();
    std::optional<DyadicFilterBank> bank;
    if (config.energy) bank = build_filter_bank(initial.grid);

    SpectralState s = to_spectral(sg, initial);
    FieldState phys = initial;
    const double h = config.effective_dt();
    const long n = config.steps();
    rec.samples.push_back(measure(sg, bank ? &*bank : nullptr, phys, s, coeffs, config, 0.0));
    if (config.snapshot_every > 0 && hooks.snapshot)
        rec.snapshots.push_back(hooks.snapshot(phys, 0.0, 0));

    long k = 0;
    try {
        for (k = 1; k <= n; ++k) {
            stepper.check_cfl(s, config.cfl);
            stepper.step(s);
            const bool sample = k % config.norm_every == 0 || k == n;
            const bool snap = config.snapshot_every > 0 && k % config.snapshot_every == 0;
            if (!sample && !snap) continue;
            phys = to_physical(sg, s);
            const double t = k == n ? config.t_end : k * h;
            if (!phys.all_finite()) throw CflError("state became non-finite at t=" + std::to_string(t));
            if (sample) rec.samples.push_back(measure(sg, bank ? &*bank : nullptr, phys, s, coeffs, config, t));
            if (snap && hooks.snapshot) rec.snapshots.push_back(hooks.snapshot(phys, t, k));
            if (sample && config.stop_at_rho_l2 && rec.samples.back().rho_l2 >= *config.stop_at_rho_l2) {
                rec.stopped_early = true;
                break;
            }
        }
    } catch (const VacuumError& e) {
        rec.aborted = true;
        rec.abort_kind = e.kind();
        rec.abort_reason = e.what();
    } catch (const CflError& e) {
        rec.aborted = true;
        rec.abort_kind = e.kind();
        rec.abort_reason = e.what();
    }
    rec.final_state = to_physical(sg, s);
    if (!rec.final_state.all_finite()) rec.final_state = phys;
    if (rec.aborted) rec.manifest["aborted_at_step"] = k;
    return rec;
}

}  // namespace yns
