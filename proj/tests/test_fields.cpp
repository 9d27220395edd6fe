#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "yns/error.hpp"
#include "yns/fields.hpp"

using namespace yns;

namespace {

constexpr double kPi = std::numbers::pi;

Coefficients ref_coeffs(double gamma, const PressureLaw& law = DirectSlope{1.0}) {
    PhysicalParams p;
    p.gamma = gamma;
    p.pressure = law;
    return derive_coefficients(p);
}

std::vector<double> coords(const GridSpec& g, std::size_t i) {
    const auto m = oracle::index_of(g, i);
    std::vector<double> x;
    for (int v : m) x.push_back(((v + g.n) % g.n) * g.dx());
    return x;
}

// Smooth data with spectrum on |m_a| ≤ 1 so that every product is resolved on n = 8.
FieldState low_mode_state(const GridSpec& g, double amp, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    const double w = 2 * kPi / g.length;
    FieldState s = FieldState::zeros(g);
    for (int f = 0; f <= g.dim; ++f) {
        const double a0 = u(rng), a1 = u(rng), a2 = u(rng), ph = u(rng);
        for (std::size_t i = 0; i < g.total(); ++i) {
            const auto x = coords(g, i);
            double v = a0 * std::cos(w * x[0] + ph) + a1 * std::sin(w * x[g.dim - 1]);
            if (g.dim > 1) v += a2 * std::cos(w * (x[0] - x[1]));
            (f == 0 ? s.rho[i] : s.u[f - 1][i]) = amp * v;
        }
    }
    return s;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST_CASE("grid transforms agree with brute-force summation") {
    for (int d : {1, 2, 3}) {
        const GridSpec g{d, 8, 3.0};
        SpectralGrid sg(g);
        std::mt19937 rng(7);
        std::normal_distribution<double> nd;
        RealField f(g.total());
        for (auto& v : f) v = nd(rng);
        const SpectralField c = sg.forward(f);
        const auto o = oracle::dft(g, f);
        double err = 0;
        for (std::size_t i = 0; i < c.size(); ++i) err = std::max(err, std::abs(c[i] - o[i]));
        CHECK(err <= 1e-13);
        CHECK(max_diff(sg.inverse(c), f) <= 1e-13);
    }
}

TEST_CASE("Parseval: grid L2 equals spectral l2") {
    const GridSpec g{2, 32, 5.0};
    SpectralGrid sg(g);
    std::mt19937 rng(3);
    std::normal_distribution<double> nd;
    RealField f(g.total());
    for (auto& v : f) v = nd(rng);
    const double a = l2_norm(g, f), b = spectral_l2_norm(g, sg.forward(f));
    CHECK(std::abs(a - b) <= 1e-12 * a);
}

TEST_CASE("grid spec validation") {
    CHECK_THROWS_AS((GridSpec{2, 12, 1.0}.validate()), ValidationError);
    CHECK_THROWS_AS((GridSpec{4, 16, 1.0}.validate()), ValidationError);
    CHECK_THROWS_AS((GridSpec{2, 16, -1.0}.validate()), ValidationError);
    CHECK_NOTHROW((GridSpec{3, 16, 1.0}.validate()));
}

TEST_CASE("Bessel potential: constant maps to itself and a mode is divided by 1+k^2") {
    const GridSpec g{2, 16, 2 * kPi};
    SpectralGrid sg(g);
    RealField c(g.total(), 0.7);
    CHECK(max_diff(bessel_potential(sg, c), c) <= 1e-14);
    RealField f(g.total());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto x = coords(g, i);
        f[i] = std::cos(3 * x[0] + 4 * x[1]);
    }
    RealField expect = f;
    for (auto& v : expect) v /= 26.0;
    CHECK(max_diff(bessel_potential(sg, f), expect) <= 1e-14);
}

TEST_CASE("Helmholtz projection splits gradients and rotations") {
    const GridSpec g{2, 16, 2 * kPi};
    SpectralGrid sg(g);
    FieldState s = FieldState::zeros(g);
    for (std::size_t i = 0; i < g.total(); ++i) {
        const auto x = coords(g, i);
        // ∇ sin(x + 2y) plus the divergence-free (1, 3) sin(3x − y)
        s.u[0][i] = std::cos(x[0] + 2 * x[1]) + std::sin(3 * x[0] - x[1]);
        s.u[1][i] = 2 * std::cos(x[0] + 2 * x[1]) + 3 * std::sin(3 * x[0] - x[1]);
    }
    const SpectralState sp = to_spectral(sg, s);
    const HelmholtzParts parts = helmholtz_project(sg.lattice(), sp.u);
    const RealField q0 = sg.inverse(parts.longitudinal[0]);
    const RealField p1 = sg.inverse(parts.solenoidal[1]);
    RealField q0_expect(g.total()), p1_expect(g.total());
    for (std::size_t i = 0; i < g.total(); ++i) {
        const auto x = coords(g, i);
        q0_expect[i] = std::cos(x[0] + 2 * x[1]);
        p1_expect[i] = 3 * std::sin(3 * x[0] - x[1]);
    }
    CHECK(max_diff(q0, q0_expect) <= 1e-13);
    CHECK(max_diff(p1, p1_expect) <= 1e-13);
    // P + Q = u and div P = 0
    const SpectralField div_p = divergence(sg.lattice(), parts.solenoidal);
    double m = 0;
    for (auto c : div_p) m = std::max(m, std::abs(c));
    CHECK(m <= 1e-13);
}

TEST_CASE("one-dimensional Helmholtz convention: Pu = 0, Qu = u") {
    const GridSpec g{1, 16, 2 * kPi};
    SpectralGrid sg(g);
    RealField u(g.total());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(i * g.dx()) + 0.3;
    const HelmholtzParts parts = helmholtz_project(sg.lattice(), {sg.forward(u)});
    CHECK(max_diff(sg.inverse(parts.longitudinal[0]), u) <= 1e-14);
    CHECK(max_diff(sg.inverse(parts.solenoidal[0]), RealField(u.size(), 0.0)) == 0.0);
}

TEST_CASE("Lambda^-1 div and Lambda^-1 grad invert each other on gradients") {
    const GridSpec g{3, 16, 2 * kPi};
    SpectralGrid sg(g);
    FieldState s = FieldState::zeros(g);
    for (std::size_t i = 0; i < g.total(); ++i) {
        const auto x = coords(g, i);
        const double arg = x[0] - 2 * x[1] + 3 * x[2];
        s.u[0][i] = std::cos(arg);
        s.u[1][i] = -2 * std::cos(arg);
        s.u[2][i] = 3 * std::cos(arg);
    }
    const SpectralState sp = to_spectral(sg, s);
    const SpectralField v = lambda_div(sg.lattice(), sp.u);
    // v = Λ⁻¹div u = −|ξ| sin(arg) for u = ∇ sin(arg)
    const RealField vr = sg.inverse(v);
    double err = 0;
    for (std::size_t i = 0; i < g.total(); ++i) {
        const auto x = coords(g, i);
        err = std::max(err, std::abs(vr[i] + std::sqrt(14.0) * std::sin(x[0] - 2 * x[1] + 3 * x[2])));
    }
    CHECK(err <= 1e-12);
    const auto back = lambda_inv_grad(sg.lattice(), v);
    for (int a = 0; a < 3; ++a) CHECK(max_diff(sg.inverse(back[a]), s.u[a]) <= 1e-12);
    CHECK(v[0] == Complex(0.0));
}

TEST_CASE("divergence-free input has zero Lambda^-1 div") {
    const GridSpec g{2, 16, 2 * kPi};
    SpectralGrid sg(g);
    FieldState s = FieldState::zeros(g);
    for (std::size_t i = 0; i < g.total(); ++i) {
        const auto x = coords(g, i);
        s.u[0][i] = std::cos(x[1]);
        s.u[1][i] = std::sin(x[0]);
    }
    const SpectralField v = lambda_div(sg.lattice(), to_spectral(sg, s).u);
    double m = 0;
    for (auto c : v) m = std::max(m, std::abs(c));
    CHECK(m <= 1e-14);
}

TEST_CASE("nonlinear terms vanish on the zero state") {
    const GridSpec g{2, 16, 2 * kPi};
    SpectralGrid sg(g);
    const auto [n1, n2] = nonlinear_terms(sg, FieldState::zeros(g), ref_coeffs(-2.0, GammaLaw{}),
                                          GammaLaw{});
    CHECK(max_diff(n1, RealField(g.total(), 0.0)) == 0.0);
    CHECK(max_diff(n2[0], RealField(g.total(), 0.0)) == 0.0);
}

TEST_CASE("nonlinear terms agree with a brute-force pointwise evaluation") {
    const PressureLaw law = GammaLaw{1.0 / 1.4, 1.4};
    PhysicalParams pp;
    pp.gamma = -2.0;
    pp.mu_prime = 0.5;
    pp.pressure = law;
    const Coefficients c = derive_coefficients(pp);
    for (int d : {1, 2, 3}) {
        const GridSpec g{d, 8, 2 * kPi * 1.3};
        SpectralGrid sg(g);
        const FieldState s = low_mode_state(g, 0.2, 11 + d);

        // Oracle: product-rule form N₁ = −u·∇ρ − ρ div u, derivatives by direct DFT.
        const std::size_t n = g.total();
        std::vector<std::vector<double>> grad_rho, grad_div;
        std::vector<std::vector<std::vector<double>>> grad_u(d);
        std::vector<double> div(n, 0.0);
        for (int a = 0; a < d; ++a) {
            grad_rho.push_back(oracle::ddx(g, s.rho, a));
            for (int b = 0; b < d; ++b) grad_u[a].push_back(oracle::ddx(g, s.u[a], b));
            for (std::size_t i = 0; i < n; ++i) div[i] += grad_u[a][a][i];
        }
        for (int a = 0; a < d; ++a) grad_div.push_back(oracle::ddx(g, div, a));
        std::vector<std::vector<double>> lap(d, std::vector<double>(n, 0.0));
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                const auto second = oracle::ddx(g, grad_u[a][b], b);
                for (std::size_t i = 0; i < n; ++i) lap[a][i] += second[i];
            }
        std::vector<double> n1(n, 0.0);
        std::vector<std::vector<double>> n2(d, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            const double r = s.rho[i];
            for (int a = 0; a < d; ++a) n1[i] -= s.u[a][i] * grad_rho[a][i];
            n1[i] -= r * div[i];
            const double F = std::pow(1.0 + r, 0.4 - 1.0) - 1.0;  // A g ρ^{g−2} − A g
            const double kk = r / (1.0 + r);
            for (int a = 0; a < d; ++a) {
                double adv = 0;
                for (int b = 0; b < d; ++b) adv += s.u[b][i] * grad_u[a][b][i];
                n2[a][i] = -adv - F * grad_rho[a][i] - c.alpha3 * kk * lap[a][i] -
                           c.alpha4 * kk * grad_div[a][i];
            }
        }

        NonlinearOptions raw;
        raw.dealias = false;
        const auto [m1, m2] = nonlinear_terms(sg, s, c, law, raw);
        CHECK(max_diff(m1, n1) <= 1e-12);
        for (int a = 0; a < d; ++a) CHECK(max_diff(m2[a], n2[a]) <= 1e-12);

        // Dealiased: inputs are already inside the retained band, so N₁ is
        // unchanged and N₂ is the oracle truncated to 3|m_a| < n.
        const auto [t1, t2] = nonlinear_terms(sg, s, c, law);
        CHECK(max_diff(t1, n1) <= 1e-12);
        for (int a = 0; a < d; ++a) {
            auto coef = oracle::dft(g, n2[a]);
            for (std::size_t k = 0; k < coef.size(); ++k)
                for (int m : oracle::index_of(g, k))
                    if (3 * std::abs(m) >= g.n) coef[k] = 0.0;
            CHECK(max_diff(t2[a], oracle::idft(g, coef)) <= 1e-12);
        }
    }
}

TEST_CASE("density flux has zero mean coefficient") {
    const GridSpec g{2, 32, 7.0};
    SpectralGrid sg(g);
    const FieldState s = make_random_data(g, 8.0, 0.3, 5);
    const NonlinearTerms t = nonlinear_terms(sg, to_spectral(sg, s), ref_coeffs(-2.0, GammaLaw{}), GammaLaw{});
    CHECK(t.n1[0] == Complex(0.0));
}

TEST_CASE("vacuum guard rejects densities near zero") {
    const GridSpec g{1, 16, 2 * kPi};
    SpectralGrid sg(g);
    FieldState s = FieldState::zeros(g);
    for (std::size_t i = 0; i < g.total(); ++i) s.rho[i] = -0.95 * std::cos(i * g.dx());
    CHECK_THROWS_AS(nonlinear_terms(sg, s, ref_coeffs(0.0, GammaLaw{}), GammaLaw{}), VacuumError);
    CHECK_THROWS_AS(check_vacuum(std::vector<double>{-0.95}, 1.0, 0.1), VacuumError);
    CHECK_NOTHROW(check_vacuum(std::vector<double>{-0.85}, 1.0, 0.1));
}

TEST_CASE("effective flux reduces to Qu when rho = 0 or alpha1 = 0") {
    const GridSpec g{2, 16, 2 * kPi};
    SpectralGrid sg(g);
    FieldState s = make_random_data(g, 5.0, 1.0, 9);
    const Coefficients c = ref_coeffs(-2.0);
    const auto qu = helmholtz_project(sg.lattice(), to_spectral(sg, s).u).longitudinal;

    FieldState no_rho = s;
    std::fill(no_rho.rho.begin(), no_rho.rho.end(), 0.0);
    auto g1 = effective_flux(sg, no_rho, c);
    Coefficients c0 = c;
    c0.alpha1 = 0.0;
    auto g2 = effective_flux(sg, s, c0);
    for (int a = 0; a < 2; ++a) {
        CHECK(max_diff(g1[a], sg.inverse(qu[a])) <= 1e-13);
        CHECK(max_diff(g2[a], sg.inverse(qu[a])) <= 1e-13);
    }
    // With ρ̃ = cos x: G − Qu = −(α₁/η) Δ⁻¹∇ρ̃ = −(α₁/η) (sin x, 0)
    FieldState r = FieldState::zeros(g);
    for (std::size_t i = 0; i < g.total(); ++i) r.rho[i] = std::cos(coords(g, i)[0]);
    auto g3 = effective_flux(sg, r, c);
    RealField expect(g.total());
    for (std::size_t i = 0; i < g.total(); ++i) expect[i] = -c.alpha1 / c.eta * std::sin(coords(g, i)[0]);
    CHECK(max_diff(g3[0], expect) <= 1e-13);
}

TEST_CASE("bump profile") {
    CHECK(bump_profile(0.4, 0.4, 0.1) == 1.0);
    CHECK(bump_profile(0.49, 0.4, 0.1) == 1.0);
    CHECK(bump_profile(0.61, 0.4, 0.1) == 0.0);
    const double mid = bump_profile(0.55, 0.4, 0.1);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
    CHECK(bump_profile(0.25, 0.4, 0.1) == doctest::Approx(mid));
}

TEST_CASE("unstable data: eigenvector structure, normalization and growth floor") {
    const Coefficients c = ref_coeffs(-2.0);
    const GrowthSummary s = max_growth(c);
    const GridSpec g{2, 128, 2 * kPi * 32};
    UnstableDataSpec spec;
    spec.theta_bar = 0.5 * s.theta;
    spec.amplitude = 1e-3;
    const UnstableData d = make_unstable_data(g, c, s, spec);
    CHECK(d.zeta_bar == doctest::Approx(0.25 * s.k0));
    CHECK(d.min_growth_in_support >= s.theta - spec.theta_bar);
    CHECK(l2_norm(g, d.state.rho) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(d.shells >= 8);
    CHECK(d.state.all_finite());

    // Per mode v̂ = −λ₀ ρ̂ /(ρ̄|ξ|) and the velocity is a gradient.
    SpectralGrid sg(g);
    const SpectralState sp = to_spectral(sg, d.state);
    const SpectralField v = lambda_div(sg.lattice(), sp.u);
    double worst = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::abs(sp.rho[i]) < 1e-12) continue;
        const double k = sg.lattice().k(i);
        const double lam = analyze_mode(k, c).lambda_plus.real();
        worst = std::max(worst, std::abs(v[i] + lam * sp.rho[i] / k) / std::abs(sp.rho[i]));
    }
    CHECK(worst <= 1e-10);
    const auto parts = helmholtz_project(sg.lattice(), sp.u);
    CHECK(spectral_l2_norm(g, parts.solenoidal[0]) <= 1e-12 * spectral_l2_norm(g, sp.u[0]));
}

TEST_CASE("unstable data errors") {
    const Coefficients stable = ref_coeffs(0.5);
    const Coefficients c = ref_coeffs(-2.0);
    const GrowthSummary s = max_growth(c);
    UnstableDataSpec spec;
    spec.theta_bar = 0.5 * s.theta;
    CHECK_THROWS_AS(make_unstable_data(GridSpec{2, 64, 2 * kPi * 32}, stable, s, spec), RegimeError);
    // A 2π box has no lattice shell near k0 ≈ 0.43.
    CHECK_THROWS_AS(make_unstable_data(GridSpec{2, 64, 2 * kPi}, c, s, spec), ResolutionError);
    spec.theta_bar = s.theta;
    CHECK_THROWS_AS(make_unstable_data(GridSpec{2, 64, 2 * kPi * 32}, c, s, spec), ValidationError);
}
