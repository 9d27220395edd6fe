#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "yns/error.hpp"
#include "yns/fields.hpp"
#include "yns/lp_besov.hpp"

using namespace yns;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Composite Simpson on the normalized bump exp(−1/(x(1−x))), independent of the tabulation.
double bump_primitive(double x, int n = 20000) {
    auto b = [](double t) { return t <= 0 || t >= 1 ? 0.0 : std::exp(-1.0 / (t * (1.0 - t))); };
    auto simpson = [&](double hi) {
        if (hi <= 0) return 0.0;
        const double h = hi / n;
        double s = b(0) + b(hi);
        for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * b(i * h);
        return s * h / 3.0;
    };
    return simpson(std::min(x, 1.0)) / simpson(1.0);
}

RealField plane_wave(const GridSpec& g, std::vector<int> m, double amp = 1.0) {
    RealField f(g.total());
    const double w = 2 * kPi / g.length;
    for (std::size_t i = 0; i < g.total(); ++i) {
        std::size_t rest = i;
        double phase = 0;
        for (int a = g.dim - 1; a >= 0; --a) {
            const int idx = static_cast<int>(rest % g.n);
            rest /= g.n;
            phase += w * m[a] * idx * g.dx();
        }
        f[i] = amp * std::cos(phase);
    }
    return f;
}

double max_abs_diff(const RealField& a, const RealField& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

double sup(const RealField& a) {
    double s = 0;
    for (double v : a) s = std::max(s, std::abs(v));
    return s;
}

}  // namespace

TEST_CASE("smooth step matches direct quadrature of the bump primitive") {
    CHECK(lp_chi(0.0) == 1.0);
    CHECK(lp_chi(1.0) == 1.0);
    CHECK(lp_chi(4.0 / 3.0) == 0.0);
    CHECK(lp_chi(7.0) == 0.0);
    for (double r = 1.0; r <= 4.0 / 3.0; r += 1.0 / 300.0) {
        const double expect = 1.0 - bump_primitive(3.0 * (r - 1.0));
        CHECK(std::abs(lp_chi(r) - expect) < 1e-8);
    }
    for (double r = 0; r < 4; r += 0.01) {
        CHECK(lp_phi(r) == lp_chi(r / 2) - lp_chi(r));
        CHECK(lp_phi(r) >= 0.0);
    }
    CHECK(lp_phi(0.0) == 0.0);
}

TEST_CASE("filter bank is a partition of unity on every nonzero lattice mode") {
    for (const GridSpec g : {GridSpec{1, 64, 2 * kPi}, GridSpec{2, 32, 2 * kPi * 8},
                             GridSpec{3, 16, 5.0}}) {
        const auto bank = build_filter_bank(g);
        const Lattice lat(g);
        double worst = 0;
        for (std::size_t i = 1; i < lat.size(); ++i) {
            double s = 0;
            for (int j = bank.j_min; j <= bank.j_max; ++j) s += bank.weight(j)[i];
            worst = std::max(worst, std::abs(s - 1.0));
        }
        CHECK(worst <= 1e-8);
        for (int j = bank.j_min; j <= bank.j_max; ++j) CHECK(bank.weight(j)[0] == 0.0);
    }
}

TEST_CASE("blocks two or more apart have disjoint multipliers and orthogonal outputs") {
    const GridSpec g{2, 64, 2 * kPi * 4};
    const auto bank = build_filter_bank(g);
    SpectralGrid sg(g);
    const RealField f = make_random_data(g, 1e9, 1.0, 7).rho;
    for (int j = bank.j_min; j <= bank.j_max; ++j)
        for (int q = j + 2; q <= bank.j_max; ++q) {
            double w = 0;
            for (std::size_t i = 0; i < g.total(); ++i)
                w = std::max(w, bank.weight(j)[i] * bank.weight(q)[i]);
            CHECK(w <= 1e-12);
            const RealField a = dyadic_block(sg, bank, f, j), b = dyadic_block(sg, bank, f, q);
            double dot = 0;
            for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
            CHECK(std::abs(dot) * g.cell_volume() <= 1e-12);
        }
}

TEST_CASE("a single mode at 2^q only reaches neighbouring blocks") {
    const GridSpec g{2, 64, 2 * kPi};
    const auto bank = build_filter_bank(g);
    SpectralGrid sg(g);
    for (int q : {0, 1, 2, 3, 4}) {
        const RealField f = plane_wave(g, {1 << q, 0});
        for (int j = bank.j_min; j <= bank.j_max; ++j) {
            const double s = sup(dyadic_block(sg, bank, f, j));
            if (j < q - 1 || j > q + 1) CHECK(s < 1e-14);
        }
    }
}

TEST_CASE("blocks sum back to a zero-mean field and annihilate constants") {
    const GridSpec g{2, 32, 2 * kPi * 2};
    const auto bank = build_filter_bank(g);
    SpectralGrid sg(g);
    const RealField f = make_random_data(g, 6.0, 1.0, 11).rho;
    RealField sum(f.size(), 0.0);
    for (int j = bank.j_min; j <= bank.j_max; ++j) {
        const RealField b = dyadic_block(sg, bank, f, j);
        for (std::size_t i = 0; i < f.size(); ++i) sum[i] += b[i];
    }
    CHECK(max_abs_diff(sum, f) <= 1e-8 * sup(f));

    const RealField c(g.total(), 3.5);
    for (int j = bank.j_min; j <= bank.j_max; ++j) CHECK(sup(dyadic_block(sg, bank, c, j)) < 1e-14);

    CHECK_THROWS_AS(bank.weight(bank.j_max + 1), RangeError);
    CHECK_THROWS_AS(bank.weight(bank.j_min - 1), RangeError);
    CHECK_THROWS_AS(dyadic_block(sg, bank, f, bank.j_max + 1), RangeError);
}

TEST_CASE("pure shell norm scales as 2^{js}") {
    // |ξ| = 12 lies where φ(2^{−3}·) = 1 and every other block vanishes.
    const GridSpec g{2, 64, 2 * kPi};
    const auto bank = build_filter_bank(g);
    SpectralGrid sg(g);
    RealField f = plane_wave(g, {12, 0});
    const double n = l2_norm(g, f);
    for (double& v : f) v /= n;
    const auto rep = besov_norm(sg, bank, f, 2.0, 2.0, 1.0);
    CHECK(std::abs(rep.total - 64.0) <= 0.05 * 64.0);
    CHECK(rep.total == doctest::Approx(64.0).epsilon(1e-10));
}

TEST_CASE("s = 0 norm is bounded by the shell overlap count") {
    const GridSpec g{2, 64, 2 * kPi};
    const auto bank = build_filter_bank(g);
    SpectralGrid sg(g);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const RealField f = make_random_data(g, 3.0, 1.0, seed).rho;
        const double l2 = l2_norm(g, f);
        const double total = besov_norm(sg, bank, f, 0.0, 2.0, 1.0).total;
        CHECK(total >= l2 * (1 - 1e-12));
        CHECK(total <= 3 * l2);
    }
}

TEST_CASE("Bernstein ratio stays within the shell constants") {
    const GridSpec g{2, 64, 2 * kPi * 2};
    const auto bank = build_filter_bank(g);
    SpectralGrid sg(g);
    const Lattice& lat = sg.lattice();
    const double c = (8.0 / 3.0) / 0.75;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const RealField f = make_random_data(g, 1e9, 1.0, seed).rho;
        const SpectralField fc = sg.forward(f);
        for (int j = bank.j_min; j <= bank.j_max; ++j) {
            const SpectralField b = dyadic_block(bank, fc, j);
            const double nb = spectral_l2_norm(g, b);
            if (nb < 1e-12) continue;
            std::vector<RealField> grad;
            for (int a = 0; a < g.dim; ++a) grad.push_back(sg.inverse(derivative(lat, b, a)));
            const double ratio = lp_norm(g, grad, 2.0) / nb / std::ldexp(1.0, j);
            CHECK(ratio >= 1.0 / c);
            CHECK(ratio <= c);
            // Tighter: the multiplier support is [3/4, 8/3]·2^j.
            CHECK(ratio >= 0.75 * (1 - 1e-9));
            CHECK(ratio <= 8.0 / 3.0 * (1 + 1e-9));
        }
    }
}

TEST_CASE("interpolation between two regularity indices") {
    const GridSpec g{2, 64, 2 * kPi * 2};
    const auto bank = build_filter_bank(g);
    SpectralGrid sg(g);
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const RealField f = make_random_data(g, 8.0, 1.0, 1000 + seed).rho;
        for (double p : {2.0, 4.0}) {
            const double s1 = -0.5, s2 = 1.5;
            const double a = besov_norm(sg, bank, f, s1, p, 1.0).total;
            const double b = besov_norm(sg, bank, f, s2, p, 1.0).total;
            const double mid = besov_norm(sg, bank, f, 0.5 * (s1 + s2), p, 1.0).total;
            CHECK(mid <= 1.1 * std::sqrt(a * b));
        }
    }
}

TEST_CASE("norms are homogeneous and reject non-zero means") {
    const GridSpec g{2, 32, 2 * kPi};
    const auto bank = build_filter_bank(g);
    SpectralGrid sg(g);
    RealField f = make_random_data(g, 5.0, 1.0, 3).rho;
    RealField f2 = f;
    for (double& v : f2) v *= 2;
    for (double r : {1.0, kInf}) {
        const auto a = besov_norm(sg, bank, f, 0.7, 3.0, r, 1);
        const auto b = besov_norm(sg, bank, f2, 0.7, 3.0, r, 1);
        CHECK(b.total == doctest::Approx(2 * a.total).epsilon(1e-13));
        CHECK(b.low == doctest::Approx(2 * a.low).epsilon(1e-13));
        CHECK(b.high == doctest::Approx(2 * a.high).epsilon(1e-13));
    }
    for (double& v : f) v += 0.1;
    CHECK_THROWS_AS(besov_norm(sg, bank, f, 0.0, 2.0, 1.0), MeanError);
    CHECK_THROWS_AS(besov_norm(sg, bank, f2, 0.0, 2.0, 2.0), ValidationError);
    CHECK_THROWS_AS(besov_norm(sg, bank, f2, 0.0, 0.5, 1.0), ValidationError);
}

TEST_CASE("low and high parts share one overlapping pair of blocks") {
    const GridSpec g{2, 64, 2 * kPi * 4};
    const auto bank = build_filter_bank(g);
    SpectralGrid sg(g);
    const RealField f = make_random_data(g, 1e9, 1.0, 21).rho;
    for (int j0 : {-2, 0, 1}) {
        const auto rep = besov_norm(sg, bank, f, 0.3, 2.0, 1.0, j0);
        double overlap = 0, low = 0, high = 0, mx = 0;
        for (const auto& b : rep.blocks) {
            if (b.j <= j0) low += b.weighted;
            if (b.j >= j0 - 1) high += b.weighted;
            if (b.j == j0 - 1 || b.j == j0) overlap += b.weighted;
            mx = std::max(mx, b.weighted);
        }
        CHECK(rep.low == doctest::Approx(low).epsilon(1e-14));
        CHECK(rep.high == doctest::Approx(high).epsilon(1e-14));
        CHECK(rep.total == doctest::Approx(rep.low + rep.high - overlap).epsilon(1e-12));
        const auto inf = besov_norm(sg, bank, f, 0.3, 2.0, kInf, j0);
        CHECK(inf.total == doctest::Approx(std::max(inf.low, inf.high)).epsilon(1e-14));
        CHECK(inf.total == doctest::Approx(mx).epsilon(1e-14));

        const auto parts = split_low_high(sg, bank, f, j0);
        RealField sum(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) sum[i] = parts.low[i] + parts.high[i];
        CHECK(max_abs_diff(sum, f) <= 1e-8 * sup(f));
    }
}

TEST_CASE("energy functionals") {
    const GridSpec g{2, 32, 2 * kPi * 8};
    const auto bank = build_filter_bank(g);
    SpectralGrid sg(g);

    const auto zero = energy_functionals(sg, bank, FieldState::zeros(g), 4.0);
    CHECK(zero.e_inf == 0.0);
    CHECK(zero.e_one == 0.0);
    CHECK(zero.admissible_exponents);

    // |ξ| = 1/4 sits in blocks −3 and −2, below every high block for j0 = 0.
    FieldState s = FieldState::zeros(g);
    s.rho = plane_wave(g, {2, 0}, 1e-2);
    s.u[1] = plane_wave(g, {0, 2}, 2e-2);
    for (double& v : s.rho) v += 0.5;  // the mean is dropped
    const auto e = energy_functionals(sg, bank, s, 4.0, 0);
    RealField rho = plane_wave(g, {2, 0}, 1e-2);
    const std::vector<RealField> stack{rho, s.u[0], s.u[1]};
    const auto low_inf = besov_norm(sg, bank, stack, 0.0, 2.0, 1.0, 0);
    const auto low_one = besov_norm(sg, bank, stack, 2.0, 2.0, 1.0, 0);
    CHECK(low_inf.high < 1e-15);
    CHECK(e.e_inf == doctest::Approx(low_inf.low).epsilon(1e-12));
    CHECK(e.e_one == doctest::Approx(low_one.low).epsilon(1e-12));
    CHECK(e.e_inf > e.e_one);

    const auto series = energy_functionals(sg, bank, std::vector<FieldState>{FieldState::zeros(g), s},
                                           4.0, 0);
    REQUIRE(series.size() == 2);
    CHECK(series[1].e_inf == e.e_inf);

    CHECK(admissible_lebesgue_index(3, 2.0));
    CHECK(admissible_lebesgue_index(3, 4.0));
    CHECK(admissible_lebesgue_index(2, 4.0));
    CHECK_FALSE(admissible_lebesgue_index(3, 5.0));
    CHECK_FALSE(admissible_lebesgue_index(4, 4.0 + 1e-9));
    CHECK_FALSE(admissible_lebesgue_index(5, 4.0));
    CHECK_FALSE(admissible_lebesgue_index(2, 1.5));
    CHECK_FALSE(energy_functionals(sg, bank, s, 6.0).admissible_exponents);
}
