#include "yns/lp_besov.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "yns/error.hpp"

namespace yns {

namespace {

double bump(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::exp(-1.0 / (x * (1.0 - x)));
}

// Normalized primitive H(x) = ∫₀^x bump / ∫₀^1 bump, tabulated on a uniform
// grid and interpolated with cubic Hermite using the exact derivative.
class SmoothStep {
public:
    static constexpr int kCells = 4096;

    SmoothStep() {
        using boost::math::quadrature::gauss_kronrod;
        values_[0] = 0.0;
        const double h = 1.0 / kCells;
        for (int i = 0; i < kCells; ++i)
            values_[i + 1] = values_[i] + gauss_kronrod<double, 15>::integrate(bump, i * h, (i + 1) * h);
        norm_ = values_[kCells];
        for (double& v : values_) v /= norm_;
    }

    double operator()(double x) const {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        const double h = 1.0 / kCells;
        const int i = std::min(static_cast<int>(x / h), kCells - 1);
        const double t = (x - i * h) / h;
        const double d0 = bump(i * h) / norm_ * h;
        const double d1 = bump((i + 1) * h) / norm_ * h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * values_[i] + (t3 - 2 * t2 + t) * d0 +
               (-2 * t3 + 3 * t2) * values_[i + 1] + (t3 - t2) * d1;
    }

private:
    std::array<double, kCells + 1> values_{};
    double norm_ = 1.0;
};

const SmoothStep& smooth_step() {
    static const SmoothStep step;
    return step;
}

double combine(double acc, double x, double r) { return std::isinf(r) ? std::max(acc, x) : acc + x; }

template <class BlockNorm>
BesovReport assemble(const DyadicFilterBank& bank, double s, double p, double r, int j0,
                     BlockNorm&& block_norm) {
    if (!(p >= 1.0)) throw ValidationError("Lebesgue index p must lie in [1, inf]");
    if (r != 1.0 && !std::isinf(r)) throw ValidationError("summation index r must be 1 or inf");
    BesovReport rep;
    rep.s = s;
    rep.p = p;
    rep.r = r;
    rep.j0 = j0;
    rep.j_min = bank.j_min;
    rep.j_max = bank.j_max;
    for (int j = bank.j_min; j <= bank.j_max; ++j) {
        BesovBlock b;
        b.j = j;
        b.lp = block_norm(j);
        b.weighted = std::pow(2.0, j * s) * b.lp;
        rep.total = combine(rep.total, b.weighted, r);
        if (j <= j0) rep.low = combine(rep.low, b.weighted, r);
        if (j >= j0 - 1) rep.high = combine(rep.high, b.weighted, r);
        rep.blocks.push_back(b);
    }
    return rep;
}

void check_mean(std::span<const double> f) {
    double sup = 0.0, sum = 0.0;
    for (double v : f) {
        sup = std::max(sup, std::abs(v));
        sum += v;
    }
    const double mean = sum / static_cast<double>(f.size());
    if (std::abs(mean) > 1e-10 * sup)
        throw MeanError("homogeneous Besov norm of a field with mean " + std::to_string(mean));
}

}  // namespace

double lp_chi(double r) {
    r = std::abs(r);
    if (r <= 1.0) return 1.0;
    if (r >= 4.0 / 3.0) return 0.0;
    return 1.0 - smooth_step()(3.0 * (r - 1.0));
}

double lp_phi(double r) { return lp_chi(0.5 * r) - lp_chi(r); }

const std::vector<double>& DyadicFilterBank::weight(int j) const {
    if (!contains(j))
        throw RangeError("dyadic index " + std::to_string(j) + " outside [" +
                         std::to_string(j_min) + ", " + std::to_string(j_max) + "]");
    return weights[static_cast<std::size_t>(j - j_min)];
}

DyadicFilterBank build_filter_bank(const GridSpec& grid) {
    grid.validate();
    const Lattice lat(grid);
    DyadicFilterBank bank;
    bank.grid = grid;
    // Every nonzero lattice |ξ| ∈ [dk, k_max] sees Σ_j φ(2^{−j}|ξ|) = 1.
    bank.j_min = static_cast<int>(std::floor(std::log2(0.75 * grid.dk())));
    bank.j_max = static_cast<int>(std::ceil(std::log2(lat.k_max()))) - 1;
    for (int j = bank.j_min; j <= bank.j_max; ++j) {
        std::vector<double> w(lat.size());
        for (std::size_t i = 0; i < lat.size(); ++i) w[i] = lp_phi(std::ldexp(lat.k(i), -j));
        bank.weights.push_back(std::move(w));
    }
    return bank;
}

SpectralField dyadic_block(const DyadicFilterBank& bank, const SpectralField& c, int j) {
    const auto& w = bank.weight(j);
    SpectralField out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = w[i] * c[i];
    return out;
}

RealField dyadic_block(SpectralGrid& sg, const DyadicFilterBank& bank, std::span<const double> f,
                       int j) {
    return sg.inverse(dyadic_block(bank, sg.forward(f), j));
}

BesovReport besov_norm(SpectralGrid& sg, const DyadicFilterBank& bank, std::span<const double> f,
                       double s, double p, double r, int j0) {
    check_mean(f);
    const SpectralField c = sg.forward(f);
    return assemble(bank, s, p, r, j0, [&](int j) {
        return lp_norm(sg.spec(), sg.inverse(dyadic_block(bank, c, j)), p);
    });
}

BesovReport besov_norm(SpectralGrid& sg, const DyadicFilterBank& bank,
                       const std::vector<RealField>& components, double s, double p, double r,
                       int j0) {
    std::vector<SpectralField> coeffs;
    for (const auto& f : components) {
        check_mean(f);
        coeffs.push_back(sg.forward(f));
    }
    return assemble(bank, s, p, r, j0, [&](int j) {
        std::vector<RealField> blocks;
        for (const auto& c : coeffs) blocks.push_back(sg.inverse(dyadic_block(bank, c, j)));
        return lp_norm(sg.spec(), blocks, p);
    });
}

LowHighFields split_low_high(SpectralGrid& sg, const DyadicFilterBank& bank,
                             std::span<const double> f, int j0) {
    const SpectralField c = sg.forward(f);
    SpectralField low(c.size(), 0.0), high(c.size(), 0.0);
    for (int j = bank.j_min; j <= bank.j_max; ++j) {
        SpectralField& dst = j <= j0 ? low : high;
        const auto& w = bank.weight(j);
        for (std::size_t i = 0; i < c.size(); ++i) dst[i] += w[i] * c[i];
    }
    return {sg.inverse(low), sg.inverse(high)};
}

bool admissible_lebesgue_index(int dim, double p) {
    const double upper = dim <= 2 ? 4.0 : std::min(4.0, 2.0 * dim / (dim - 2.0));
    return p >= 2.0 && p <= upper;
}

EnergyFunctionals energy_functionals(SpectralGrid& sg, const DyadicFilterBank& bank,
                                     const FieldState& state, double p, int j0) {
    const int d = sg.spec().dim;
    auto centred = [&](const RealField& f) {
        SpectralField c = sg.forward(f);
        c[0] = 0.0;
        return sg.inverse(c);
    };
    const RealField rho = centred(state.rho);
    std::vector<RealField> u, stack{rho};
    for (const auto& c : state.u) {
        u.push_back(centred(c));
        stack.push_back(u.back());
    }
    EnergyFunctionals e;
    e.admissible_exponents = admissible_lebesgue_index(d, p);
    const double dp = d / p;
    const double rho_high = besov_norm(sg, bank, rho, dp, p, 1.0, j0).high;
    e.e_inf = besov_norm(sg, bank, stack, 0.5 * d - 1.0, 2.0, 1.0, j0).low + rho_high +
              besov_norm(sg, bank, u, dp - 1.0, p, 1.0, j0).high;
    e.e_one = besov_norm(sg, bank, stack, 0.5 * d + 1.0, 2.0, 1.0, j0).low + rho_high +
              besov_norm(sg, bank, u, dp + 1.0, p, 1.0, j0).high;
    return e;
}

std::vector<EnergyFunctionals> energy_functionals(SpectralGrid& sg, const DyadicFilterBank& bank,
                                                  const std::vector<FieldState>& states, double p,
                                                  int j0) {
    std::vector<EnergyFunctionals> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(energy_functionals(sg, bank, s, p, j0));
    return out;
}

}  // namespace yns
