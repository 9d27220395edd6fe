#include "yns/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "yns/error.hpp"

namespace yns {

const char* to_string(Branch b) {
    switch (b) {
        case Branch::RealDistinct: return "real_distinct";
        case Branch::RealDouble: return "real_double";
        case Branch::ComplexPair: return "complex_pair";
    }
    return "unknown";
}

double Matrix2::max_abs() const {
    return std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)});
}

double restoring_factor(double k, const Coefficients& c) {
    const double k2 = k * k;
    return c.alpha1 + c.gamma - c.gamma * k2 / (1.0 + k2);
}

Matrix2 linear_symbol(double k, const Coefficients& c) {
    const double k2 = k * k;
    return {0.0, -c.rho_bar * k, (c.alpha1 + c.gamma) * k - c.gamma * k2 * k / (1.0 + k2),
            -c.eta * k2};
}

ModeAnalysis analyze_mode(double k, const Coefficients& coeffs) {
    ModeAnalysis m;
    m.k = k;
    const double k2 = k * k;
    m.damping_b = coeffs.eta * k2;
    m.restoring_c = coeffs.rho_bar * k2 * restoring_factor(k, coeffs);
    const double b = m.damping_b;
    const double c = m.restoring_c;
    m.discriminant = b * b - 4.0 * c;

    if (k == 0.0 || m.discriminant == 0.0) {
        m.lambda_plus = m.lambda_minus = -0.5 * b;
        m.branch = Branch::RealDouble;
    } else if (m.discriminant > 0.0) {
        // Larger-magnitude root first, the other from the product c.
        const double q = -0.5 * (b + std::sqrt(m.discriminant));
        m.lambda_minus = q;
        m.lambda_plus = c / q;
        m.branch = Branch::RealDistinct;
    } else {
        const double s = std::sqrt(-m.discriminant) / b;
        m.lambda_plus = {-0.5 * b, -0.5 * b * s};
        m.lambda_minus = std::conj(m.lambda_plus);
        m.branch = Branch::ComplexPair;
        m.s_factor = s;
    }
    return m;
}

double oscillation_factor(double k, const Coefficients& coeffs) {
    const ModeAnalysis m = analyze_mode(k, coeffs);
    if (m.branch != Branch::ComplexPair)
        throw BranchError("oscillation factor needs a complex pair (discriminant=" +
                          std::to_string(m.discriminant) + ")");
    const double arg =
        4.0 * coeffs.rho_bar * restoring_factor(k, coeffs) / (coeffs.eta * coeffs.eta * k * k) -
        1.0;
    return std::sqrt(arg);
}

Matrix2 exp_2x2(const Matrix2& a, double t, double split, Branch* branch_used) {
    // Eigenvalues m ± d with m the half trace and d² = m² − det.
    const double m = 0.5 * (a.a11 + a.a22);
    const double half_gap_sq = 0.25 * (a.a11 - a.a22) * (a.a11 - a.a22) + a.a12 * a.a21;
    const double gap = 2.0 * std::sqrt(std::abs(half_gap_sq));
    const double lambda_top = std::abs(m) + 0.5 * gap;
    const Matrix2 shifted{a.a11 - m, a.a12, a.a21, a.a22 - m};

    double c_coef = 0;  // multiplies I
    double s_coef = 0;  // multiplies (A − mI)
    Branch used;
    if (gap < split * std::max(1.0, lambda_top)) {
        const double e = std::exp(m * t);
        c_coef = e;
        s_coef = e * t;
        used = Branch::RealDouble;
    } else if (half_gap_sq > 0.0) {
        const double d = std::sqrt(half_gap_sq);
        if (d * t <= 1.0) {
            const double e = std::exp(m * t);
            c_coef = e * std::cosh(d * t);
            s_coef = e * std::sinh(d * t) / d;
        } else {
            const double ep = std::exp((m + d) * t);
            const double em = std::exp((m - d) * t);
            c_coef = 0.5 * (ep + em);
            s_coef = 0.5 * (ep - em) / d;
        }
        used = Branch::RealDistinct;
    } else {
        const double w = std::sqrt(-half_gap_sq);
        const double e = std::exp(m * t);
        c_coef = e * std::cos(w * t);
        s_coef = e * std::sin(w * t) / w;
        used = Branch::ComplexPair;
    }
    if (branch_used) *branch_used = used;
    return {c_coef + s_coef * shifted.a11, s_coef * shifted.a12, s_coef * shifted.a21,
            c_coef + s_coef * shifted.a22};
}

Propagator2x2 propagator(double k, double t, const Coefficients& coeffs, double split) {
    Propagator2x2 p;
    p.k = k;
    p.t = t;
    if (k == 0.0 || t == 0.0) {
        p.branch = analyze_mode(k, coeffs).branch;
        return p;
    }
    Branch used;
    const Matrix2 e = exp_2x2(linear_symbol(k, coeffs), t, split, &used);
    p.m_rr = e.a11;
    p.m_rv = e.a12;
    p.m_vr = e.a21;
    p.m_vv = e.a22;
    p.branch = used;
    return p;
}

double solenoidal_factor(double k, double t, const Coefficients& coeffs) {
    return std::exp(-coeffs.alpha3 * k * k * t);
}

std::vector<AsymptoticRow> asymptotic_remainders(const Coefficients& coeffs,
                                                 std::span<const double> ks,
                                                 bool include_small_k) {
    if (include_small_k && classify_regime(coeffs) != Regime::Unstable)
        throw RegimeError("small-k expansion of lambda_plus requires P'(rho_bar)+gamma*rho_bar<0");
    const double root = include_small_k ? std::sqrt(-coeffs.stability_margin) : 0.0;
    const double limit = -coeffs.p_prime() / coeffs.eta;
    std::vector<AsymptoticRow> rows;
    rows.reserve(ks.size());
    for (double k : ks) {
        const double lp = analyze_mode(k, coeffs).lambda_plus.real();
        AsymptoticRow r;
        r.k = k;
        r.small_k_residual = include_small_k
                                 ? std::abs(lp - (root * k - 0.5 * coeffs.eta * k * k))
                                 : std::numeric_limits<double>::quiet_NaN();
        r.large_k_residual = std::abs(lp - limit);
        rows.push_back(r);
    }
    return rows;
}

namespace {

std::vector<double> log_space(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
    return out;
}

double re_lambda_plus(double k, const Coefficients& c) {
    return analyze_mode(k, c).lambda_plus.real();
}

// Zero of Re λ₊ bracketed by [a, b].
double bisect_sign_change(double a, double b, const Coefficients& c) {
    double fa = re_lambda_plus(a, c);
    for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, b); ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = re_lambda_plus(mid, c);
        if ((fm > 0.0) == (fa > 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

double mid_band_bound(const Coefficients& coeffs, double k_lo, double k_hi, int n) {
    if (!(k_lo > 0.0) || !(k_hi > k_lo) || n < 2) throw ScanError("degenerate band for bound");
    double worst = -std::numeric_limits<double>::infinity();
    for (double k : log_space(k_lo, k_hi, n)) {
        const ModeAnalysis m = analyze_mode(k, coeffs);
        worst = std::max({worst, m.lambda_plus.real(), m.lambda_minus.real()});
    }
    return -worst;
}

GrowthSummary max_growth(const Coefficients& coeffs, const ScanSpec& scan) {
    if (!(scan.k_min > 0.0) || !(scan.k_min < scan.k_max) || scan.n_log_samples < 3)
        throw ScanError("scan grid is degenerate: need 0 < k_min < k_max and n >= 3");

    GrowthSummary g;
    g.regime = classify_regime(coeffs);
    g.scan_k = log_space(scan.k_min, scan.k_max, scan.n_log_samples);
    g.scan_re_lambda_plus.reserve(g.scan_k.size());
    for (double k : g.scan_k) g.scan_re_lambda_plus.push_back(re_lambda_plus(k, coeffs));

    const auto& ks = g.scan_k;
    const auto& vals = g.scan_re_lambda_plus;
    const std::size_t best = static_cast<std::size_t>(
        std::max_element(vals.begin(), vals.end()) - vals.begin());

    if (best == 0 || best + 1 == ks.size()) {
        g.k0 = ks[best];
        g.theta = vals[best];
    } else {
        // Golden-section on the bracketing triple.
        constexpr double inv_phi = 0.6180339887498949;
        double a = ks[best - 1];
        double b = ks[best + 1];
        double x1 = b - inv_phi * (b - a);
        double x2 = a + inv_phi * (b - a);
        double f1 = re_lambda_plus(x1, coeffs);
        double f2 = re_lambda_plus(x2, coeffs);
        while (b - a > 1e-10) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = re_lambda_plus(x2, coeffs);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = re_lambda_plus(x1, coeffs);
            }
        }
        g.k0 = 0.5 * (a + b);
        g.theta = std::max(re_lambda_plus(g.k0, coeffs), vals[best]);
        if (vals[best] > re_lambda_plus(g.k0, coeffs)) g.k0 = ks[best];
    }
    g.lambda0 = g.theta;

    if (g.theta > 0.0) {
        std::size_t lo = best;
        while (lo > 0 && vals[lo - 1] > 0.0) --lo;
        std::size_t hi = best;
        while (hi + 1 < ks.size() && vals[hi + 1] > 0.0) ++hi;
        g.has_band = true;
        // Positivity down to the first scan point: the small-k expansion keeps
        // Re λ₊ > 0 on (0, k_min] in the unstable regime.
        g.band_lo = (lo == 0 && g.regime == Regime::Unstable)
                        ? 0.0
                        : (lo == 0 ? ks[0] : bisect_sign_change(ks[lo - 1], ks[lo], coeffs));
        g.band_hi = hi + 1 == ks.size() ? ks.back() : bisect_sign_change(ks[hi], ks[hi + 1], coeffs);
    }
    return g;
}

}  // namespace yns
