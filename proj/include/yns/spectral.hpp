#pragma once

// Exact Fourier-space theory of the linearised system. Everything here is a
// function of the scalar wavenumber k = |ξ|, since the symbol A(ξ) is radial.

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "yns/model.hpp"

namespace yns {

enum class Branch { RealDistinct, RealDouble, ComplexPair };

const char* to_string(Branch b);

/// Per-wavenumber record of λ² + bλ + c = 0.
struct ModeAnalysis {
    double k = 0;
    double damping_b = 0;    // η k²
    double restoring_c = 0;  // ρ̄ k² (P'/ρ̄ + γ − γ k²/(1+k²))
    double discriminant = 0;
    std::complex<double> lambda_plus{};
    std::complex<double> lambda_minus{};
    Branch branch = Branch::RealDouble;
    std::optional<double> s_factor;  // only for ComplexPair
};

/// Real 2×2 matrix, row major.
struct Matrix2 {
    double a11 = 1, a12 = 0, a21 = 0, a22 = 1;

    static Matrix2 identity() { return {}; }
    Matrix2 operator*(const Matrix2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    double det() const { return a11 * a22 - a12 * a21; }
    double max_abs() const;
};

/// Solution operator (ρ̂₀, v̂₀) ↦ (ρ̂(t), v̂(t)). A(k) is real, so the entries are real.
struct Propagator2x2 {
    double m_rr = 1, m_rv = 0, m_vr = 0, m_vv = 1;
    double k = 0;
    double t = 0;
    Branch branch = Branch::RealDouble;

    Matrix2 matrix() const { return {m_rr, m_rv, m_vr, m_vv}; }

    template <class T>
    void apply(T& rho, T& v) const {
        const T r = rho;
        rho = m_rr * r + m_rv * v;
        v = m_vr * r + m_vv * v;
    }
};

/// P'/ρ̄ + γ − γk²/(1+k²), the bracket of the restoring coefficient.
double restoring_factor(double k, const Coefficients& coeffs);

/// A(k) = [[0, −ρ̄k], [(P'/ρ̄+γ)k − γk³/(1+k²), −ηk²]].
Matrix2 linear_symbol(double k, const Coefficients& coeffs);

ModeAnalysis analyze_mode(double k, const Coefficients& coeffs);

/// S(k); throws BranchError unless the roots form a complex pair.
double oscillation_factor(double k, const Coefficients& coeffs);

inline constexpr double kDefaultSplitThreshold = 1e-8;

/// exp(tA) for any real 2×2 A. Roots closer than split·max(1,|λ₊|) use the
/// Jordan form e^{λt}(I + (A−λI)t).
Matrix2 exp_2x2(const Matrix2& a, double t, double split = kDefaultSplitThreshold,
                Branch* branch_used = nullptr);

Propagator2x2 propagator(double k, double t, const Coefficients& coeffs,
                         double split = kDefaultSplitThreshold);

/// e^{−α₃k²t}, the heat factor carried by divergence-free velocity.
double solenoidal_factor(double k, double t, const Coefficients& coeffs);

struct AsymptoticRow {
    double k = 0;
    double small_k_residual = 0;  // NaN when not requested
    double large_k_residual = 0;
};

/// Residuals of the small-k expansion λ₊ ≈ √(−margin)k − (η/2)k² and of the
/// large-k limit λ₊ → −P'(ρ̄)/η. Requesting the small-k part outside the
/// unstable regime throws RegimeError.
std::vector<AsymptoticRow> asymptotic_remainders(const Coefficients& coeffs,
                                                 std::span<const double> ks,
                                                 bool include_small_k = true);

/// b = −max Re λ± over [k_lo, k_hi], sampled at n log-spaced points.
double mid_band_bound(const Coefficients& coeffs, double k_lo, double k_hi, int n = 2048);

struct ScanSpec {
    double k_min = 1e-4;
    double k_max = 1e4;
    int n_log_samples = 4096;
};

struct GrowthSummary {
    double theta = 0;
    double k0 = 0;
    double lambda0 = 0;  // Re of the branch achieving theta (λ₊ on ties)
    std::vector<double> scan_k;
    std::vector<double> scan_re_lambda_plus;
    bool has_band = false;
    double band_lo = 0;
    double band_hi = 0;
    Regime regime = Regime::Stable;
};

/// max over k of Re λ₊ (which dominates Re λ₋ pointwise): log-spaced scan,
/// then golden-section refinement to 1e−10 in k.
GrowthSummary max_growth(const Coefficients& coeffs, const ScanSpec& scan = {});

}  // namespace yns
