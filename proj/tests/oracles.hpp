#pragma once

// Independent reference computations used only by the tests: brute-force
// DFTs, a step-halving Runge-Kutta integrator and a dense growth scan. None
// of them call into the library's transforms or propagators.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "yns/grid.hpp"
#include "yns/spectral.hpp"

namespace oracle {

using cplx = std::complex<double>;

struct M2 {
    double a, b, c, d;
};

inline M2 mul(const M2& x, const M2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
            x.c * y.b + x.d * y.d};
}

// One classical RK4 step of X' = A X with X(0) = I, applied n times.
inline M2 rk4(const M2& A, double t, long n) {
    const double h = t / n;
    auto f = [&](const M2& x) { return mul(A, x); };
    auto axpy = [](const M2& x, double s, const M2& y) {
        return M2{x.a + s * y.a, x.b + s * y.b, x.c + s * y.c, x.d + s * y.d};
    };
    M2 step{1, 0, 0, 1};
    const M2 I{1, 0, 0, 1};
    const M2 k1 = f(I);
    const M2 k2 = f(axpy(I, h / 2, k1));
    const M2 k3 = f(axpy(I, h / 2, k2));
    const M2 k4 = f(axpy(I, h, k3));
    step = {1 + h / 6 * (k1.a + 2 * k2.a + 2 * k3.a + k4.a), h / 6 * (k1.b + 2 * k2.b + 2 * k3.b + k4.b),
            h / 6 * (k1.c + 2 * k2.c + 2 * k3.c + k4.c), 1 + h / 6 * (k1.d + 2 * k2.d + 2 * k3.d + k4.d)};
    // Repeated squaring of the one-step map when n is a power of two.
    M2 x = step;
    long m = 1;
    while (m < n) {
        x = mul(x, x);
        m *= 2;
    }
    return x;
}

inline double max_abs(const M2& m) {
    return std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d)});
}

// Halves the step until successive results agree to `rel` (relative to the
// largest entry); n starts at a power of two covering |A|·h ≤ 0.5.
inline M2 propagate(const M2& A, double t, double rel = 1e-12) {
    const double rate = max_abs(A) * 2.0;
    long n = 64;
    while (n < t * rate / 0.5) n *= 2;
    M2 prev = rk4(A, t, n);
    for (int it = 0; it < 12; ++it) {
        n *= 2;
        const M2 next = rk4(A, t, n);
        const M2 diff{next.a - prev.a, next.b - prev.b, next.c - prev.c, next.d - prev.d};
        if (max_abs(diff) <= rel * max_abs(next)) return next;
        prev = next;
    }
    return prev;
}

inline M2 symbol(double k, double rho_bar, double p_prime, double gamma, double eta) {
    return {0.0, -rho_bar * k, (p_prime / rho_bar + gamma) * k - gamma * k * k * k / (1 + k * k),
            -eta * k * k};
}

// Re of the larger root of λ² + bλ + c = 0 from the textbook formula.
inline double re_lambda_plus(double k, double rho_bar, double p_prime, double gamma, double eta) {
    const double b = eta * k * k;
    const double c = rho_bar * k * k * (p_prime / rho_bar + gamma - gamma * k * k / (1 + k * k));
    const double disc = b * b - 4 * c;
    if (disc >= 0) return (-b + std::sqrt(disc)) / 2;
    return -b / 2;
}

// Multi-index of flat position i (row-major, last axis fastest), signed.
inline std::vector<int> index_of(const yns::GridSpec& g, std::size_t i) {
    std::vector<int> m(static_cast<std::size_t>(g.dim));
    for (int a = g.dim - 1; a >= 0; --a) {
        const int j = static_cast<int>(i % g.n);
        m[a] = j < g.n / 2 ? j : j - g.n;
        i /= g.n;
    }
    return m;
}

// c_m = N^{-d} Σ_x f(x) e^{−iξ_m·x}, by direct summation.
inline std::vector<cplx> dft(const yns::GridSpec& g, const std::vector<double>& f) {
    const std::size_t n = g.total();
    std::vector<cplx> c(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto m = index_of(g, k);
        cplx s = 0;
        for (std::size_t x = 0; x < n; ++x) {
            const auto j = index_of(g, x);
            double phase = 0;
            for (int a = 0; a < g.dim; ++a) phase += m[a] * ((j[a] + g.n) % g.n);
            s += f[x] * std::polar(1.0, -2 * std::numbers::pi * phase / g.n);
        }
        c[k] = s / static_cast<double>(n);
    }
    return c;
}

inline std::vector<double> idft(const yns::GridSpec& g, const std::vector<cplx>& c) {
    const std::size_t n = g.total();
    std::vector<double> f(n);
    for (std::size_t x = 0; x < n; ++x) {
        const auto j = index_of(g, x);
        cplx s = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const auto m = index_of(g, k);
            double phase = 0;
            for (int a = 0; a < g.dim; ++a) phase += m[a] * ((j[a] + g.n) % g.n);
            s += c[k] * std::polar(1.0, 2 * std::numbers::pi * phase / g.n);
        }
        f[x] = s.real();
    }
    return f;
}

// ∂_axis f for a field whose spectrum avoids the Nyquist index.
inline std::vector<double> ddx(const yns::GridSpec& g, const std::vector<double>& f, int axis) {
    auto c = dft(g, f);
    const double dk = 2 * std::numbers::pi / g.length;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const int m = index_of(g, k)[axis];
        c[k] *= m == -g.n / 2 ? cplx(0) : cplx(0, m * dk);
    }
    return idft(g, c);
}

}  // namespace oracle
