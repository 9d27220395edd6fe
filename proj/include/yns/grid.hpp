#pragma once

// Periodic box [0, L)^d sampled at N points per axis, with an FFTW-backed
// transform. Coefficients follow f(x) = Σ_m c_m e^{iξ_m·x}, ξ_m = 2πm/L,
// m ∈ [−N/2, N/2), so c_m = N^{-d} Σ_j f_j e^{−iξ_m·x_j}.

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace yns {

using Complex = std::complex<double>;
using RealField = std::vector<double>;
using SpectralField = std::vector<Complex>;

struct GridSpec {
    int dim = 2;
    int n = 64;
    double length = 6.283185307179586;

    void validate() const;  // ValidationError
    std::size_t total() const;
    double dk() const;
    double dx() const { return length / n; }
    double cell_volume() const;
    double volume() const;
    /// Signed lattice index of storage index i along one axis.
    int signed_index(int i) const { return i < n / 2 ? i : i - n; }
    /// Largest |m| kept by the 2/3 rule (3|m| < N).
    int dealias_cutoff() const { return (n - 1) / 3; }

    bool operator==(const GridSpec&) const = default;
};

/// Per-mode lattice data in storage order (last axis fastest).
class Lattice {
public:
    explicit Lattice(const GridSpec& grid);

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return k2_.size(); }

    /// ξ_a for mode i (raw value, also at Nyquist).
    double xi(int axis, std::size_t i) const { return xi_[axis][i]; }
    /// ξ_a with the Nyquist index of that axis mapped to 0 (odd-order multipliers).
    double xi_odd(int axis, std::size_t i) const {
        return m_[axis][i] == -grid_.n / 2 ? 0.0 : xi_[axis][i];
    }
    double k2(std::size_t i) const { return k2_[i]; }
    double k(std::size_t i) const { return kmag_[i]; }
    /// Σ m_a², an exact radial key.
    std::int64_t m2(std::size_t i) const { return m2_[i]; }
    /// True when any axis index equals −N/2.
    bool nyquist(std::size_t i) const { return nyquist_[i]; }
    /// True when every axis satisfies 3|m_a| < N.
    bool retained(std::size_t i) const { return retained_[i]; }
    int m(int axis, std::size_t i) const { return m_[axis][i]; }
    /// Storage index of the mode −m.
    std::size_t mirror(std::size_t i) const { return mirror_[i]; }
    /// Largest |ξ| on the lattice.
    double k_max() const { return k_max_; }
    /// Largest |ξ| among retained modes.
    double k_max_retained() const { return k_max_retained_; }

private:
    GridSpec grid_;
    std::array<std::vector<double>, 3> xi_;
    std::array<std::vector<int>, 3> m_;
    std::vector<double> k2_, kmag_;
    std::vector<std::int64_t> m2_;
    std::vector<bool> nyquist_, retained_;
    std::vector<std::size_t> mirror_;
    double k_max_ = 0, k_max_retained_ = 0;
};

/// RAII complex-to-complex FFTW plans over the grid. Not thread-safe: one
/// instance per thread of control.
class Fft {
public:
    explicit Fft(const GridSpec& grid);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    void forward(std::span<const double> in, std::span<Complex> out);
    void forward(std::span<const Complex> in, std::span<Complex> out);
    /// Inverse transform keeping the real part.
    void inverse(std::span<const Complex> in, std::span<double> out);

private:
    std::size_t n_;
    Complex* buffer_;
    void* forward_plan_;
    void* backward_plan_;
};

/// Grid + lattice + transform, the context every field operation needs.
class SpectralGrid {
public:
    explicit SpectralGrid(const GridSpec& grid) : lattice_(grid), fft_(grid) {}

    const GridSpec& spec() const { return lattice_.grid(); }
    const Lattice& lattice() const { return lattice_; }
    Fft& fft() { return fft_; }

    SpectralField forward(std::span<const double> f);
    RealField inverse(std::span<const Complex> c);

private:
    Lattice lattice_;
    Fft fft_;
};

// Norms on the torus with Lebesgue measure dx.
double l2_norm(const GridSpec& g, std::span<const double> f);
double lp_norm(const GridSpec& g, std::span<const double> f, double p);  // p = inf allowed
/// Norm of the pointwise Euclidean magnitude of the component stack.
double lp_norm(const GridSpec& g, const std::vector<RealField>& components, double p);
/// ‖f‖_{L²} from Fourier coefficients (Parseval).
double spectral_l2_norm(const GridSpec& g, std::span<const Complex> c);
double integral(const GridSpec& g, std::span<const double> f);

}  // namespace yns
