#include "yns/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include "yns/error.hpp"

namespace yns {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

void GridSpec::validate() const {
    if (dim < 1 || dim > 3) throw ValidationError("grid dim must be 1, 2 or 3");
    if (n < 4 || (n & (n - 1)) != 0) throw ValidationError("grid n must be a power of two >= 4");
    if (!(length > 0.0) || !std::isfinite(length)) throw ValidationError("grid length must be > 0");
}

std::size_t GridSpec::total() const {
    std::size_t t = 1;
    for (int a = 0; a < dim; ++a) t *= static_cast<std::size_t>(n);
    return t;
}

double GridSpec::dk() const { return 2.0 * std::numbers::pi / length; }

double GridSpec::cell_volume() const { return std::pow(dx(), dim); }

double GridSpec::volume() const { return std::pow(length, dim); }

Lattice::Lattice(const GridSpec& grid) : grid_(grid) {
    grid.validate();
    const std::size_t total = grid.total();
    const int d = grid.dim;
    const int n = grid.n;
    const double dk = grid.dk();
    for (int a = 0; a < d; ++a) {
        xi_[a].resize(total);
        m_[a].resize(total);
    }
    k2_.resize(total);
    kmag_.resize(total);
    m2_.resize(total);
    nyquist_.resize(total);
    retained_.resize(total);
    mirror_.resize(total);

    std::array<int, 3> idx{0, 0, 0};
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i;
        for (int a = d - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(rem % static_cast<std::size_t>(n));
            rem /= static_cast<std::size_t>(n);
        }
        std::int64_t msq = 0;
        bool nyq = false;
        bool keep = true;
        std::size_t mirror = 0;
        for (int a = 0; a < d; ++a) {
            const int m = grid.signed_index(idx[a]);
            m_[a][i] = m;
            xi_[a][i] = dk * m;
            msq += static_cast<std::int64_t>(m) * m;
            nyq = nyq || (m == -n / 2);
            keep = keep && (3 * std::abs(m) < n);
            mirror = mirror * static_cast<std::size_t>(n) +
                     static_cast<std::size_t>((n - idx[a]) % n);
        }
        m2_[i] = msq;
        k2_[i] = dk * dk * static_cast<double>(msq);
        kmag_[i] = std::sqrt(k2_[i]);
        nyquist_[i] = nyq;
        retained_[i] = keep;
        mirror_[i] = mirror;
        k_max_ = std::max(k_max_, kmag_[i]);
        if (keep) k_max_retained_ = std::max(k_max_retained_, kmag_[i]);
    }
}

Fft::Fft(const GridSpec& grid) : n_(grid.total()) {
    grid.validate();
    std::array<int, 3> dims{grid.n, grid.n, grid.n};
    std::lock_guard lock(planner_mutex());
    buffer_ = reinterpret_cast<Complex*>(fftw_malloc(sizeof(fftw_complex) * n_));
    auto* buf = reinterpret_cast<fftw_complex*>(buffer_);
    forward_plan_ = fftw_plan_dft(grid.dim, dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_plan_ = fftw_plan_dft(grid.dim, dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
    fftw_free(buffer_);
}

void Fft::forward(std::span<const double> in, std::span<Complex> out) {
    for (std::size_t i = 0; i < n_; ++i) buffer_[i] = {in[i], 0.0};
    fftw_execute(static_cast<fftw_plan>(forward_plan_));
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = buffer_[i] * scale;
}

void Fft::forward(std::span<const Complex> in, std::span<Complex> out) {
    std::copy(in.begin(), in.end(), buffer_);
    fftw_execute(static_cast<fftw_plan>(forward_plan_));
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = buffer_[i] * scale;
}

void Fft::inverse(std::span<const Complex> in, std::span<double> out) {
    std::copy(in.begin(), in.end(), buffer_);
    fftw_execute(static_cast<fftw_plan>(backward_plan_));
    for (std::size_t i = 0; i < n_; ++i) out[i] = buffer_[i].real();
}

SpectralField SpectralGrid::forward(std::span<const double> f) {
    SpectralField c(lattice_.size());
    fft_.forward(f, c);
    return c;
}

RealField SpectralGrid::inverse(std::span<const Complex> c) {
    RealField f(lattice_.size());
    fft_.inverse(c, f);
    return f;
}

double l2_norm(const GridSpec& g, std::span<const double> f) {
    double s = 0;
    for (double v : f) s += v * v;
    return std::sqrt(s * g.cell_volume());
}

double lp_norm(const GridSpec& g, std::span<const double> f, double p) {
    if (std::isinf(p)) {
        double m = 0;
        for (double v : f) m = std::max(m, std::abs(v));
        return m;
    }
    if (p == 2.0) return l2_norm(g, f);
    double s = 0;
    for (double v : f) s += std::pow(std::abs(v), p);
    return std::pow(s * g.cell_volume(), 1.0 / p);
}

double lp_norm(const GridSpec& g, const std::vector<RealField>& comps, double p) {
    if (comps.empty()) return 0.0;
    RealField mag(comps.front().size(), 0.0);
    for (const auto& c : comps)
        for (std::size_t i = 0; i < mag.size(); ++i) mag[i] += c[i] * c[i];
    for (double& v : mag) v = std::sqrt(v);
    return lp_norm(g, mag, p);
}

double spectral_l2_norm(const GridSpec& g, std::span<const Complex> c) {
    double s = 0;
    for (const auto& v : c) s += std::norm(v);
    return std::sqrt(s * g.volume());
}

double integral(const GridSpec& g, std::span<const double> f) {
    double s = 0;
    for (double v : f) s += v;
    return s * g.cell_volume();
}

}  // namespace yns
