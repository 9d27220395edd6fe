#pragma once

// Discrete Littlewood-Paley blocks Δ̇_j = φ(2^{−j}D) on the periodic lattice
// and the homogeneous Besov norms built from them.

#include <limits>
#include <vector>

#include "yns/fields.hpp"
#include "yns/grid.hpp"

namespace yns {

// χ = 1 on [0, 1], 0 on [4/3, ∞), C^∞ in between.
double lp_chi(double r);
// φ(r) = χ(r/2) − χ(r); supported in [1, 8/3].
double lp_phi(double r);

struct DyadicFilterBank {
    GridSpec grid;
    int j_min = 0;
    int j_max = 0;
    // weights[j − j_min][i] = φ(2^{−j}|ξ_i|)
    std::vector<std::vector<double>> weights;

    bool contains(int j) const { return j >= j_min && j <= j_max; }
    const std::vector<double>& weight(int j) const;  // RangeError
};

DyadicFilterBank build_filter_bank(const GridSpec& grid);

SpectralField dyadic_block(const DyadicFilterBank& bank, const SpectralField& c, int j);
RealField dyadic_block(SpectralGrid& sg, const DyadicFilterBank& bank,
                       std::span<const double> f, int j);

struct BesovBlock {
    int j = 0;
    double lp = 0;        // ‖Δ̇_j f‖_{L^p}
    double weighted = 0;  // 2^{js}‖Δ̇_j f‖_{L^p}
};

struct BesovReport {
    double s = 0;
    double p = 2;
    double r = 1;  // 1 or inf
    int j0 = 0;
    int j_min = 0, j_max = 0;
    std::vector<BesovBlock> blocks;
    double total = 0;
    double low = 0;   // j ≤ j0
    double high = 0;  // j ≥ j0 − 1
};

// Scalar field. MeanError when |mean f| > 1e−10·‖f‖∞.
BesovReport besov_norm(SpectralGrid& sg, const DyadicFilterBank& bank, std::span<const double> f,
                       double s, double p, double r, int j0 = 0);

// Stack of scalar fields, block norms taken of the pointwise Euclidean norm.
BesovReport besov_norm(SpectralGrid& sg, const DyadicFilterBank& bank,
                       const std::vector<RealField>& components, double s, double p, double r,
                       int j0 = 0);

struct LowHighFields {
    RealField low;   // Σ_{j ≤ j0} Δ̇_j f
    RealField high;  // Σ_{j > j0} Δ̇_j f
};

LowHighFields split_low_high(SpectralGrid& sg, const DyadicFilterBank& bank,
                             std::span<const double> f, int j0 = 0);

struct EnergyFunctionals {
    double e_inf = 0;
    double e_one = 0;
    bool admissible_exponents = true;  // 2 ≤ p ≤ min(4, 2d/(d−2))
};

bool admissible_lebesgue_index(int dim, double p);

// Drops the ξ=0 mode of every component before evaluating the homogeneous norms.
EnergyFunctionals energy_functionals(SpectralGrid& sg, const DyadicFilterBank& bank,
                                     const FieldState& state, double p, int j0 = 0);

std::vector<EnergyFunctionals> energy_functionals(SpectralGrid& sg, const DyadicFilterBank& bank,
                                                  const std::vector<FieldState>& states, double p,
                                                  int j0 = 0);

}  // namespace yns
