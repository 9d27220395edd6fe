#pragma once

// Ordinary least squares for straight lines, in linear or log-log coordinates.

#include <span>

namespace yns {

struct LineFit {
    double slope = 0;
    double intercept = 0;
    double slope_half_width = 0;  // 95% confidence, Student t with n−2 dof
    double r_squared = 0;
    int n = 0;
};

// ValidationError for fewer than 2 points or a degenerate abscissa.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Fits log y = a + b log x; ValidationError on non-positive values.
LineFit fit_power_law(std::span<const double> x, std::span<const double> y);

}  // namespace yns
