#pragma once

#include <span>
#include <vector>

namespace sigmalab {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::vector<double> residuals;
};

/// Ordinary least squares y ≈ slope·x + intercept. Needs at least two distinct x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

double pearson(std::span<const double> x, std::span<const double> y);

/// n points geometrically spaced on [a, b], both endpoints included.
std::vector<double> geomspace(double a, double b, int n);
std::vector<double> linspace(double a, double b, int n);

} // namespace sigmalab
