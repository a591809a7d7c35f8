#include "sigmalab/numerics.hpp"

#include "sigmalab/errors.hpp"

#include <cmath>

namespace sigmalab {

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error(ErrorCode::InsufficientData, "fit_line needs >= 2 paired samples");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0) throw Error(ErrorCode::InsufficientData, "fit_line: all x identical");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0;
    f.residuals.resize(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        f.residuals[i] = y[i] - (f.slope * x[i] + f.intercept);
        ssr += f.residuals[i] * f.residuals[i];
    }
    f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    return f;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error(ErrorCode::InsufficientData, "pearson needs >= 2 paired samples");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) throw Error(ErrorCode::InsufficientData, "pearson: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> geomspace(double a, double b, int n) {
    std::vector<double> v(n);
    if (n == 1) { v[0] = a; return v; }
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i) v[i] = std::exp(la + (lb - la) * i / (n - 1));
    v.front() = a;
    v.back() = b;
    return v;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    if (n == 1) { v[0] = a; return v; }
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    v.back() = b;
    return v;
}

} // namespace sigmalab
