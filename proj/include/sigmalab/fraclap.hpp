#pragma once

#include "sigmalab/spectral.hpp"

#include <functional>
#include <string>
#include <vector>

namespace sigmalab {

/// |h(z)| <= amplitude·(1+|z|)^{-rate}. rate = 0 means "bounded, no decay promised".
struct DecayInfo {
    double amplitude = 1.0;
    double rate = 0.0;
};

/// Scalar function on R^n (n = 1 or 2) with the decay bound used for tail truncation.
struct ScalarFunction {
    int n = 1;
    std::function<double(const double* x)> eval;
    DecayInfo decay;
    /// Typical length scale; the Taylor cut near y = 0 is a fraction of it.
    double scale = 1.0;
};

/// C_{2s} = 2^{2s-2[s]-2} / ∫_{R^n} sin^{2[s]+2}(y_1) |y|^{-n-2s} dy, s > 0 non-integer.
double c2s_constant(double s, int n);

struct SingularOptions {
    double tol = 1e-9;  ///< target for the truncated tail
    double max_rel_error = 1e-4; ///< AccuracyLoss above this estimated error, relative to max(1, |value|)
};

struct SingularResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// (-1)^{[s]+1} C_{2s} ∫ δ_y^{2[s]+2} h(x) |y|^{-n-2s} dy with the centred difference of order 2[s]+2.
SingularResult singular_fraclap_ex(const ScalarFunction& h, double s, const double* x,
                                   const SingularOptions& opt = {});
double singular_fraclap(const ScalarFunction& h, double s, const double* x, const SingularOptions& opt = {});
inline double singular_fraclap(const ScalarFunction& h, double s, double x, const SingularOptions& opt = {}) {
    return singular_fraclap(h, s, &x, opt);
}

/// e^{-|x|^2/2} in n dimensions with honest decay metadata.
ScalarFunction gaussian_function(int n);
/// (-Δ)^s of the Gaussian by quadrature of its Fourier integral (n = 1 cosine integral, n = 2 Hankel).
double gaussian_fraclap_fourier(double s, int n, double r);
/// Same quantity from the confluent hypergeometric closed form.
double gaussian_fraclap_closed(double s, int n, double r);

struct CrossPoint {
    double x = 0.0;
    double singular = 0.0;
    double oracle = 0.0;
    double rel_err = 0.0;
};

struct CrossReport {
    double s = 0.0;
    double max_rel_err = 0.0;
    std::vector<CrossPoint> points;
};

/// Max over points of |singular - oracle| / (|oracle| + abs_floor). n = 1 points.
CrossReport cross_validate(const ScalarFunction& h, const std::function<double(double)>& oracle, double s,
                           const std::vector<double>& points, double abs_floor = 1e-12);

// ---- test function Ψ and its weighted operator bounds ----------------------------------------

/// Ψ(t,x) = (1 + t^{2α} + |x|^{2β})^{-r0}
struct TestFunctionPsi {
    double alpha2 = 1.0;
    double beta2 = 2.0;
    double r0 = 1.0;
    int n = 1;

    [[nodiscard]] double operator()(double t, double r) const;
    /// Throws unless β2 >= [s̄]+2 and r0 > n/(2β2).
    void validate(double sbar) const;
};

/// Σ A·(c + r^{2β})^{-e}·r^p: closed under radial derivatives, so integer Laplacians are exact.
struct RadialTerm {
    double A, e, p;
};

class RadialExpr {
public:
    RadialExpr(double c, double beta, int n, std::vector<RadialTerm> terms);
    [[nodiscard]] double operator()(double r) const;
    [[nodiscard]] RadialExpr derivative() const;
    [[nodiscard]] RadialExpr laplacian() const;
    /// Power of r that bounds the expression for large r (max over terms of p - 2βe).
    [[nodiscard]] double growth_power() const;
    [[nodiscard]] const std::vector<RadialTerm>& terms() const noexcept { return terms_; }

private:
    double c_, beta_;
    int n_;
    std::vector<RadialTerm> terms_;
};

/// ∂_t^j Ψ(t, ·) as a radial expression.
RadialExpr psi_time_derivative(const TestFunctionPsi& psi, double t, int j);

struct Lemma42Result {
    double constant = 0.0;     ///< sup of |(-Δ)^{s̄} ∂_t^j Ψ| · (1 + t^{2α} + |x|^{2β})^{r1}
    double r1 = 0.0;
    double at_t = 0.0, at_x = 0.0;
    int violations = 0;        ///< grid points above the fitted constant (expected 0)
    double midpoint_ratio = 0.0; ///< sup on the staggered grid / constant
    bool finite = false;
};

/// (-Δ)^{s̄} ∂_t^j Ψ at (t, x), n = 1. Integer part exact, fractional part by the singular integral.
double lemma42_operator(const TestFunctionPsi& psi, double sbar, int j, double t, double x);

Lemma42Result verify_lemma42(const TestFunctionPsi& psi, double sbar, int j, int nt = 41, int nx = 41,
                             double x_max = 10.0);

} // namespace sigmalab
