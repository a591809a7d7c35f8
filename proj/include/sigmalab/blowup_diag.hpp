#pragma once

#include "sigmalab/moduli.hpp"
#include "sigmalab/params.hpp"
#include "sigmalab/solver.hpp"

#include <limits>
#include <vector>

namespace sigmalab {

/// Parameters of the test functions φ, ψ_R and Φ_R.
struct TestFunctionFamily {
    double theta = 1.0;
    double q0 = 1.0;
    double kappa = 2.0;
    double r2 = 3.0;
    double beta0 = 0.1;
    double beta1 = 0.2;
    double p_c = 3.0;
    double s0 = 1.0;
    int n = 1;

    /// θ = max{1, ([σ]+1)/κ}, r2 = 2p_c', β's at the middle of their admissible range.
    static TestFunctionFamily defaults(const EquationParams& p);
    /// Throws ParamsInvalid when a constraint on θ, r2, β0, β1 fails.
    void validate(const EquationParams& p) const;
};

/// C² cut-off: 1 on [0, 1/2], quintic smoothstep down to 0 on [1/2, 1], 0 beyond.
double rho(double t);
/// φ(t, x) = (1 + t^{2θ} + |x|^{2θκ})^{-q0/(2θκ)}
double phi(double t, double r, const TestFunctionFamily& f);
/// Φ(t, x) = (t^{2θ} + |x|^{2θκ})^{β0} / (1 + t^{2θ} + |x|^{2θκ})^{β1}
double capital_phi(double t, double r, const TestFunctionFamily& f);
/// ψ_R(t, x) = ρ(t/R)^{r2} φ(t/R, x/R^{1/κ})
double psi_R(double t, double r, double R, const TestFunctionFamily& f);
double capital_phi_R(double t, double r, double R, const TestFunctionFamily& f);

/// ∫_0^R Φ_ρ(t, x) dρ/ρ by quadrature in ρ.
double phi_r_integral(double t, double r, double R, const TestFunctionFamily& f);
/// Supremum of the above over (t, x, R): B(β0, β1 - β0) / (2θ).
double phi_r_integral_bound(const TestFunctionFamily& f);

struct YOptions {
    /// Snapshot spacing below t = r must not exceed this fraction of r.
    double max_spacing_fraction = 0.125;
};

struct YFunctional {
    std::vector<double> R;
    std::vector<double> y;
    std::vector<double> Y;
    std::vector<double> I;   ///< I_R = ∬ g(u) ψ_R
    double C_fit = 0.0;      ///< max over the grid of Y / I_R
    double C_bound = 0.0;    ///< analytic constant in Y <= C·I_R
    bool monotone = true;
    bool bound_holds = true; ///< Y <= C_bound·I_R on every grid point
    double max_spacing_ratio = 0.0; ///< worst snapshot spacing / r seen
    size_t snapshots = 0;
    TestFunctionFamily family;
};

/// y(r) = ∬ g(u) Φ_r ψ_r dx dt on the snapshots (trapezoid in t, grid sum in x), Y by cumulative trapezoid of y/r
/// starting at Y(0) = 0. Throws InsufficientSnapshots on sparse snapshots or an R grid beyond the record.
YFunctional compute_Y(const TrajectoryRecord& traj, const EquationParams& p, const Modulus& m,
                      const TestFunctionFamily& fam, const std::vector<double>& R_grid, const YOptions& opt = {});

/// C_{u0,u1}: ∫(u0+u1)⟨x⟩^{-q0} for δ = 0, ½∫u1⟨x⟩^{-q0} for δ > 0, by radial quadrature of the profile.
double data_constant(const EquationParams& p, const DataProfile& prof);

struct InequalityCheck {
    double c_hat = 0.0;
    bool pass = false;
    bool degenerate = false; ///< Y' vanished on the whole window
    /// Smallest grid R from which the ratio stays positive; NaN if none.
    double R_positive = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> R, Yprime, rhs, ratio; ///< interior grid points
};

/// ĉ = min over interior grid points in [R_lo, R_hi] of Y'(R) / (R^{n/κ} g[R^{-d/κ}(C5·Y + C·ε)]).
/// Throws DegenerateGrid when fewer than 10 grid points or no interior point falls in the window.
InequalityCheck check_differential_inequality(const YFunctional& Y, const EquationParams& p, const Modulus& m,
                                              double epsilon, double C5, double C_data, double R_lo = 0.0,
                                              double R_hi = std::numeric_limits<double>::infinity());

} // namespace sigmalab
