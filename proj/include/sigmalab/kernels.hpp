#pragma once

#include "sigmalab/params.hpp"
#include "sigmalab/spectral.hpp"

#include <complex>
#include <limits>
#include <string_view>
#include <vector>

namespace sigmalab {

enum class RootBranch { RealRoots, DoubleRoot, ComplexRoots };
std::string_view branch_name(RootBranch b);

struct Roots {
    std::complex<double> lambda1, lambda2;
    RootBranch branch = RootBranch::RealRoots;
};

/// Roots of λ² + |ξ|^{2δ} λ + |ξ|^{2σ} = 0 with the principal square root.
Roots lambda12(double xi_norm, const EquationParams& p);

struct KernelValues {
    double K0 = 1.0, K1 = 0.0, dK0 = 0.0, dK1 = 1.0;
};

/// K0, K1 and their t-derivatives for the mode |ξ| at time t.
KernelValues kernel_values(double t, double xi_norm, const EquationParams& p);

/// W1(t) = ∫_0^t K1 and V(t) = ∫_0^t (t - s) K1(s) ds, the Duhamel weights of constant and linear forcing.
struct DuhamelWeights {
    double W1 = 0.0;
    double V = 0.0;
};
DuhamelWeights duhamel_weights(double t, double xi_norm, const EquationParams& p);

struct ModeRecord {
    double xi_norm = 0.0;
    std::complex<double> lambda1, lambda2;
    RootBranch branch = RootBranch::RealRoots;
    KernelValues k;
    DuhamelWeights w;
};

/// One-step propagator for every half-spectrum mode of a grid.
class PropagatorTable {
public:
    PropagatorTable(const EquationParams& p, const Grid& g, double dt);

    [[nodiscard]] const EquationParams& params() const noexcept { return params_; }
    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] const std::vector<ModeRecord>& modes() const noexcept { return modes_; }
    /// max over modes of |K0 dK1 - K1 dK0 - e^{-|ξ|^{2δ} dt}|
    [[nodiscard]] double wronskian_defect() const noexcept { return wronskian_defect_; }

private:
    EquationParams params_;
    Grid grid_;
    double dt_;
    std::vector<ModeRecord> modes_;
    double wronskian_defect_ = 0.0;
};

struct LinearState {
    SpectralField u;
    SpectralField v; ///< u_t
};

/// Exact mode-wise solution of the linear problem after time t.
LinearState propagate_linear(const LinearState& s, double t, const EquationParams& p);
/// Same, reusing a prebuilt table (t = table.dt()).
LinearState propagate_linear(const LinearState& s, const PropagatorTable& table);

/// -(n - min{2δ,σ} - n/q)/κ; q = +inf for the sup norm.
double decay_target(const EquationParams& p, double q);

struct DecayOptions {
    double q = std::numeric_limits<double>::infinity();
    int N = 4096;
    double L = 0.0;        ///< 0 picks a box from the time range
    double width = 1.0;    ///< Gaussian data width
    double t_min = 1.0;
    double t_max = 1000.0;
    int samples = 31;      ///< geometric t grid
    double boundary_tol = 1e-6;          ///< δ = 0: mass share of the outer 10% strip
    double box_sensitivity_tol = 1e-2;   ///< δ > 0: relative norm change under doubling L (and N)
    /// For δ > 0, replace the zero-mode multiplier by its average over the innermost frequency cell.
    bool zero_mode_cell_average = true;
};

struct DecayMeasurement {
    double slope = 0.0;
    double target = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double L = 0.0;
    int N = 0;
    double boundary_fraction = 0.0; ///< worst over the fitted samples
    double box_sensitivity = 0.0;   ///< δ > 0 only
    std::vector<double> times;
    std::vector<double> norms;
};

/// u0 = 0, u1 a unit-mass Gaussian; fits log||u(t)||_q against log(1+t) over the last decade of times.
/// Throws BoxTooSmall when the box visibly truncates the solution.
DecayMeasurement measure_decay(const EquationParams& p, const DecayOptions& opt = {});

} // namespace sigmalab
