#pragma once

#include "sigmalab/kernels.hpp"
#include "sigmalab/moduli.hpp"
#include "sigmalab/params.hpp"
#include "sigmalab/spectral.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sigmalab {

struct SolverConfig {
    Grid grid{1, 1024, 10.0};
    double dt0 = 0.05;
    double dt_floor = 1e-12;
    double blowup_threshold = 1e6;  ///< M, in solution units
    double dealias = 2.0 / 3.0;
    double t_max = 100.0;
    int snapshot_stride = 0;        ///< every k accepted steps; 0 disables
    double snapshot_dt = 0.0;       ///< additionally whenever t crosses a multiple; 0 disables
    bool adaptive = true;
    double growth_limit = 0.2;      ///< reject a step when sup|u| grows by more than this fraction
    double pc_tolerance = 1e-3;     ///< reject when |u - u*| / sup|u| exceeds this
    bool auto_box = true;           ///< grow L to 4·T̂^{1/κ} + data radius
    int max_steps = 5'000'000;

    /// Throws ConfigInvalid-style errors (ParamsInvalid) on inconsistent settings.
    void validate(double data_max) const;
};

/// u0 = ε·u0(|x|), u1 = ε·u1(|x|); radius bounds where the profiles matter.
struct DataProfile {
    std::function<double(double)> u0;
    std::function<double(double)> u1;
    double radius = 4.0;
    std::string name;
};

/// u0 = 0, u1 = Nrm·e^{-|x|²/w²} with ∫ u1 ⟨x⟩^{-q0} dx = 1 (integral over R^n).
DataProfile gaussian_velocity_profile(const EquationParams& p, double width = 1.0);

struct SolverState {
    SpectralField u;
    SpectralField v;
    double t = 0.0;
};

SolverState initial_state(const Grid& g, const DataProfile& prof, double epsilon);

/// |u|^{p_c} μ(|u|), with PowerLaw evaluated as |u|^{p_c + a} so that μ(0) = ∞ is never formed.
double nonlinearity(double u, double p_c, const Modulus& m);
/// Exponent of the pure power that g behaves like near blow-up.
double effective_power(const EquationParams& p, const Modulus& m);

struct StepOutput {
    SolverState state;
    double discrepancy = 0.0; ///< sup|u - u*| / max(sup|u|, tiny)
};

/// One exponential-integrator step of size table.dt(): exact linear part, Duhamel integral with
/// the nonlinearity interpolated linearly between u_n and the predictor u*.
StepOutput step(const SolverState& s, const PropagatorTable& table, const Modulus& m, double dealias = 2.0 / 3.0);
StepOutput step(const SolverState& s, double dt, const EquationParams& p, const Modulus& m, double dealias = 2.0 / 3.0);

/// Fixed-step integration to t_end (the last step is shortened to land on it).
SolverState evolve_fixed(const SolverState& s, double dt, double t_end, const EquationParams& p, const Modulus& m,
                         double dealias = 2.0 / 3.0);

struct NormSample {
    double t = 0.0;
    double l_pc = 0.0, l_inf = 0.0, l_2 = 0.0;
    double w_pc = 0.0;    ///< (1+t)^{1/p_c} ||u||_{p_c}
    double w_inf = 0.0;   ///< (1+t)^{(n - min{2δ,σ})/κ} ||u||_∞
    double excess = 0.0;  ///< same weight on ||u - u_lin||_∞
    double dt = 0.0;
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> u;
};

struct TrajectoryRecord {
    Grid grid;
    std::vector<NormSample> samples;
    std::vector<Snapshot> snapshots;
    int blowup_index = -1; ///< first sample with ||u||_∞ >= M
};

enum class RunOutcome { BlowUp, Global, InconclusiveGrowing, InconclusiveFloor, NumericalFailure };
std::string_view outcome_name(RunOutcome o);

struct LifespanSample {
    double epsilon = 0.0;
    double T_measured = std::numeric_limits<double>::infinity();
    double T_threshold = std::numeric_limits<double>::infinity(); ///< first time ||u||_∞ >= M
    bool blowup = false;
    RunOutcome outcome = RunOutcome::Global;
    std::optional<LifespanPrediction> prediction;
    double L = 0.0;
    int N = 0;
    double dt_final = 0.0;
    long steps = 0;
    double excess_exponent = std::numeric_limits<double>::quiet_NaN(); ///< γ̂ of the nonlinear excess, t_max runs
    bool weighted_bounded = false;
    std::string error;     ///< per-sample failure message inside sweeps
};

struct RunResult {
    TrajectoryRecord trajectory;
    LifespanSample sample;
};

/// Box half-length the run would use (auto_box rule) for this ε.
double chosen_box(const EquationParams& p, const Modulus& m, double epsilon, const DataProfile& prof,
                  const SolverConfig& cfg);

RunResult run_to_blowup(const EquationParams& p, const Modulus& m, double epsilon, const DataProfile& prof,
                        const SolverConfig& cfg);

/// Independent runs on a worker pool (workers = 0 picks hardware concurrency). Failures are recorded per sample.
std::vector<LifespanSample> sweep_epsilon(const EquationParams& p, const Modulus& m, const std::vector<double>& eps_list,
                                          const DataProfile& prof, const SolverConfig& cfg, int workers = 0);

enum class ScalingModel { PowerLaw, LogLinear };

struct ScalingFit {
    double slope = 0.0; ///< power law: d log T / d log(1/ε); log-linear: d log T / d ε^{-2}
    double intercept = 0.0;
    double r2 = 0.0;
    double pearson = 0.0;
    std::vector<double> residuals;
};

ScalingFit fit_scaling(const std::vector<LifespanSample>& samples, ScalingModel model);

} // namespace sigmalab
