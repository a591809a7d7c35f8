#pragma once

#include "sigmalab/params.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sigmalab {

enum class ModulusKind { Zero, ConstantOne, PowerLaw, LogPower, IterLogPower, Tabulated };

std::string_view modulus_kind_name(ModulusKind k);

/// Modulus of continuity μ on (0, τ0], continued above τ0.
///
/// Internally everything is written in s = ln(1/τ), which keeps tiny τ representable.
/// Continuation above τ0 holds μ(τ0), except PowerLaw which keeps τ^a everywhere.
class Modulus {
public:
    /// μ ≡ 0. Used to switch the nonlinearity off.
    static Modulus zero();
    static Modulus constant_one(double tau0 = default_tau0());
    /// μ(τ) = τ^a. a < 0 is allowed and models a sub-critical power p = p_c + a.
    static Modulus power_law(double a, double tau0 = default_tau0());
    /// μ(τ) = (ln 1/τ)^{-γ}
    static Modulus log_power(double gamma, double tau0 = default_tau0());
    /// μ(τ) = (ln^[k] 1/τ)^{-γ} ∏_{j<k} (ln^[j] 1/τ)^{-1}. Default τ0 makes ln^[k](1/τ0) = 1.
    static Modulus iter_log_power(int k, double gamma, std::optional<double> tau0 = std::nullopt);
    /// Monotone samples (τ_i, μ_i), τ strictly increasing. τ0 defaults to the largest τ_i.
    static Modulus tabulated(std::vector<std::pair<double, double>> samples,
                             std::optional<double> tau0 = std::nullopt);

    static double default_tau0();

    [[nodiscard]] ModulusKind kind() const noexcept { return kind_; }
    [[nodiscard]] double tau0() const noexcept { return tau0_; }
    [[nodiscard]] double s0() const noexcept { return s0_; }
    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] int k() const noexcept { return k_; }
    [[nodiscard]] const std::vector<std::pair<double, double>>& samples() const noexcept { return samples_; }

    /// μ(τ) for τ >= 0.
    [[nodiscard]] double mu(double tau) const;
    /// dμ/dτ
    [[nodiscard]] double mu_prime(double tau) const;
    /// μ(e^{-s}), any real s.
    [[nodiscard]] double mu_s(double s) const;
    /// H(e^{-s}) = ∫_{s0}^{s} μ(e^{-r}) dr. Negative for s < s0 (τ > τ0).
    [[nodiscard]] double H_s(double s) const;

    /// Short spec string, e.g. "logpow:gamma=0.5,tau0=0.3".
    [[nodiscard]] std::string describe() const;

private:
    Modulus() = default;
    double tab_mu_s(double s) const;
    double tab_F(double s) const;
    static double iter_logs(double s, int k, double* prod_below_k);

    ModulusKind kind_ = ModulusKind::Zero;
    double tau0_ = 0.0;
    double s0_ = 0.0;
    double a_ = 0.0;
    double gamma_ = 0.0;
    int k_ = 0;
    std::vector<std::pair<double, double>> samples_;
    // tabulated, in s ascending: knots_s[i], knots_mu[i], antiderivative F at knots
    std::vector<double> knots_s_, knots_mu_, knots_F_;
    double tail_slope_ = 0.0;
};

/// Parse "name[:k=v,...]": zero, constant, power:a=, logpow:gamma=, iterlog:k=,gamma=; tau0 optional.
Modulus parse_modulus(std::string_view spec);

double eval_mu(const Modulus& m, double tau);

// ---- Dini classification ------------------------------------------------------------

enum class DiniVerdict { Dini, NonDini, Indeterminate };
enum class Confidence { Analytic, High, Medium, Low };

std::string_view dini_name(DiniVerdict v);
std::string_view confidence_name(Confidence c);

struct DiniResult {
    DiniVerdict verdict;
    Confidence confidence;
    double decay_exponent = 0.0; ///< fitted γ̂ for tabulated data, NaN if analytic
};

DiniResult dini_classify(const Modulus& m);

// ---- hypothesis checks ---------------------------------------------------------------

struct A1Result {
    double sup = 0.0;
    bool pass = false;
    double tau_at_sup = 0.0;
};

/// sup of τ|μ'(τ)|/μ(τ) on [tau_lo, tau_hi]; defaults cover [1e-12 τ0, τ0].
A1Result check_A1(const Modulus& m, std::optional<double> tau_lo = std::nullopt,
                  std::optional<double> tau_hi = std::nullopt, int samples = 400);

struct A3Result {
    bool pass = false;
    double worst = 0.0;              ///< most negative normalized second difference
    std::vector<double> violations;  ///< τ where the scan failed
};

/// Convexity scan of g(τ) = τ^{p_c} μ(τ) on (0, tau_hi] (default τ0).
A3Result check_A3_convexity(const Modulus& m, double p_c, std::optional<double> tau_hi = std::nullopt,
                            int samples = 2000, double tol = 1e-9);

// ---- H and its inverse -----------------------------------------------------------------

/// H(τ) = ∫_τ^{τ0} μ(ϱ)/ϱ dϱ. τ = 0 gives infinity for non-Dini moduli.
ExtendedReal H(const Modulus& m, double tau);

/// Same integral by Gauss–Kronrod quadrature in s; independent of the closed forms.
double H_quadrature(const Modulus& m, double tau);

/// Solves H(e^{-s}) = omega for s. Throws Underflow when s exceeds the double range.
double Hinv_s(const Modulus& m, double omega);

/// H^{-1}(omega) as τ. Hinv(0) = τ0 exactly. Throws Underflow when τ is not representable.
double Hinv(const Modulus& m, double omega);

// ---- lifespan prediction ---------------------------------------------------------------

struct LifespanConstants {
    double k1 = 1.0, k2 = 1.0, K = 1.0;        // lower-bound flavour
    double kt1 = 1.0, kt2 = 1.0, Kt = 1.0;     // upper-bound flavour
};

enum class LifespanStatus { Finite, GlobalExistence, BeyondFloat };
std::string_view lifespan_status_name(LifespanStatus s);

struct LifespanPrediction {
    LifespanStatus status = LifespanStatus::Finite;
    double epsilon = 0.0;
    double T_lower = 0.0, T_upper = 0.0;
    double logT_lower = 0.0, logT_upper = 0.0;
    double logT_simplified = 0.0;              ///< H(k2 ε) dropped, argument 2 k1 ε^{-2σ/d}
    std::optional<double> logT_closed_form;    ///< leading-order closed form (log moduli only)
    std::string formula_id;
    LifespanConstants constants;
};

LifespanPrediction predict_lifespan(const EquationParams& p, const Modulus& m, double epsilon,
                                    const LifespanConstants& c = {});

/// Exponent of ε in the leading term of the closed-form log T for LogPower/IterLogPower (γ<1).
double closed_form_eps_exponent(const EquationParams& p, const Modulus& m);

} // namespace sigmalab
