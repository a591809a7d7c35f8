#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace sigmalab {

/// A real number or +infinity. Infinity is a distinct state, not a large float.
class ExtendedReal {
public:
    static ExtendedReal finite(double v) { return ExtendedReal(v); }
    static ExtendedReal infinity() { return ExtendedReal(); }

    [[nodiscard]] bool is_finite() const noexcept { return value_.has_value(); }
    [[nodiscard]] bool is_infinite() const noexcept { return !value_.has_value(); }

    /// Throws if infinite.
    [[nodiscard]] double value() const;

    /// Finite value, or +inf as an IEEE double for arithmetic that tolerates it.
    [[nodiscard]] double as_double() const noexcept;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const ExtendedReal&, const ExtendedReal&) = default;

private:
    ExtendedReal() = default;
    explicit ExtendedReal(double v) : value_(v) {}
    std::optional<double> value_;
};

enum class DampingRegime { Effective, Limit, NonEffective };

std::string_view regime_name(DampingRegime r);

/// Tolerance used when deciding delta == sigma/2.
inline constexpr double kRegimeTolerance = 1e-12;

/// Parameters of u_tt + (-Δ)^σ u + (-Δ)^δ u_t = |u|^{p_c} μ(|u|) in n space dimensions.
/// Construction validates 1 <= sigma, 0 <= delta <= sigma, n >= 1, epsilon0 > 0.
class EquationParams {
public:
    EquationParams(double sigma, double delta, int n, double epsilon0 = 0.5);

    [[nodiscard]] double sigma() const noexcept { return sigma_; }
    [[nodiscard]] double delta() const noexcept { return delta_; }
    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] double epsilon0() const noexcept { return epsilon0_; }

    /// min{2δ, σ}
    [[nodiscard]] double damping_index() const noexcept;
    /// n - min{2δ, σ}; positive exactly when the critical exponent is finite.
    [[nodiscard]] double dimension_gap() const noexcept;
    [[nodiscard]] double kappa() const noexcept;
    [[nodiscard]] ExtendedReal critical_exponent() const;
    [[nodiscard]] std::pair<double, double> s0_q0() const;
    [[nodiscard]] double s0() const { return s0_q0().first; }
    [[nodiscard]] double q0() const { return s0_q0().second; }
    [[nodiscard]] DampingRegime regime() const noexcept;

private:
    double sigma_;
    double delta_;
    int n_;
    double epsilon0_;
};

// Free-function forms, mirroring the CLI vocabulary.
ExtendedReal critical_exponent(const EquationParams& p);
double kappa(const EquationParams& p);
std::pair<double, double> s0_q0(const EquationParams& p);

/// Upper dimension bound n̄(σ) for global existence in the non-effective case.
double nbar(double sigma);

enum class AdmissibilityReason {
    Ok,
    EffectiveDimensionOutOfRange,   // needs 2δ < n < 2σ
    LimitDimensionOutOfRange,       // needs σ < n
    NonEffectiveSigmaTooSmall,      // needs σ > 1 (σ in (2/3,1) is excluded by σ >= 1)
    NonEffectiveDimensionOutOfRange,// needs σ < n <= min{2σ, n̄(σ)}
    UnsupportedByTheory,            // σ = 1 with δ in (1/2, 1]: open problem
};

std::string_view reason_name(AdmissibilityReason r);

struct Admissibility {
    bool admissible;
    AdmissibilityReason reason;
};

/// Dimension constraints under which small-data global existence is known.
Admissibility global_existence_admissible(const EquationParams& p);

bool is_integer(double v, double tol = 1e-12);

} // namespace sigmalab
