#include "sigmalab/params.hpp"

#include "sigmalab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sigmalab {

double ExtendedReal::value() const {
    if (!value_) throw Error(ErrorCode::ParamsInvalid, "value() on an infinite extended real");
    return *value_;
}

double ExtendedReal::as_double() const noexcept {
    return value_ ? *value_ : std::numeric_limits<double>::infinity();
}

std::string ExtendedReal::to_string() const {
    if (!value_) return "inf";
    std::ostringstream os;
    os.precision(17);
    os << *value_;
    return os.str();
}

std::string_view regime_name(DampingRegime r) {
    switch (r) {
    case DampingRegime::Effective: return "effective";
    case DampingRegime::Limit: return "limit";
    case DampingRegime::NonEffective: return "non-effective";
    }
    return "unknown";
}

bool is_integer(double v, double tol) { return std::abs(v - std::round(v)) <= tol; }

EquationParams::EquationParams(double sigma, double delta, int n, double epsilon0)
    : sigma_(sigma), delta_(delta), n_(n), epsilon0_(epsilon0) {
    if (!std::isfinite(sigma) || sigma < 1.0)
        throw Error(ErrorCode::ParamsInvalid, "sigma must be >= 1");
    if (!std::isfinite(delta) || delta < 0.0 || delta > sigma)
        throw Error(ErrorCode::ParamsInvalid, "delta must lie in [0, sigma]");
    if (n < 1) throw Error(ErrorCode::ParamsInvalid, "n must be a positive integer");
    if (!(epsilon0 > 0.0)) throw Error(ErrorCode::ParamsInvalid, "epsilon0 must be > 0");
}

double EquationParams::damping_index() const noexcept { return std::min(2.0 * delta_, sigma_); }

double EquationParams::dimension_gap() const noexcept { return n_ - damping_index(); }

double EquationParams::kappa() const noexcept { return 2.0 * sigma_ - damping_index(); }

ExtendedReal EquationParams::critical_exponent() const {
    const double gap = dimension_gap();
    if (gap <= 0.0) return ExtendedReal::infinity();
    return ExtendedReal::finite(1.0 + 2.0 * sigma_ / gap);
}

std::pair<double, double> EquationParams::s0_q0() const {
    const bool sigma_int = is_integer(sigma_);
    const bool delta_int = is_integer(delta_);
    const double frac_sigma = sigma_ - std::floor(sigma_);
    const double frac_delta = delta_ - std::floor(delta_);
    double s0 = 0.0;
    if (!sigma_int && !delta_int) s0 = std::min(frac_sigma, frac_delta);
    else if (!sigma_int) s0 = frac_sigma;
    else if (!delta_int) s0 = frac_delta;
    else s0 = epsilon0_;
    return {s0, n_ + 2.0 * s0};
}

DampingRegime EquationParams::regime() const noexcept {
    const double half = 0.5 * sigma_;
    if (std::abs(delta_ - half) < kRegimeTolerance) return DampingRegime::Limit;
    return delta_ < half ? DampingRegime::Effective : DampingRegime::NonEffective;
}

ExtendedReal critical_exponent(const EquationParams& p) { return p.critical_exponent(); }
double kappa(const EquationParams& p) { return p.kappa(); }
std::pair<double, double> s0_q0(const EquationParams& p) { return p.s0_q0(); }

double nbar(double sigma) {
    const double c = 3.0 * sigma - 2.0;
    return 0.5 * c * (std::sqrt(1.0 + 8.0 * sigma / (c * c)) + 1.0);
}

std::string_view reason_name(AdmissibilityReason r) {
    switch (r) {
    case AdmissibilityReason::Ok: return "ok";
    case AdmissibilityReason::EffectiveDimensionOutOfRange: return "effective-dimension-out-of-range";
    case AdmissibilityReason::LimitDimensionOutOfRange: return "limit-dimension-out-of-range";
    case AdmissibilityReason::NonEffectiveSigmaTooSmall: return "non-effective-sigma-too-small";
    case AdmissibilityReason::NonEffectiveDimensionOutOfRange: return "non-effective-dimension-out-of-range";
    case AdmissibilityReason::UnsupportedByTheory: return "unsupported-by-theory";
    }
    return "unknown";
}

Admissibility global_existence_admissible(const EquationParams& p) {
    const double sigma = p.sigma();
    const double delta = p.delta();
    const double n = p.n();
    switch (p.regime()) {
    case DampingRegime::Effective:
        if (2.0 * delta < n && n < 2.0 * sigma) return {true, AdmissibilityReason::Ok};
        return {false, AdmissibilityReason::EffectiveDimensionOutOfRange};
    case DampingRegime::Limit:
        if (sigma < n) return {true, AdmissibilityReason::Ok};
        return {false, AdmissibilityReason::LimitDimensionOutOfRange};
    case DampingRegime::NonEffective:
        if (is_integer(sigma) && std::lround(sigma) == 1)
            return {false, AdmissibilityReason::UnsupportedByTheory};
        if (!(sigma > 1.0)) return {false, AdmissibilityReason::NonEffectiveSigmaTooSmall};
        if (sigma < n && n <= std::min(2.0 * sigma, nbar(sigma))) return {true, AdmissibilityReason::Ok};
        return {false, AdmissibilityReason::NonEffectiveDimensionOutOfRange};
    }
    return {false, AdmissibilityReason::UnsupportedByTheory};
}

} // namespace sigmalab
