#include "sigmalab/moduli.hpp"

#include "sigmalab/errors.hpp"
#include "sigmalab/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace sigmalab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Past this s = ln(1/τ) nothing downstream is meaningful in double precision.
constexpr double kSMax = 1e300;

double exp_iter(double x, int times) {
    for (int i = 0; i < times; ++i) x = std::exp(x);
    return x;
}

// ∫_{l0}^{l} x^{-γ} dx, written so that γ near 1 does not cancel.
double power_antiderivative(double l, double l0, double gamma) {
    const double lr = std::log(l / l0);
    if (std::abs(1.0 - gamma) < 1e-14) return lr;
    return std::pow(l0, 1.0 - gamma) * std::expm1((1.0 - gamma) * lr) / (1.0 - gamma);
}

void check_tau0(double tau0) {
    if (!(tau0 > 0.0 && tau0 < 1.0)) throw Error(ErrorCode::ModulusInvalid, "tau0 must lie in (0, 1)");
}

} // namespace

std::string_view modulus_kind_name(ModulusKind k) {
    switch (k) {
    case ModulusKind::Zero: return "zero";
    case ModulusKind::ConstantOne: return "constant";
    case ModulusKind::PowerLaw: return "power";
    case ModulusKind::LogPower: return "logpow";
    case ModulusKind::IterLogPower: return "iterlog";
    case ModulusKind::Tabulated: return "tabulated";
    }
    return "unknown";
}

double Modulus::default_tau0() { return std::exp(-1.0); }

Modulus Modulus::zero() {
    Modulus m;
    m.kind_ = ModulusKind::Zero;
    m.tau0_ = default_tau0();
    m.s0_ = 1.0;
    return m;
}

Modulus Modulus::constant_one(double tau0) {
    check_tau0(tau0);
    Modulus m;
    m.kind_ = ModulusKind::ConstantOne;
    m.tau0_ = tau0;
    m.s0_ = -std::log(tau0);
    return m;
}

Modulus Modulus::power_law(double a, double tau0) {
    check_tau0(tau0);
    if (!std::isfinite(a)) throw Error(ErrorCode::ModulusInvalid, "power exponent must be finite");
    Modulus m;
    m.kind_ = ModulusKind::PowerLaw;
    m.a_ = a;
    m.tau0_ = tau0;
    m.s0_ = -std::log(tau0);
    return m;
}

Modulus Modulus::log_power(double gamma, double tau0) {
    check_tau0(tau0);
    if (!(gamma > 0.0)) throw Error(ErrorCode::ModulusInvalid, "gamma must be > 0");
    Modulus m;
    m.kind_ = ModulusKind::LogPower;
    m.gamma_ = gamma;
    m.tau0_ = tau0;
    m.s0_ = -std::log(tau0);
    return m;
}

Modulus Modulus::iter_log_power(int k, double gamma, std::optional<double> tau0) {
    if (k < 2) throw Error(ErrorCode::ModulusInvalid, "iterlog depth k must be >= 2");
    if (k > 3 && !tau0)
        throw Error(ErrorCode::ModulusInvalid, "iterlog default tau0 underflows for k > 3; pass tau0");
    if (!(gamma > 0.0)) throw Error(ErrorCode::ModulusInvalid, "gamma must be > 0");
    Modulus m;
    m.kind_ = ModulusKind::IterLogPower;
    m.k_ = k;
    m.gamma_ = gamma;
    if (tau0) {
        check_tau0(*tau0);
        m.tau0_ = *tau0;
        m.s0_ = -std::log(*tau0);
    } else {
        m.s0_ = exp_iter(1.0, k - 1);
        m.tau0_ = std::exp(-m.s0_);
    }
    // every iterated log must be positive at s0 (then also for all larger s)
    double l = m.s0_;
    for (int j = 1; j <= k; ++j) {
        if (!(l > 0.0))
            throw Error(ErrorCode::ModulusDomain, "iterated log non-positive at tau0; choose a smaller tau0");
        if (j < k) l = std::log(l);
    }
    return m;
}

Modulus Modulus::tabulated(std::vector<std::pair<double, double>> samples, std::optional<double> tau0) {
    if (samples.size() < 2) throw Error(ErrorCode::ModulusInvalid, "tabulated modulus needs >= 2 samples");
    for (size_t i = 0; i < samples.size(); ++i) {
        const auto [t, mu] = samples[i];
        if (!(t > 0.0) || !std::isfinite(mu) || mu < 0.0)
            throw Error(ErrorCode::ModulusInvalid, "tabulated samples need tau > 0 and mu >= 0");
        if (i > 0 && !(t > samples[i - 1].first))
            throw Error(ErrorCode::ModulusInvalid, "tabulated tau must be strictly increasing");
        if (i > 0 && mu < samples[i - 1].second)
            throw Error(ErrorCode::ModulusInvalid, "tabulated mu must be non-decreasing");
    }
    if (samples.back().second <= 0.0) throw Error(ErrorCode::ModulusInvalid, "tabulated mu is identically 0");
    Modulus m;
    m.kind_ = ModulusKind::Tabulated;
    m.tau0_ = tau0.value_or(samples.back().first);
    check_tau0(m.tau0_);
    m.s0_ = -std::log(m.tau0_);
    const size_t n = samples.size();
    m.knots_s_.resize(n);
    m.knots_mu_.resize(n);
    for (size_t i = 0; i < n; ++i) {
        m.knots_s_[i] = -std::log(samples[n - 1 - i].first);
        m.knots_mu_[i] = samples[n - 1 - i].second;
    }
    m.knots_F_.assign(n, 0.0);
    for (size_t i = 1; i < n; ++i)
        m.knots_F_[i] = m.knots_F_[i - 1] +
                        0.5 * (m.knots_mu_[i] + m.knots_mu_[i - 1]) * (m.knots_s_[i] - m.knots_s_[i - 1]);
    m.tail_slope_ = (m.knots_mu_[n - 1] - m.knots_mu_[n - 2]) / (m.knots_s_[n - 1] - m.knots_s_[n - 2]);
    m.samples_ = std::move(samples);
    return m;
}

// ℓ_k(s), with the product ℓ_1⋯ℓ_{k-1} on the side.
double Modulus::iter_logs(double s, int k, double* prod_below_k) {
    double l = s, prod = 1.0;
    for (int j = 1; j < k; ++j) {
        prod *= l;
        l = std::log(l);
    }
    if (prod_below_k) *prod_below_k = prod;
    return l;
}

double Modulus::tab_mu_s(double s) const {
    if (s <= knots_s_.front()) return knots_mu_.front();
    if (s >= knots_s_.back()) return std::max(0.0, knots_mu_.back() + tail_slope_ * (s - knots_s_.back()));
    const auto it = std::upper_bound(knots_s_.begin(), knots_s_.end(), s);
    const size_t i = static_cast<size_t>(it - knots_s_.begin()) - 1;
    const double w = (s - knots_s_[i]) / (knots_s_[i + 1] - knots_s_[i]);
    return knots_mu_[i] + w * (knots_mu_[i + 1] - knots_mu_[i]);
}

double Modulus::tab_F(double s) const {
    if (s <= knots_s_.front()) return knots_mu_.front() * (s - knots_s_.front());
    if (s >= knots_s_.back()) {
        const double mu_l = knots_mu_.back();
        double ds = s - knots_s_.back();
        if (tail_slope_ < 0.0) ds = std::min(ds, -mu_l / tail_slope_);
        return knots_F_.back() + mu_l * ds + 0.5 * tail_slope_ * ds * ds;
    }
    const auto it = std::upper_bound(knots_s_.begin(), knots_s_.end(), s);
    const size_t i = static_cast<size_t>(it - knots_s_.begin()) - 1;
    const double slope = (knots_mu_[i + 1] - knots_mu_[i]) / (knots_s_[i + 1] - knots_s_[i]);
    const double ds = s - knots_s_[i];
    return knots_F_[i] + knots_mu_[i] * ds + 0.5 * slope * ds * ds;
}

double Modulus::mu_s(double s) const {
    switch (kind_) {
    case ModulusKind::Zero: return 0.0;
    case ModulusKind::ConstantOne: return 1.0;
    case ModulusKind::PowerLaw: return std::exp(-a_ * s);
    case ModulusKind::LogPower: return std::pow(std::max(s, s0_), -gamma_);
    case ModulusKind::IterLogPower: {
        double prod = 1.0;
        const double lk = iter_logs(std::max(s, s0_), k_, &prod);
        return std::pow(lk, -gamma_) / prod;
    }
    case ModulusKind::Tabulated: return tab_mu_s(std::max(s, s0_));
    }
    return 0.0;
}

double Modulus::mu(double tau) const {
    if (!(tau >= 0.0)) throw Error(ErrorCode::ModulusDomain, "mu evaluated at negative or NaN tau");
    if (kind_ == ModulusKind::PowerLaw) return std::pow(tau, a_);
    if (tau == 0.0) {
        switch (kind_) {
        case ModulusKind::ConstantOne: return 1.0;
        case ModulusKind::Tabulated: return tail_slope_ < 0.0 ? 0.0 : knots_mu_.back();
        default: return 0.0;
        }
    }
    return mu_s(-std::log(tau));
}

double Modulus::mu_prime(double tau) const {
    if (!(tau > 0.0)) throw Error(ErrorCode::ModulusDomain, "mu_prime needs tau > 0");
    if (kind_ == ModulusKind::PowerLaw) return a_ * std::pow(tau, a_ - 1.0);
    if (tau > tau0_) return 0.0;
    const double s = -std::log(tau);
    switch (kind_) {
    case ModulusKind::Zero:
    case ModulusKind::ConstantOne: return 0.0;
    case ModulusKind::LogPower: return gamma_ * std::pow(s, -gamma_ - 1.0) / tau;
    case ModulusKind::IterLogPower: {
        double l = s, prod = 1.0, sum = 0.0;
        for (int j = 1; j < k_; ++j) {
            prod *= l;
            sum += 1.0 / prod;
            l = std::log(l);
        }
        sum += gamma_ / (prod * l);
        return mu_s(s) * sum / tau;
    }
    case ModulusKind::Tabulated: {
        const double h = 1e-6 * std::max(1.0, s);
        return -(tab_mu_s(s + h) - tab_mu_s(s - h)) / (2.0 * h) / tau;
    }
    default: return 0.0;
    }
}

double Modulus::H_s(double s) const {
    switch (kind_) {
    case ModulusKind::Zero: return 0.0;
    case ModulusKind::ConstantOne: return s - s0_;
    case ModulusKind::PowerLaw:
        if (a_ == 0.0) return s - s0_;
        return -std::exp(-a_ * s0_) * std::expm1(-a_ * (s - s0_)) / a_;
    case ModulusKind::LogPower:
        if (s <= s0_) return mu_s(s0_) * (s - s0_);
        return power_antiderivative(s, s0_, gamma_);
    case ModulusKind::IterLogPower:
        if (s <= s0_) return mu_s(s0_) * (s - s0_);
        return power_antiderivative(iter_logs(s, k_, nullptr), iter_logs(s0_, k_, nullptr), gamma_);
    case ModulusKind::Tabulated:
        if (s <= s0_) return tab_mu_s(s0_) * (s - s0_);
        return tab_F(s) - tab_F(s0_);
    }
    return 0.0;
}

std::string Modulus::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << modulus_kind_name(kind_);
    switch (kind_) {
    case ModulusKind::PowerLaw: os << ":a=" << a_ << ",tau0=" << tau0_; break;
    case ModulusKind::LogPower: os << ":gamma=" << gamma_ << ",tau0=" << tau0_; break;
    case ModulusKind::IterLogPower: os << ":k=" << k_ << ",gamma=" << gamma_ << ",tau0=" << tau0_; break;
    case ModulusKind::ConstantOne: os << ":tau0=" << tau0_; break;
    case ModulusKind::Tabulated: os << ":samples=" << samples_.size() << ",tau0=" << tau0_; break;
    case ModulusKind::Zero: break;
    }
    return os.str();
}

Modulus parse_modulus(std::string_view spec) {
    const auto colon = spec.find(':');
    const std::string name(spec.substr(0, colon));
    std::map<std::string, double> kv;
    if (colon != std::string_view::npos) {
        std::string_view rest = spec.substr(colon + 1);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string_view item = rest.substr(0, comma);
            const auto eq = item.find('=');
            if (eq == std::string_view::npos)
                throw Error(ErrorCode::ConfigParse, "modulus option without '=': " + std::string(item));
            const std::string key(item.substr(0, eq));
            const std::string val(item.substr(eq + 1));
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
            if (ec != std::errc() || ptr != val.data() + val.size())
                throw Error(ErrorCode::ConfigParse, "bad number for modulus option " + key + ": " + val);
            kv[key] = v;
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
    }
    auto take = [&](const char* key) -> std::optional<double> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        const double v = it->second;
        kv.erase(it);
        return v;
    };
    auto need = [&](const char* key) {
        auto v = take(key);
        if (!v) throw Error(ErrorCode::ConfigInvalid, "modulus '" + name + "' needs option " + key);
        return *v;
    };
    const auto tau0 = take("tau0");
    Modulus m = Modulus::zero();
    if (name == "zero") {
        m = Modulus::zero();
    } else if (name == "constant" || name == "one") {
        m = Modulus::constant_one(tau0.value_or(Modulus::default_tau0()));
    } else if (name == "power") {
        const double a = need("a");
        m = Modulus::power_law(a, tau0.value_or(Modulus::default_tau0()));
    } else if (name == "logpow") {
        const double g = need("gamma");
        m = Modulus::log_power(g, tau0.value_or(Modulus::default_tau0()));
    } else if (name == "iterlog") {
        const double k = need("k");
        const double g = need("gamma");
        if (!is_integer(k)) throw Error(ErrorCode::ConfigInvalid, "iterlog k must be an integer");
        m = Modulus::iter_log_power(static_cast<int>(std::lround(k)), g, tau0);
    } else {
        throw Error(ErrorCode::ConfigInvalid, "unknown modulus '" + name + "'");
    }
    if (!kv.empty()) throw Error(ErrorCode::ConfigInvalid, "unknown modulus option '" + kv.begin()->first + "'");
    return m;
}

double eval_mu(const Modulus& m, double tau) { return m.mu(tau); }

// ---- Dini -----------------------------------------------------------------------------

std::string_view dini_name(DiniVerdict v) {
    switch (v) {
    case DiniVerdict::Dini: return "Dini";
    case DiniVerdict::NonDini: return "NonDini";
    case DiniVerdict::Indeterminate: return "Indeterminate";
    }
    return "unknown";
}

std::string_view confidence_name(Confidence c) {
    switch (c) {
    case Confidence::Analytic: return "analytic";
    case Confidence::High: return "high";
    case Confidence::Medium: return "medium";
    case Confidence::Low: return "low";
    }
    return "unknown";
}

namespace {

// Partial integrals along τ_k = τ_start 2^{-k} inside the sampled range. For a log-type
// modulus the increments decay like s^{-γ}; the fitted γ̂ decides summability.
DiniResult dini_tabulated(const Modulus& m) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto& smp = m.samples();
    const double s_start = std::max(m.s0(), -std::log(smp.back().first));
    const double s_end = -std::log(smp.front().first);
    std::vector<double> sk;
    for (double s = s_start; s <= s_end + 1e-12; s += std::log(2.0)) sk.push_back(s);
    if (sk.size() < 9) return {DiniVerdict::Indeterminate, Confidence::Low, nan};
    std::vector<double> ls, lp;
    const double first = m.H_s(sk[1]) - m.H_s(sk[0]);
    for (size_t i = 0; i + 1 < sk.size(); ++i) {
        const double inc = m.H_s(sk[i + 1]) - m.H_s(sk[i]);
        if (inc <= 1e-14 * std::max(first, 1e-300)) return {DiniVerdict::Dini, Confidence::High, kInf};
        ls.push_back(std::log(0.5 * (sk[i] + sk[i + 1])));
        lp.push_back(std::log(inc));
    }
    const size_t half = ls.size() / 2;
    const LinearFit f = fit_line(std::span(ls).subspan(half), std::span(lp).subspan(half));
    const double g = -f.slope;
    if (g > 1.2) return {DiniVerdict::Dini, g > 1.5 ? Confidence::High : Confidence::Medium, g};
    if (g < 0.8) return {DiniVerdict::NonDini, g < 0.5 ? Confidence::High : Confidence::Medium, g};
    return {DiniVerdict::Indeterminate, Confidence::Low, g};
}

} // namespace

DiniResult dini_classify(const Modulus& m) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    switch (m.kind()) {
    case ModulusKind::Zero: return {DiniVerdict::Dini, Confidence::Analytic, nan};
    case ModulusKind::ConstantOne: return {DiniVerdict::NonDini, Confidence::Analytic, nan};
    case ModulusKind::PowerLaw:
        return {m.a() > 0.0 ? DiniVerdict::Dini : DiniVerdict::NonDini, Confidence::Analytic, nan};
    case ModulusKind::LogPower:
    case ModulusKind::IterLogPower:
        return {m.gamma() > 1.0 ? DiniVerdict::Dini : DiniVerdict::NonDini, Confidence::Analytic, nan};
    case ModulusKind::Tabulated: return dini_tabulated(m);
    }
    return {DiniVerdict::Indeterminate, Confidence::Low, nan};
}

// ---- A1 / A3 -------------------------------------------------------------------------

namespace {

double a1_ratio(const Modulus& m, double tau) {
    if (m.kind() == ModulusKind::PowerLaw) return std::abs(m.a());
    if (tau > m.tau0()) return 0.0;
    const double s = -std::log(tau);
    switch (m.kind()) {
    case ModulusKind::Zero:
    case ModulusKind::ConstantOne: return 0.0;
    case ModulusKind::LogPower: return m.gamma() / s;
    case ModulusKind::IterLogPower: {
        double l = s, prod = 1.0, sum = 0.0;
        for (int j = 1; j < m.k(); ++j) {
            prod *= l;
            sum += 1.0 / prod;
            l = std::log(l);
        }
        return sum + m.gamma() / (prod * l);
    }
    case ModulusKind::Tabulated: {
        const double mu = m.mu_s(s);
        const double h = 1e-6 * std::max(1.0, s);
        const double d = std::abs(m.mu_s(s + h) - m.mu_s(s - h)) / (2.0 * h);
        if (mu <= 0.0) return d > 0.0 ? kInf : 0.0;
        return d / mu;
    }
    default: return 0.0;
    }
}

} // namespace

A1Result check_A1(const Modulus& m, std::optional<double> tau_lo, std::optional<double> tau_hi, int samples) {
    const double hi = tau_hi.value_or(m.tau0());
    const double lo = tau_lo.value_or(1e-12 * m.tau0());
    if (!(lo > 0.0 && lo < hi)) throw Error(ErrorCode::ModulusDomain, "check_A1 needs 0 < tau_lo < tau_hi");
    // grid runs from τ_hi down toward 0
    const auto grid = geomspace(hi, lo, std::max(samples, 20));
    std::vector<double> r(grid.size());
    A1Result res;
    for (size_t i = 0; i < grid.size(); ++i) {
        r[i] = a1_ratio(m, grid[i]);
        if (r[i] > res.sup || i == 0) {
            res.sup = r[i];
            res.tau_at_sup = grid[i];
        }
    }
    // Unbounded growth toward 0: over the smaller-τ half of the grid the ratio keeps rising
    // at least like (ln 1/τ)^{1/2}.
    const bool finite = std::all_of(r.begin(), r.end(), [](double v) { return std::isfinite(v); });
    bool runaway = false;
    if (finite) {
        std::vector<double> ls, lr;
        for (size_t i = grid.size() / 2; i < grid.size(); ++i)
            if (r[i] > 0.0) {
                ls.push_back(std::log(-std::log(grid[i]) + 1.0));
                lr.push_back(std::log(r[i]));
            }
        if (ls.size() >= 3 && ls.front() != ls.back()) runaway = fit_line(ls, lr).slope > 0.5;
    }
    res.pass = finite && !runaway;
    return res;
}

A3Result check_A3_convexity(const Modulus& m, double p_c, std::optional<double> tau_hi, int samples, double tol) {
    if (!std::isfinite(p_c)) throw Error(ErrorCode::ParamsInvalid, "A3 check needs a finite p_c");
    const double hi = tau_hi.value_or(m.tau0());
    std::vector<double> x = linspace(hi / samples, hi, samples);
    const auto g2 = geomspace(1e-8 * hi, hi, samples);
    x.insert(x.end(), g2.begin(), g2.end());
    std::sort(x.begin(), x.end());
    x.erase(std::unique(x.begin(), x.end(), [](double a, double b) { return std::abs(a - b) <= 1e-15 * b; }),
            x.end());
    auto g = [&](double t) {
        if (m.kind() == ModulusKind::PowerLaw) return std::pow(t, p_c + m.a());
        return std::pow(t, p_c) * m.mu(t);
    };
    std::vector<double> gv(x.size());
    for (size_t i = 0; i < x.size(); ++i) gv[i] = g(x[i]);
    A3Result res;
    res.pass = true;
    for (size_t i = 1; i + 1 < x.size(); ++i) {
        const double d1 = (gv[i] - gv[i - 1]) / (x[i] - x[i - 1]);
        const double d2 = (gv[i + 1] - gv[i]) / (x[i + 1] - x[i]);
        const double w = x[i + 1] - x[i - 1];
        const double dd = 2.0 * (d2 - d1) / w;
        const double scale = std::abs(gv[i - 1]) + 2.0 * std::abs(gv[i]) + std::abs(gv[i + 1]);
        const double normalized = scale > 0.0 ? dd * w * w / scale : 0.0;
        res.worst = std::min(res.worst, normalized);
        if (normalized < -tol) {
            res.pass = false;
            if (res.violations.size() < 64) res.violations.push_back(x[i]);
        }
    }
    return res;
}

// ---- H ---------------------------------------------------------------------------------

ExtendedReal H(const Modulus& m, double tau) {
    if (!(tau >= 0.0)) throw Error(ErrorCode::ModulusDomain, "H needs tau >= 0");
    if (tau > 0.0) return ExtendedReal::finite(m.H_s(-std::log(tau)));
    switch (m.kind()) {
    case ModulusKind::Zero: return ExtendedReal::finite(0.0);
    case ModulusKind::PowerLaw:
        if (m.a() > 0.0) return ExtendedReal::finite(std::exp(-m.a() * m.s0()) / m.a());
        return ExtendedReal::infinity();
    case ModulusKind::LogPower:
        if (m.gamma() > 1.0) return ExtendedReal::finite(std::pow(m.s0(), 1.0 - m.gamma()) / (m.gamma() - 1.0));
        return ExtendedReal::infinity();
    case ModulusKind::IterLogPower: {
        double l = m.s0();
        for (int j = 1; j < m.k(); ++j) l = std::log(l);
        if (m.gamma() > 1.0) return ExtendedReal::finite(std::pow(l, 1.0 - m.gamma()) / (m.gamma() - 1.0));
        return ExtendedReal::infinity();
    }
    case ModulusKind::Tabulated: {
        const double v = m.H_s(kSMax);
        return std::isfinite(v) && m.mu_s(kSMax) == 0.0 ? ExtendedReal::finite(v) : ExtendedReal::infinity();
    }
    case ModulusKind::ConstantOne: return ExtendedReal::infinity();
    }
    return ExtendedReal::infinity();
}

double H_quadrature(const Modulus& m, double tau) {
    if (!(tau > 0.0)) throw Error(ErrorCode::ModulusDomain, "H_quadrature needs tau > 0");
    const double s = -std::log(tau);
    auto f = [&](double r) { return m.mu_s(r); };
    double err = 0.0;
    double total = 0.0;
    // integrate knot to knot so that piecewise data never straddles a kink
    std::vector<double> cuts{std::min(s, m.s0()), std::max(s, m.s0())};
    if (m.kind() == ModulusKind::Tabulated) {
        for (const auto& [t, mu] : m.samples()) {
            const double k = -std::log(t);
            if (k > cuts.front() && k < cuts.back()) cuts.push_back(k);
        }
        std::sort(cuts.begin(), cuts.end());
    }
    for (size_t i = 0; i + 1 < cuts.size(); ++i)
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 15, 1e-14,
                                                                                &err);
    return s >= m.s0() ? total : -total;
}

double Hinv_s(const Modulus& m, double omega) {
    if (!std::isfinite(omega)) throw Error(ErrorCode::Underflow, "Hinv argument is not finite");
    const double s0 = m.s0();
    if (omega == 0.0) return s0;
    if (m.kind() == ModulusKind::Zero) throw Error(ErrorCode::ModulusInvalid, "H is identically 0 for mu = 0");
    auto f = [&](double s) { return m.H_s(s) - omega; };
    double lo = s0, hi = s0;
    const double step0 = std::max(1.0, std::abs(s0));
    if (omega > 0.0) {
        hi = s0 + step0;
        while (f(hi) < 0.0) {
            lo = hi;
            hi = s0 + 2.0 * (hi - s0);
            if (hi > kSMax) throw Error(ErrorCode::Underflow, "Hinv: ln(1/tau) exceeds the double range");
        }
    } else {
        lo = s0 - step0;
        while (f(lo) > 0.0) {
            hi = lo;
            lo = s0 - 2.0 * (s0 - lo);
            if (lo < -kSMax) throw Error(ErrorCode::ModulusDomain, "Hinv: omega below the range of H");
        }
    }
    // safeguarded Newton, dH/ds = μ(e^{-s})
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 300; ++it) {
        const double fs = f(s);
        if (fs == 0.0) return s;
        if (fs > 0.0) hi = s;
        else lo = s;
        const double d = m.mu_s(s);
        double sn = (d > 0.0 && std::isfinite(fs)) ? s - fs / d : 0.5 * (lo + hi);
        if (!(sn > lo && sn < hi)) sn = 0.5 * (lo + hi);
        const double tol = 1e-15 * std::max(1.0, std::abs(sn));
        if (std::abs(sn - s) <= tol || hi - lo <= tol) return sn;
        s = sn;
    }
    return s;
}

double Hinv(const Modulus& m, double omega) {
    if (omega == 0.0) return m.tau0();
    const double s = Hinv_s(m, omega);
    const double tau = std::exp(-s);
    if (!(tau >= std::numeric_limits<double>::min()))
        throw Error(ErrorCode::Underflow, "Hinv: tau below the normal double range (ln tau = " +
                                              std::to_string(-s) + ")");
    return tau;
}

// ---- lifespan --------------------------------------------------------------------------

std::string_view lifespan_status_name(LifespanStatus s) {
    switch (s) {
    case LifespanStatus::Finite: return "finite";
    case LifespanStatus::GlobalExistence: return "global";
    case LifespanStatus::BeyondFloat: return "beyond-float";
    }
    return "unknown";
}

double closed_form_eps_exponent(const EquationParams& p, const Modulus& m) {
    const double ex = 2.0 * p.sigma() / p.dimension_gap();
    if (m.kind() == ModulusKind::LogPower || m.kind() == ModulusKind::IterLogPower)
        return m.gamma() < 1.0 ? ex / (1.0 - m.gamma()) : ex;
    return ex;
}

LifespanPrediction predict_lifespan(const EquationParams& p, const Modulus& m, double epsilon,
                                    const LifespanConstants& c) {
    if (!(epsilon > 0.0)) throw Error(ErrorCode::ParamsInvalid, "epsilon must be > 0");
    if (p.critical_exponent().is_infinite())
        throw Error(ErrorCode::ParamsInvalid, "lifespan prediction needs a finite critical exponent");
    LifespanPrediction out;
    out.epsilon = epsilon;
    out.constants = c;
    if (dini_classify(m).verdict == DiniVerdict::Dini) {
        out.status = LifespanStatus::GlobalExistence;
        out.T_lower = out.T_upper = kInf;
        out.logT_lower = out.logT_upper = out.logT_simplified = kInf;
        out.formula_id = "global";
        return out;
    }
    const double d = p.dimension_gap();
    const double e = p.kappa() / d;
    const double ex = 2.0 * p.sigma() / d;
    const double le = std::log(epsilon);
    const double drive = std::exp(-ex * le); // ε^{-2σ/d}

    bool beyond = false;
    auto log_T = [&](double k1, double k2, double K, bool simplified) {
        const double omega = simplified ? 2.0 * k1 * drive : k1 * drive + m.H_s(-std::log(k2 * epsilon));
        try {
            return std::log(K) + e * le + e * Hinv_s(m, omega);
        } catch (const Error& err) {
            if (err.code() != ErrorCode::Underflow) throw;
            beyond = true;
            return kInf;
        }
    };
    out.logT_lower = log_T(c.k1, c.k2, c.K, false);
    out.logT_upper = log_T(c.kt1, c.kt2, c.Kt, false);
    out.logT_simplified = log_T(c.k1, c.k2, c.K, true);

    const double w = 2.0 * c.k1 * drive;
    switch (m.kind()) {
    case ModulusKind::ConstantOne:
        out.formula_id = "critical-power";
        out.logT_closed_form = e * le + e * (m.s0() + w);
        break;
    case ModulusKind::PowerLaw:
        if (m.a() < 0.0) {
            out.formula_id = "subcritical-power";
            out.logT_closed_form = e * le + e / (-m.a()) * std::log(std::exp(-m.a() * m.s0()) - m.a() * w);
        } else {
            out.formula_id = "critical-power";
            out.logT_closed_form = e * le + e * (m.s0() + w);
        }
        break;
    case ModulusKind::LogPower: {
        const double g = m.gamma();
        if (g < 1.0) {
            out.formula_id = "logpow-subunit";
            out.logT_closed_form = e * le + e * std::pow((1.0 - g) * w, 1.0 / (1.0 - g));
        } else {
            out.formula_id = "logpow-unit";
            out.logT_closed_form = e * le + e * m.s0() * std::exp(w);
        }
        break;
    }
    case ModulusKind::IterLogPower: {
        const double g = m.gamma();
        double lk0 = m.s0();
        for (int j = 1; j < m.k(); ++j) lk0 = std::log(lk0);
        const double lk = g < 1.0 ? std::pow((1.0 - g) * w, 1.0 / (1.0 - g)) : lk0 * std::exp(w);
        out.formula_id = g < 1.0 ? "iterlog-subunit" : "iterlog-unit";
        out.logT_closed_form = e * le + e * exp_iter(lk, m.k() - 1);
        break;
    }
    default: out.formula_id = "quadrature"; break;
    }

    constexpr double kLogMax = 709.0;
    out.T_lower = out.logT_lower < kLogMax ? std::exp(out.logT_lower) : kInf;
    out.T_upper = out.logT_upper < kLogMax ? std::exp(out.logT_upper) : kInf;
    out.status = (beyond || !std::isfinite(out.T_lower) || !std::isfinite(out.T_upper)) ? LifespanStatus::BeyondFloat
                                                                                        : LifespanStatus::Finite;
    return out;
}

} // namespace sigmalab
