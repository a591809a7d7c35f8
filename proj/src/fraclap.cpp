#include "sigmalab/fraclap.hpp"

#include "sigmalab/errors.hpp"
#include "sigmalab/numerics.hpp"
#include "sigmalab/params.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <tuple>

namespace sigmalab {

namespace bmq = boost::math::quadrature;

namespace {

template <class F>
double gk(F&& f, double a, double b, double* err_acc = nullptr, double tol = 1e-10) {
    double err = 0.0;
    const double v = bmq::gauss_kronrod<double, 31>::integrate(f, a, b, 8, tol, &err);
    if (err_acc) *err_acc += err;
    return v;
}

void require_fractional(double s) {
    if (!(s > 0.0) || is_integer(s, 1e-12))
        throw Error(ErrorCode::InvalidOrder, "singular representation needs a positive non-integer order");
}

// ∫_0^∞ sin^{2p}(y) y^{-1-2s} dy
double sine_integral_1d(double s, int p) {
    double err = 0.0;
    // [0,1]: peel off the y^{2p-1-2s} singularity exactly
    auto reg = [&](double y) {
        double sinc_m1;
        if (y < 1e-2) {
            const double y2 = y * y;
            sinc_m1 = -y2 / 6.0 + y2 * y2 / 120.0 - y2 * y2 * y2 / 5040.0;
        } else {
            sinc_m1 = std::sin(y) / y - 1.0;
        }
        return std::pow(y, 2.0 * p - 1.0 - 2.0 * s) * std::expm1(2.0 * p * std::log1p(sinc_m1));
    };
    double total = 1.0 / (2.0 * p - 2.0 * s) + gk(reg, 0.0, 1.0, &err);

    auto f = [&](double y) { return std::pow(std::sin(y), 2 * p) * std::pow(y, -1.0 - 2.0 * s); };
    constexpr int kPeriods = 200;
    const double A = 1.0 + kPeriods * M_PI;
    for (int k = 0; k < kPeriods; ++k) total += gk(f, 1.0 + k * M_PI, 1.0 + (k + 1) * M_PI, &err);

    // tail: power-reduce sin^{2p} and integrate each cosine term by repeated parts
    const double two_p = std::pow(2.0, -2.0 * p);
    total += two_p * boost::math::binomial_coefficient<double>(2 * p, p) * std::pow(A, -2.0 * s) / (2.0 * s);
    const double alpha = 1.0 + 2.0 * s;
    double last_term = 0.0;
    for (int j = 1; j <= p; ++j) {
        const double cj = 2.0 * two_p * ((j % 2) ? -1.0 : 1.0) *
                          boost::math::binomial_coefficient<double>(2 * p, p - j);
        const double w = 2.0 * j;
        const std::complex<double> iw(0.0, w);
        std::complex<double> sum = 0.0, term = std::pow(A, -alpha);
        for (int k = 0; k < 10; ++k) {
            sum += term;
            term *= (alpha + k) / (iw * A);
        }
        last_term = std::max(last_term, std::abs(term));
        const std::complex<double> I = -std::exp(iw * A) / iw * sum;
        total += cj * I.real();
    }
    if (err > 1e-10 * std::abs(total) || last_term > 1e-14)
        throw Error(ErrorCode::IntegrationFailure, "C_2s sine integral could not be certified");
    return total;
}

} // namespace

double c2s_constant(double s, int n) {
    require_fractional(s);
    if (n < 1) throw Error(ErrorCode::InvalidOrder, "dimension must be >= 1");
    static std::mutex mu;
    static std::map<std::pair<double, int>, double> cache;
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find({s, n}); it != cache.end()) return it->second;
    }
    const int m = static_cast<int>(std::floor(s));
    const double J = sine_integral_1d(s, m + 1);
    // polar reduction: ∫_{S^{n-1}} |ω_1|^{2s} dω = 2 π^{(n-1)/2} Γ(s+1/2) / Γ(s+n/2)
    const double sphere = 2.0 * std::pow(M_PI, 0.5 * (n - 1)) * std::exp(std::lgamma(s + 0.5) - std::lgamma(s + 0.5 * n));
    const double I = (n == 1 ? 2.0 * J : J * sphere);
    const double c = std::pow(2.0, 2.0 * s - 2.0 * m - 2.0) / I;
    std::lock_guard lock(mu);
    cache[{s, n}] = c;
    return c;
}

// ---- singular integral -------------------------------------------------------------------

SingularResult singular_fraclap_ex(const ScalarFunction& h, double s, const double* x, const SingularOptions& opt) {
    require_fractional(s);
    if (h.n != 1 && h.n != 2) throw Error(ErrorCode::InvalidOrder, "singular_fraclap supports n = 1, 2");
    const int n = h.n;
    const int p = static_cast<int>(std::floor(s)) + 1;

    // centred difference (τ_{y/2} - τ_{-y/2})^{2p}: shifts k_j = p - j, weights (-1)^j C(2p, j)
    std::vector<double> cj, kj;
    for (int j = 0; j <= 2 * p; ++j) {
        if (j == p) continue;
        cj.push_back(((j % 2) ? -1.0 : 1.0) * boost::math::binomial_coefficient<double>(2 * p, j));
        kj.push_back(static_cast<double>(p - j));
    }
    const double c_center = ((p % 2) ? -1.0 : 1.0) * boost::math::binomial_coefficient<double>(2 * p, p);
    const double hx = h.eval(x);

    // directions and weights of the angular rule: {±1} in 1D, periodic trapezoid in 2D
    std::vector<std::array<double, 2>> dirs;
    std::vector<double> wts;
    if (n == 1) {
        dirs = {{1.0, 0.0}, {-1.0, 0.0}};
        wts = {1.0, 1.0};
    } else {
        constexpr int M = 64;
        for (int i = 0; i < M; ++i) {
            const double th = 2.0 * M_PI * i / M;
            dirs.push_back({std::cos(th), std::sin(th)});
            wts.push_back(2.0 * M_PI / M);
        }
    }
    const double wsum = n == 1 ? 2.0 : 2.0 * M_PI;

    auto noncenter = [&](double r) {
        double acc = 0.0;
        double pt[2];
        for (size_t d = 0; d < dirs.size(); ++d) {
            double inner = 0.0;
            for (size_t j = 0; j < cj.size(); ++j) {
                pt[0] = x[0] + kj[j] * r * dirs[d][0];
                if (n == 2) pt[1] = x[1] + kj[j] * r * dirs[d][1];
                inner += cj[j] * h.eval(pt);
            }
            acc += wts[d] * inner;
        }
        return acc;
    };
    auto theta = [&](double r) { return noncenter(r) + wsum * c_center * hx; };

    double err = 0.0;
    const double xn = n == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);

    // (a) Taylor region: Θ(r) / r^{2p} ≈ a + b r^2 from two samples
    double sabs = std::abs(c_center);
    for (double c : cj) sabs += std::abs(c);
    // Θ(r) ~ r^{2p} is formed by cancellation, so higher orders need a wider Taylor cut
    const double yt = h.scale * std::max(0.02, 2.0 * std::pow(1e-16 * sabs, 1.0 / (2 * p + 4)));
    const double q1 = theta(yt) / std::pow(yt, 2 * p);
    const double q2 = theta(0.5 * yt) / std::pow(0.5 * yt, 2 * p);
    const double b = (q1 - q2) / (0.75 * yt * yt);
    const double a = q1 - b * yt * yt;
    double total = a * std::pow(yt, 2 * p - 2 * s) / (2 * p - 2 * s) + b * std::pow(yt, 2 * p + 2 - 2 * s) / (2 * p + 2 - 2 * s);
    // next Taylor term, assuming curvature on the length scale of h
    err += std::abs(b) / (h.scale * h.scale) * std::pow(yt, 2 * p + 4 - 2 * s) / (2 * p + 4 - 2 * s);
    // roundoff in q1, q2 amplified by the extrapolation
    err += 8.0 * 1e-16 * sabs * wsum * (std::abs(hx) + 1.0) * std::pow(0.5 * yt, -2 * p) * std::pow(yt, 2 * p - 2 * s) / (2 * p - 2 * s);

    // (b) up to the split radius r̄ = max(1, |x|/2)
    const double rbar = std::max(1.0, 0.5 * xn);
    auto integrand = [&](double r) { return theta(r) * std::pow(r, -1.0 - 2.0 * s); };
    if (rbar > yt) {
        std::vector<double> cuts = geomspace(yt, rbar, std::max(2, static_cast<int>(std::ceil(std::log2(rbar / yt))) + 1));
        for (size_t i = 0; i + 1 < cuts.size(); ++i) total += gk(integrand, cuts[i], cuts[i + 1], &err);
    }

    // (c) outer region
    if (h.decay.rate > 0.0) {
        total += wsum * c_center * hx * std::pow(rbar, -2.0 * s) / (2.0 * s);
        const double sabs_nc = sabs - std::abs(c_center);
        const double A = h.decay.amplitude;
        const double rho = h.decay.rate;
        auto tail_bound = [&](double R) {
            return wsum * sabs_nc * A * std::pow(1.0 + std::max(0.0, R - xn), -rho) * std::pow(R, -2.0 * s) / (2.0 * s);
        };
        double R = std::max({2.0 * xn + 2.0 * rbar, 4.0 * rbar, 8.0 * h.scale});
        while (tail_bound(R) > 0.1 * opt.tol) {
            R *= 2.0;
            if (R > 1e9) throw Error(ErrorCode::AccuracyLoss, "decay too slow to truncate the tail");
        }
        err += tail_bound(R);
        std::vector<double> cuts;
        for (double r = rbar; r < R; r *= 2.0) cuts.push_back(r);
        cuts.push_back(R);
        for (double k : kj)
            if (const double y = xn / std::abs(k); y > rbar && y < R) cuts.push_back(y);
        std::sort(cuts.begin(), cuts.end());
        auto outer = [&](double r) { return noncenter(r) * std::pow(r, -1.0 - 2.0 * s); };
        for (size_t i = 0; i + 1 < cuts.size(); ++i)
            if (cuts[i + 1] > cuts[i]) total += gk(outer, cuts[i], cuts[i + 1], &err);
    } else {
        bmq::exp_sinh<double> es;
        double e2 = 0.0;
        total += es.integrate(integrand, rbar, std::numeric_limits<double>::infinity(), 1e-10, &e2);
        err += e2;
    }

    const double sign = (p % 2) ? -1.0 : 1.0; // (-1)^{[s]+1} with [s]+1 = p
    const double C = c2s_constant(s, n);
    SingularResult res{sign * C * total, C * err};
    if (!std::isfinite(res.value) || res.error_estimate > opt.max_rel_error * std::max(1.0, std::abs(res.value)))
        throw Error(ErrorCode::AccuracyLoss,
                    "singular integral error estimate " + std::to_string(res.error_estimate) + " exceeds budget");
    return res;
}

double singular_fraclap(const ScalarFunction& h, double s, const double* x, const SingularOptions& opt) {
    return singular_fraclap_ex(h, s, x, opt).value;
}

// ---- Gaussian oracles ----------------------------------------------------------------------

ScalarFunction gaussian_function(int n) {
    ScalarFunction g;
    g.n = n;
    g.eval = [n](const double* x) {
        const double r2 = n == 1 ? x[0] * x[0] : x[0] * x[0] + x[1] * x[1];
        return std::exp(-0.5 * r2);
    };
    // sup_z (1+z)^12 e^{-z^2/2} sits at z = 3
    g.decay = {std::pow(4.0, 12) * std::exp(-4.5), 12.0};
    return g;
}

double gaussian_fraclap_fourier(double s, int n, double r) {
    if (n != 1 && n != 2) throw Error(ErrorCode::InvalidOrder, "Gaussian oracle supports n = 1, 2");
    auto f = [&](double xi) {
        const double w = std::pow(xi, 2.0 * s) * std::exp(-0.5 * xi * xi);
        return n == 1 ? w * std::cos(xi * r) : w * xi * boost::math::cyl_bessel_j(0, xi * r);
    };
    bmq::tanh_sinh<double> ts;
    double total = ts.integrate(f, 0.0, 1.0, 1e-14);
    for (int k = 1; k < 40; ++k) total += gk(f, k, k + 1.0, nullptr, 1e-14);
    return n == 1 ? total * 2.0 / std::sqrt(2.0 * M_PI) : total;
}

double gaussian_fraclap_closed(double s, int n, double r) {
    const double a = s + 0.5 * n;
    const double b = 0.5 * n;
    const double pref = std::pow(2.0, s) * std::exp(std::lgamma(a) - std::lgamma(b));
    return pref * boost::math::hypergeometric_1F1(a, b, -0.5 * r * r);
}

CrossReport cross_validate(const ScalarFunction& h, const std::function<double(double)>& oracle, double s,
                           const std::vector<double>& points, double abs_floor) {
    require_fractional(s);
    CrossReport rep;
    rep.s = s;
    for (double x : points) {
        CrossPoint cp;
        cp.x = x;
        cp.singular = singular_fraclap(h, s, &x);
        cp.oracle = oracle(x);
        cp.rel_err = std::abs(cp.singular - cp.oracle) / (std::abs(cp.oracle) + abs_floor);
        rep.max_rel_err = std::max(rep.max_rel_err, cp.rel_err);
        rep.points.push_back(cp);
    }
    return rep;
}

// ---- Ψ and weighted bounds -----------------------------------------------------------------------

double TestFunctionPsi::operator()(double t, double r) const {
    return std::pow(1.0 + std::pow(t, 2.0 * alpha2) + std::pow(std::abs(r), 2.0 * beta2), -r0);
}

void TestFunctionPsi::validate(double sbar) const {
    if (!(alpha2 >= 1.0)) throw Error(ErrorCode::InvalidOrder, "alpha2 must be >= 1");
    if (beta2 < std::floor(sbar) + 2.0) throw Error(ErrorCode::InvalidOrder, "beta2 must be >= [sbar]+2");
    if (!(r0 > n / (2.0 * beta2))) throw Error(ErrorCode::InvalidOrder, "r0 must exceed n/(2 beta2)");
}

RadialExpr::RadialExpr(double c, double beta, int n, std::vector<RadialTerm> terms)
    : c_(c), beta_(beta), n_(n), terms_(std::move(terms)) {}

double RadialExpr::operator()(double r) const {
    r = std::abs(r);
    const double u = c_ + std::pow(r, 2.0 * beta_);
    double acc = 0.0;
    for (const auto& t : terms_) acc += t.A * std::pow(u, -t.e) * (t.p == 0.0 ? 1.0 : std::pow(r, t.p));
    return acc;
}

namespace {

std::vector<RadialTerm> merge(std::vector<RadialTerm> v) {
    std::sort(v.begin(), v.end(), [](auto& a, auto& b) { return std::tie(a.e, a.p) < std::tie(b.e, b.p); });
    std::vector<RadialTerm> out;
    for (const auto& t : v) {
        if (!out.empty() && out.back().e == t.e && out.back().p == t.p) out.back().A += t.A;
        else out.push_back(t);
    }
    std::erase_if(out, [](const RadialTerm& t) { return t.A == 0.0; });
    return out;
}

} // namespace

RadialExpr RadialExpr::derivative() const {
    std::vector<RadialTerm> d;
    for (const auto& t : terms_) {
        if (t.p != 0.0) d.push_back({t.A * t.p, t.e, t.p - 1.0});
        d.push_back({-t.A * t.e * 2.0 * beta_, t.e + 1.0, t.p + 2.0 * beta_ - 1.0});
    }
    return RadialExpr(c_, beta_, n_, merge(std::move(d)));
}

RadialExpr RadialExpr::laplacian() const {
    const RadialExpr d1 = derivative();
    std::vector<RadialTerm> out = d1.derivative().terms_;
    if (n_ > 1)
        for (const auto& t : d1.terms_) out.push_back({t.A * (n_ - 1), t.e, t.p - 1.0});
    return RadialExpr(c_, beta_, n_, merge(std::move(out)));
}

double RadialExpr::growth_power() const {
    double g = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms_) g = std::max(g, t.p - 2.0 * beta_ * t.e);
    return g;
}

RadialExpr psi_time_derivative(const TestFunctionPsi& psi, double t, int j) {
    const double c = 1.0 + std::pow(t, 2.0 * psi.alpha2);
    if (j == 0) return RadialExpr(c, psi.beta2, psi.n, {{1.0, psi.r0, 0.0}});
    if (j == 1) {
        const double A = -psi.r0 * 2.0 * psi.alpha2 * std::pow(t, 2.0 * psi.alpha2 - 1.0);
        return RadialExpr(c, psi.beta2, psi.n, merge({{A, psi.r0 + 1.0, 0.0}}));
    }
    throw Error(ErrorCode::InvalidOrder, "only j = 0, 1 time derivatives are supported");
}

namespace {

RadialExpr integer_part(const TestFunctionPsi& psi, double sbar, int j, double t) {
    RadialExpr g = psi_time_derivative(psi, t, j);
    const int k = static_cast<int>(std::floor(sbar + 1e-12));
    for (int i = 0; i < k; ++i) g = g.laplacian();
    if (k % 2) {
        auto terms = g.terms();
        for (auto& tm : terms) tm.A = -tm.A;
        g = RadialExpr(1.0 + std::pow(t, 2.0 * psi.alpha2), psi.beta2, psi.n, terms);
    }
    return g;
}

ScalarFunction as_function(const RadialExpr& g) {
    ScalarFunction f;
    f.n = 1;
    f.eval = [g](const double* x) { return g(x[0]); };
    if (g.terms().empty()) {
        f.decay = {0.0, 1.0};
        return f;
    }
    const double rate = -g.growth_power();
    double amp = 0.0;
    for (double r : geomspace(1e-3, 1e6, 400)) amp = std::max(amp, std::abs(g(r)) * std::pow(1.0 + r, rate));
    amp = std::max(amp, std::abs(g(0.0)));
    f.decay = {1.5 * amp, std::max(rate, 0.0)};
    return f;
}

} // namespace

double lemma42_operator(const TestFunctionPsi& psi, double sbar, int j, double t, double x) {
    const RadialExpr g = integer_part(psi, sbar, j, t);
    const double frac = sbar - std::floor(sbar + 1e-12);
    if (frac < 1e-12) return g(x);
    return singular_fraclap(as_function(g), frac, &x);
}

Lemma42Result verify_lemma42(const TestFunctionPsi& psi, double sbar, int j, int nt, int nx, double x_max) {
    psi.validate(sbar);
    if (psi.n != 1) throw Error(ErrorCode::InvalidOrder, "verify_lemma42 is implemented for n = 1");
    const double frac = sbar - std::floor(sbar + 1e-12);
    const bool integer = frac < 1e-12;
    Lemma42Result res;
    res.r1 = integer ? psi.r0 + sbar / psi.beta2 : (psi.n + 2.0 * frac) / (2.0 * psi.beta2);

    auto weighted_sup = [&](const std::vector<double>& ts, const std::vector<double>& xs, double* at_t, double* at_x,
                            std::vector<double>* all) {
        double sup = 0.0;
        for (double t : ts) {
            const RadialExpr g = integer_part(psi, sbar, j, t);
            const ScalarFunction f = as_function(g);
            for (double x : xs) {
                const double v = integer ? g(x) : singular_fraclap(f, frac, &x);
                const double w = std::pow(1.0 + std::pow(t, 2.0 * psi.alpha2) + std::pow(std::abs(x), 2.0 * psi.beta2), res.r1);
                const double q = std::abs(v) * w;
                if (all) all->push_back(q);
                if (q > sup) {
                    sup = q;
                    if (at_t) *at_t = t;
                    if (at_x) *at_x = x;
                }
            }
        }
        return sup;
    };

    const auto ts = linspace(0.0, 1.0, nt);
    const auto xs = linspace(-x_max, x_max, nx);
    std::vector<double> all;
    res.constant = weighted_sup(ts, xs, &res.at_t, &res.at_x, &all);
    res.finite = std::isfinite(res.constant);
    res.violations = static_cast<int>(
        std::count_if(all.begin(), all.end(), [&](double q) { return q > res.constant * (1.0 + 1e-12); }));

    std::vector<double> tm, xm;
    for (size_t i = 0; i + 1 < ts.size(); ++i) tm.push_back(0.5 * (ts[i] + ts[i + 1]));
    for (size_t i = 0; i + 1 < xs.size(); ++i) xm.push_back(0.5 * (xs[i] + xs[i + 1]));
    const double mid = weighted_sup(tm, xm, nullptr, nullptr, nullptr);
    res.midpoint_ratio = res.constant > 0.0 ? mid / res.constant : 0.0;
    return res;
}

} // namespace sigmalab
