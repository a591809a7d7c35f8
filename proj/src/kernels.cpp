#include "sigmalab/kernels.hpp"

#include "sigmalab/errors.hpp"
#include "sigmalab/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace sigmalab {

namespace {

struct Symbol {
    double a; // |ξ|^{2δ}
    double b; // |ξ|^{2σ}
};

Symbol symbol(double xi, const EquationParams& p) {
    // 0^0 = 1: with δ = 0 the zero mode is still damped
    return {std::pow(xi, 2.0 * p.delta()), xi == 0.0 ? 0.0 : std::pow(xi, 2.0 * p.sigma())};
}

RootBranch classify(const Symbol& s) {
    const double d = s.a * s.a - 4.0 * s.b;
    const double tol = 1e-12 * std::max(1.0, s.a * s.a);
    if (std::abs(d) <= tol) return RootBranch::DoubleRoot;
    return d > 0.0 ? RootBranch::RealRoots : RootBranch::ComplexRoots;
}

// Δ² = a²/4 - b in factored form
double half_disc(const Symbol& s) {
    const double sb = std::sqrt(s.b);
    return (0.5 * s.a - sb) * (0.5 * s.a + sb);
}

KernelValues kernels_from_symbol(double t, const Symbol& s) {
    if (t == 0.0) return {};
    const double m = -0.5 * s.a;
    const double D2 = half_disc(s);
    const double h2 = D2 * t * t;
    KernelValues k;
    if (std::abs(h2) < 1e-6) {
        // |λ1-λ2| t small: series in h² of cosh(h) and sinh(h)/h
        const double C = 1.0 + h2 / 2.0 * (1.0 + h2 / 12.0 * (1.0 + h2 / 30.0 * (1.0 + h2 / 56.0)));
        const double S = t * (1.0 + h2 / 6.0 * (1.0 + h2 / 20.0 * (1.0 + h2 / 42.0 * (1.0 + h2 / 72.0))));
        const double E = std::exp(m * t);
        k.K1 = E * S;
        k.K0 = E * (C - m * S);
        k.dK1 = E * (C + m * S);
    } else if (D2 > 0.0) {
        const double D = std::sqrt(D2);
        const double l1 = -2.0 * s.b / (s.a + 2.0 * D); // m + Δ without cancellation
        const double l2 = m - D;
        const double E1 = std::exp(l1 * t);
        const double E2 = std::exp(l2 * t);
        k.K1 = -E1 * std::expm1(-2.0 * D * t) / (2.0 * D);
        k.K0 = (l1 * E2 - l2 * E1) / (2.0 * D);
        k.dK1 = (l1 * E1 - l2 * E2) / (2.0 * D);
    } else {
        const double w = std::sqrt(-D2);
        const double E = std::exp(m * t);
        const double C = std::cos(w * t);
        const double S = std::sin(w * t) / w;
        k.K1 = E * S;
        k.K0 = E * (C - m * S);
        k.dK1 = E * (C + m * S);
    }
    k.dK0 = -s.b * k.K1;
    return k;
}

// expm1(λt)/λ and (e^{λt} - 1 - λt)/λ², both finite at λ = 0
double phi1(double l, double t) { return l == 0.0 ? t : std::expm1(l * t) / l; }

double phi2(double l, double t) {
    const double z = l * t;
    if (std::abs(z) < 0.1) {
        double term = 0.5, acc = 0.0;
        for (int j = 0; j < 10; ++j) {
            acc += term;
            term *= z / (j + 3);
        }
        return t * t * acc;
    }
    return (std::expm1(z) - z) / (l * l);
}

DuhamelWeights weights_from_symbol(double t, const Symbol& s, const KernelValues& k) {
    if (t == 0.0) return {};
    const double alpha = s.a * t;
    const double beta = s.b * t * t;
    DuhamelWeights w;
    if (alpha <= 1.0 && beta <= 1.0) {
        // Taylor: K1 = Σ c_k t^k/k!, c0 = 0, c1 = 1, c_{k+2} = -a c_{k+1} - b c_k; d_k = c_k t^{k-1}
        double dm = 0.0, d = 1.0;
        double fw = 2.0, fv = 6.0; // (k+1)!, (k+2)! at k = 1
        double W = 0.0, V = 0.0;
        for (int kk = 1; kk < 80; ++kk) {
            W += d / fw;
            V += d / fv;
            const double next = -alpha * d - beta * dm;
            dm = d;
            d = next;
            fw *= kk + 2;
            fv *= kk + 3;
            if (std::abs(d) / fw < 1e-19 && std::abs(dm) / fw < 1e-19) break;
        }
        w.W1 = t * t * W;
        w.V = t * t * t * V;
    } else if (s.a * s.a >= 8.0 * s.b) {
        const double D = std::sqrt(half_disc(s));
        const double l1 = -2.0 * s.b / (s.a + 2.0 * D);
        const double l2 = -0.5 * s.a - D;
        w.W1 = (phi1(l1, t) - phi1(l2, t)) / (2.0 * D);
        w.V = (phi2(l1, t) - phi2(l2, t)) / (2.0 * D);
    } else {
        // integrated ODE: K1' - 1 + a K1 + b W1 = 0 and K1 - t + a W1 + b V = 0
        w.W1 = (1.0 - k.dK1 - s.a * k.K1) / s.b;
        w.V = (t - k.K1 - s.a * w.W1) / s.b;
    }
    return w;
}

} // namespace

std::string_view branch_name(RootBranch b) {
    switch (b) {
    case RootBranch::RealRoots: return "RealRoots";
    case RootBranch::DoubleRoot: return "DoubleRoot";
    case RootBranch::ComplexRoots: return "ComplexRoots";
    }
    return "?";
}

Roots lambda12(double xi_norm, const EquationParams& p) {
    if (!(xi_norm >= 0.0)) throw Error(ErrorCode::GridMismatch, "|xi| must be >= 0");
    const Symbol s = symbol(xi_norm, p);
    Roots r;
    r.branch = classify(s);
    const double D2 = half_disc(s);
    if (r.branch == RootBranch::DoubleRoot) {
        r.lambda1 = r.lambda2 = -0.5 * s.a;
    } else if (D2 > 0.0) {
        const double D = std::sqrt(D2);
        r.lambda1 = -2.0 * s.b / (s.a + 2.0 * D);
        r.lambda2 = -0.5 * s.a - D;
    } else {
        const double w = std::sqrt(-D2);
        r.lambda1 = {-0.5 * s.a, w};
        r.lambda2 = {-0.5 * s.a, -w};
    }
    return r;
}

KernelValues kernel_values(double t, double xi_norm, const EquationParams& p) {
    if (!(t >= 0.0)) throw Error(ErrorCode::GridMismatch, "kernel time must be >= 0");
    return kernels_from_symbol(t, symbol(xi_norm, p));
}

DuhamelWeights duhamel_weights(double t, double xi_norm, const EquationParams& p) {
    if (!(t >= 0.0)) throw Error(ErrorCode::GridMismatch, "kernel time must be >= 0");
    const Symbol s = symbol(xi_norm, p);
    return weights_from_symbol(t, s, kernels_from_symbol(t, s));
}

PropagatorTable::PropagatorTable(const EquationParams& p, const Grid& g, double dt) : params_(p), grid_(g), dt_(dt) {
    if (!(dt > 0.0)) throw Error(ErrorCode::GridMismatch, "propagator step must be > 0");
    const size_t M = g.spectral_size();
    modes_.resize(M);
    for (size_t k = 0; k < M; ++k) {
        ModeRecord& r = modes_[k];
        r.xi_norm = g.xi_norm(k);
        const Symbol s = symbol(r.xi_norm, p);
        const Roots roots = lambda12(r.xi_norm, p);
        r.lambda1 = roots.lambda1;
        r.lambda2 = roots.lambda2;
        r.branch = roots.branch;
        if (roots.lambda1.real() > 1e-14 || roots.lambda2.real() > 1e-14)
            throw Error(ErrorCode::NumericalFailure, "characteristic root with positive real part");
        r.k = kernels_from_symbol(dt, s);
        r.w = weights_from_symbol(dt, s, r.k);
        const double det = r.k.K0 * r.k.dK1 - r.k.K1 * r.k.dK0;
        wronskian_defect_ = std::max(wronskian_defect_, std::abs(det - std::exp(-s.a * dt)));
    }
}

namespace {

LinearState apply_kernels(const LinearState& s, const std::vector<KernelValues>& ks) {
    const auto& cu = s.u.coeffs();
    const auto& cv = s.v.coeffs();
    LinearState out{SpectralField(s.u.grid()), SpectralField(s.u.grid())};
    auto& ou = out.u.coeffs_mut();
    auto& ov = out.v.coeffs_mut();
    for (size_t k = 0; k < ks.size(); ++k) {
        ou[k] = ks[k].K0 * cu[k] + ks[k].K1 * cv[k];
        ov[k] = ks[k].dK0 * cu[k] + ks[k].dK1 * cv[k];
    }
    return out;
}

void require_same_grid(const LinearState& s) {
    if (!(s.u.grid() == s.v.grid())) throw Error(ErrorCode::GridMismatch, "u and u_t live on different grids");
}

} // namespace

LinearState propagate_linear(const LinearState& s, double t, const EquationParams& p) {
    require_same_grid(s);
    if (!(t >= 0.0)) throw Error(ErrorCode::GridMismatch, "propagation time must be >= 0");
    const Grid& g = s.u.grid();
    std::vector<KernelValues> ks(g.spectral_size());
    for (size_t k = 0; k < ks.size(); ++k) ks[k] = kernel_values(t, g.xi_norm(k), p);
    return apply_kernels(s, ks);
}

LinearState propagate_linear(const LinearState& s, const PropagatorTable& table) {
    require_same_grid(s);
    if (!(s.u.grid() == table.grid())) throw Error(ErrorCode::GridMismatch, "state and propagator grids differ");
    std::vector<KernelValues> ks(table.modes().size());
    for (size_t k = 0; k < ks.size(); ++k) ks[k] = table.modes()[k].k;
    return apply_kernels(s, ks);
}

double decay_target(const EquationParams& p, double q) {
    const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
    return -(p.n() - p.damping_index() - p.n() * inv_q) / p.kappa();
}

namespace {

struct DecayRun {
    std::vector<double> norms;
    double edge_mass = 0.0; // worst strip share over the fitted times
};

DecayRun decay_run(const EquationParams& p, const DecayOptions& opt, const std::vector<double>& times, int N, double L) {
    const Grid g(p.n(), N, L);
    const double w = opt.width;
    const double mass = std::pow(std::sqrt(M_PI) * w, p.n());
    SpectralField u1 = p.n() == 1
        ? SpectralField::from_function(g, [&](double x) { return std::exp(-x * x / (w * w)) / mass; })
        : SpectralField::from_function(g, [&](double x, double y) { return std::exp(-(x * x + y * y) / (w * w)) / mass; });
    const auto c1 = u1.coeffs();

    // K1(t, ·) is not smooth at 0 when δ > 0, so the zero mode takes the cell average (same measure as one cell)
    const double dxi = M_PI / L;
    const double r0 = p.n() == 1 ? 0.5 * dxi : dxi / std::sqrt(M_PI);
    auto zero_mode_K1 = [&](double t) {
        if (!opt.zero_mode_cell_average || p.delta() == 0.0) return kernel_values(t, 0.0, p).K1;
        auto f = [&](double xi) { return kernel_values(t, xi, p).K1 * (p.n() == 1 ? 1.0 : xi); };
        const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, r0, 12, 1e-12);
        return p.n() == 1 ? I / r0 : 2.0 * I / (r0 * r0);
    };

    DecayRun run;
    for (double t : times) {
        SpectralField u(g);
        auto& cu = u.coeffs_mut();
        for (size_t k = 0; k < cu.size(); ++k)
            cu[k] = (k == 0 ? zero_mode_K1(t) : kernel_values(t, g.xi_norm(k), p).K1) * c1[k];
        run.norms.push_back(std::isinf(opt.q) ? u.sup_norm() : u.lp_norm(opt.q));
        if (t < opt.t_max / 10.0 * (1.0 - 1e-12)) continue;
        double strip = 0.0, total = 0.0;
        const auto& v = u.values();
        for (size_t i = 0; i < v.size(); ++i) {
            const int ix = p.n() == 1 ? int(i) : int(i / g.N);
            const int iy = p.n() == 1 ? 0 : int(i % g.N);
            const bool edge = std::abs(g.x(ix)) > 0.9 * L || (p.n() == 2 && std::abs(g.x(iy)) > 0.9 * L);
            total += std::abs(v[i]);
            if (edge) strip += std::abs(v[i]);
        }
        run.edge_mass = std::max(run.edge_mass, strip / total);
    }
    return run;
}

} // namespace

DecayMeasurement measure_decay(const EquationParams& p, const DecayOptions& opt) {
    if (p.n() != 1 && p.n() != 2) throw Error(ErrorCode::GridMismatch, "decay measurement supports n = 1, 2");
    if (!(opt.t_max > opt.t_min && opt.t_min > 0.0) || opt.samples < 3)
        throw Error(ErrorCode::GridMismatch, "decay needs 0 < t_min < t_max and >= 3 samples");
    DecayMeasurement res;
    res.target = decay_target(p, opt.q);
    res.L = opt.L > 0.0 ? opt.L : 12.0 * std::pow(opt.t_max, 1.0 / p.kappa()) + 4.0 * opt.width;
    res.N = opt.N;
    res.times = geomspace(opt.t_min, opt.t_max, opt.samples);

    const DecayRun run = decay_run(p, opt, res.times, opt.N, res.L);
    res.norms = run.norms;
    res.boundary_fraction = run.edge_mass;
    if (p.delta() == 0.0) {
        if (run.edge_mass > opt.boundary_tol)
            throw Error(ErrorCode::BoxTooSmall, "boundary strip carries " + std::to_string(run.edge_mass) +
                                                    " of the mass; enlarge L");
    } else {
        // algebraic tails: no box holds the mass, so require the fitted norms to be stable under box doubling
        const DecayRun big = decay_run(p, opt, res.times, 2 * opt.N, 2.0 * res.L);
        for (size_t i = 0; i < res.times.size(); ++i)
            if (res.times[i] >= opt.t_max / 10.0 * (1.0 - 1e-12))
                res.box_sensitivity = std::max(res.box_sensitivity, std::abs(big.norms[i] / run.norms[i] - 1.0));
        if (res.box_sensitivity > opt.box_sensitivity_tol)
            throw Error(ErrorCode::BoxTooSmall, "norms move by " + std::to_string(res.box_sensitivity) +
                                                    " under box doubling; enlarge L");
    }

    std::vector<double> fx, fy;
    for (size_t i = 0; i < res.times.size(); ++i)
        if (res.times[i] >= opt.t_max / 10.0 * (1.0 - 1e-12)) {
            fx.push_back(std::log1p(res.times[i]));
            fy.push_back(std::log(res.norms[i]));
        }
    const LinearFit fit = fit_line(fx, fy);
    res.slope = fit.slope;
    res.intercept = fit.intercept;
    res.r2 = fit.r2;
    return res;
}

} // namespace sigmalab
