#include "sigmalab/blowup_diag.hpp"

#include "sigmalab/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace sigmalab {

namespace {

double pc_of(const EquationParams& p) {
    const ExtendedReal pc = p.critical_exponent();
    if (pc.is_infinite()) throw Error(ErrorCode::ParamsInvalid, "critical exponent is infinite");
    return pc.value();
}

// t^{2θ} + |x|^{2θκ}
double anisotropic(double t, double r, const TestFunctionFamily& f) {
    return std::pow(t, 2.0 * f.theta) + std::pow(r, 2.0 * f.theta * f.kappa);
}

} // namespace

TestFunctionFamily TestFunctionFamily::defaults(const EquationParams& p) {
    TestFunctionFamily f;
    f.p_c = pc_of(p);
    f.kappa = p.kappa();
    f.q0 = p.q0();
    f.s0 = p.s0();
    f.n = p.n();
    f.theta = std::max(1.0, (std::floor(p.sigma()) + 1.0) / f.kappa);
    f.r2 = 2.0 * f.p_c / (f.p_c - 1.0);
    f.beta1 = 0.5 * f.s0 * (f.p_c - 1.0) / (f.theta * f.kappa);
    f.beta0 = 0.5 * std::min((f.p_c - 1.0) / (2.0 * f.theta), f.beta1) / 2.0;
    return f;
}

void TestFunctionFamily::validate(const EquationParams& p) const {
    auto bad = [](const std::string& m) { throw Error(ErrorCode::ParamsInvalid, m); };
    const double pc = pc_of(p);
    const double k = p.kappa();
    if (!(theta >= std::max(1.0, (std::floor(p.sigma()) + 1.0) / k) - 1e-12)) bad("theta below max{1, ([sigma]+1)/kappa}");
    if (!(r2 >= 2.0 * pc / (pc - 1.0) - 1e-12)) bad("r2 below 2 p_c'");
    if (!(beta0 > 0.0 && beta0 < beta1)) bad("need 0 < beta0 < beta1");
    if (!(beta0 < (pc - 1.0) / (2.0 * theta))) bad("need beta0 < (p_c - 1)/(2 theta)");
    if (!(beta1 < p.s0() * (pc - 1.0) / (theta * k))) bad("need beta1 < s0 (p_c - 1)/(theta kappa)");
    if (!(q0 > 0.0)) bad("q0 must be > 0");
}

double rho(double t) {
    if (t <= 0.5) return 1.0;
    if (t >= 1.0) return 0.0;
    const double s = 2.0 * t - 1.0;
    return 1.0 - s * s * s * (s * (6.0 * s - 15.0) + 10.0);
}

double phi(double t, double r, const TestFunctionFamily& f) {
    return std::pow(1.0 + anisotropic(t, r, f), -f.q0 / (2.0 * f.theta * f.kappa));
}

double capital_phi(double t, double r, const TestFunctionFamily& f) {
    const double a = anisotropic(t, r, f);
    if (a == 0.0) return 0.0;
    return std::pow(a, f.beta0) * std::pow(1.0 + a, -f.beta1);
}

double psi_R(double t, double r, double R, const TestFunctionFamily& f) {
    const double c = rho(t / R);
    if (c == 0.0) return 0.0;
    return std::pow(c, f.r2) * phi(t / R, r / std::pow(R, 1.0 / f.kappa), f);
}

double capital_phi_R(double t, double r, double R, const TestFunctionFamily& f) {
    return capital_phi(t / R, r / std::pow(R, 1.0 / f.kappa), f);
}

double phi_r_integral(double t, double r, double R, const TestFunctionFamily& f) {
    // ρ = R e^{-w}, dρ/ρ = dw on [0, ∞); logs keep tiny ρ finite
    const double A = anisotropic(t, r, f);
    if (A == 0.0) return 0.0;
    const double lnA = std::log(A);
    auto integrand = [&](double w) {
        const double ln_tau = lnA - 2.0 * f.theta * (std::log(R) - w);
        const double softplus = ln_tau > 0.0 ? ln_tau + std::log1p(std::exp(-ln_tau)) : std::log1p(std::exp(ln_tau));
        return std::exp(f.beta0 * ln_tau - f.beta1 * softplus);
    };
    boost::math::quadrature::exp_sinh<double> q;
    return q.integrate(integrand, 1e-10);
}

double phi_r_integral_bound(const TestFunctionFamily& f) {
    return boost::math::beta(f.beta0, f.beta1 - f.beta0) / (2.0 * f.theta);
}

double data_constant(const EquationParams& p, const DataProfile& prof) {
    const double q0 = p.q0();
    const int n = p.n();
    const bool damped = p.delta() > 0.0;
    auto f = [&](double r) {
        const double shell = n == 1 ? 2.0 : 2.0 * M_PI * r;
        const double d = damped ? 0.5 * prof.u1(r) : prof.u0(r) + prof.u1(r);
        return shell * d * std::pow(1.0 + r * r, -0.5 * q0);
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, std::numeric_limits<double>::infinity(),
                                                                         12, 1e-12);
}

YFunctional compute_Y(const TrajectoryRecord& traj, const EquationParams& p, const Modulus& m,
                      const TestFunctionFamily& fam, const std::vector<double>& R_grid, const YOptions& opt) {
    fam.validate(p);
    if (R_grid.empty()) throw Error(ErrorCode::DegenerateGrid, "empty R grid");
    for (size_t i = 0; i < R_grid.size(); ++i) {
        if (!(R_grid[i] > 0.0) || (i > 0 && !(R_grid[i] > R_grid[i - 1])))
            throw Error(ErrorCode::DegenerateGrid, "R grid must be positive and strictly increasing");
    }
    const auto& snaps = traj.snapshots;
    if (snaps.size() < 2 || snaps.front().t != 0.0)
        throw Error(ErrorCode::InsufficientSnapshots, "need snapshots starting at t = 0");
    if (snaps.back().t < R_grid.back())
        throw Error(ErrorCode::InsufficientSnapshots,
                    "R grid reaches " + std::to_string(R_grid.back()) + " beyond the last snapshot at t = " +
                        std::to_string(snaps.back().t));

    const Grid& g = traj.grid;
    const double pc = pc_of(p);
    const double dV = g.cell_volume();
    const size_t npts = g.size();

    // radii and g(u) per snapshot, computed once
    std::vector<double> radius(npts);
    for (size_t k = 0; k < npts; ++k) {
        if (g.n == 1) {
            radius[k] = std::abs(g.x(int(k)));
        } else {
            radius[k] = std::hypot(g.x(int(k / g.N)), g.x(int(k % g.N)));
        }
    }
    std::vector<std::vector<double>> gu(snaps.size());
    for (size_t s = 0; s < snaps.size(); ++s) {
        if (snaps[s].u.size() != npts) throw Error(ErrorCode::GridMismatch, "snapshot size differs from the grid");
        gu[s].resize(npts);
        for (size_t k = 0; k < npts; ++k) gu[s][k] = nonlinearity(snaps[s].u[k], pc, m);
    }

    YFunctional out;
    out.family = fam;
    out.R = R_grid;
    out.C_bound = phi_r_integral_bound(fam);
    out.snapshots = snaps.size();

    for (double r : R_grid) {
        // snapshots on [0, r]; the integrand vanishes at t = r
        size_t last = 0;
        while (last + 1 < snaps.size() && snaps[last + 1].t < r) ++last;
        double worst = 0.0;
        for (size_t s = 1; s <= last + 1 && s < snaps.size(); ++s)
            worst = std::max(worst, std::min(snaps[s].t, r) - snaps[s - 1].t);
        out.max_spacing_ratio = std::max(out.max_spacing_ratio, worst / r);
        if (worst > opt.max_spacing_fraction * r)
            throw Error(ErrorCode::InsufficientSnapshots,
                        "snapshot spacing " + std::to_string(worst) + " too coarse for r = " + std::to_string(r));

        std::vector<double> ty, ti, ts;
        for (size_t s = 0; s <= last; ++s) {
            const double t = snaps[s].t;
            double yy = 0.0, ii = 0.0;
            for (size_t k = 0; k < npts; ++k) {
                if (gu[s][k] == 0.0) continue;
                const double w = psi_R(t, radius[k], r, fam);
                if (w == 0.0) continue;
                ii += gu[s][k] * w;
                yy += gu[s][k] * w * capital_phi_R(t, radius[k], r, fam);
            }
            ts.push_back(t);
            ty.push_back(yy * dV);
            ti.push_back(ii * dV);
        }
        ts.push_back(r);
        ty.push_back(0.0);
        ti.push_back(0.0);
        double yv = 0.0, iv = 0.0;
        for (size_t j = 1; j < ts.size(); ++j) {
            yv += 0.5 * (ts[j] - ts[j - 1]) * (ty[j] + ty[j - 1]);
            iv += 0.5 * (ts[j] - ts[j - 1]) * (ti[j] + ti[j - 1]);
        }
        out.y.push_back(yv);
        out.I.push_back(iv);
    }

    // Y(0) = 0 and y(r)/r -> 0 as r -> 0
    double Y = 0.0, prev_r = 0.0, prev_f = 0.0;
    for (size_t i = 0; i < R_grid.size(); ++i) {
        const double f = out.y[i] / R_grid[i];
        Y += 0.5 * (R_grid[i] - prev_r) * (f + prev_f);
        prev_r = R_grid[i];
        prev_f = f;
        out.Y.push_back(Y);
        if (i > 0 && out.Y[i] < out.Y[i - 1]) out.monotone = false;
        if (out.I[i] > 0.0) out.C_fit = std::max(out.C_fit, Y / out.I[i]);
        if (Y > out.C_bound * out.I[i] * (1.0 + 1e-9) + 1e-300) out.bound_holds = false;
    }
    return out;
}

InequalityCheck check_differential_inequality(const YFunctional& Y, const EquationParams& p, const Modulus& m,
                                              double epsilon, double C5, double C_data, double R_lo, double R_hi) {
    const size_t n = Y.R.size();
    if (n < 10 || Y.Y.size() != n) throw Error(ErrorCode::DegenerateGrid, "need Y on at least 10 grid points");
    const double pc = pc_of(p);
    const double kap = p.kappa();
    const double d = p.dimension_gap();

    InequalityCheck out;
    double scale = 0.0;
    for (double v : Y.Y) scale = std::max(scale, std::abs(v));
    bool any = false;
    for (size_t i = 1; i + 1 < n; ++i) {
        const double R = Y.R[i];
        if (R < R_lo || R > R_hi) continue;
        any = true;
        const double dY = (Y.Y[i + 1] - Y.Y[i - 1]) / (Y.R[i + 1] - Y.R[i - 1]);
        const double arg = std::pow(R, -d / kap) * (C5 * Y.Y[i] + C_data * epsilon);
        const double rhs = std::pow(R, p.n() / kap) * nonlinearity(arg, pc, m);
        out.R.push_back(R);
        out.Yprime.push_back(dY);
        out.rhs.push_back(rhs);
        out.ratio.push_back(rhs > 0.0 ? dY / rhs : (dY > 0.0 ? std::numeric_limits<double>::infinity() : 0.0));
    }
    if (!any) throw Error(ErrorCode::DegenerateGrid, "no interior grid point inside [R_lo, R_hi]");

    out.degenerate = std::all_of(out.Yprime.begin(), out.Yprime.end(),
                                 [&](double v) { return std::abs(v) <= 1e-14 * scale || scale == 0.0; });
    if (out.degenerate) {
        out.c_hat = 0.0;
        out.pass = false;
        return out;
    }
    out.c_hat = *std::min_element(out.ratio.begin(), out.ratio.end());
    out.pass = out.c_hat > 0.0;
    for (size_t i = out.ratio.size(); i-- > 0;) {
        if (!(out.ratio[i] > 0.0)) break;
        out.R_positive = out.R[i];
    }
    return out;
}

} // namespace sigmalab
