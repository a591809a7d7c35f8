// Acceptance criteria: one PASS/FAIL line each; non-zero exit if any fails.
#include "sigmalab/blowup_diag.hpp"
#include "sigmalab/errors.hpp"
#include "sigmalab/fraclap.hpp"
#include "sigmalab/kernels.hpp"
#include "sigmalab/moduli.hpp"
#include "sigmalab/numerics.hpp"
#include "sigmalab/solver.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

using namespace sigmalab;

namespace {

int failures = 0;

struct Verdict {
    bool pass = false;
    std::string detail;
};

void report(int id, const std::string& name, const std::function<Verdict()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failures;
    std::printf("criterion %2d %s  %-34s %s (%.1fs)\n", id, v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(),
                secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// criterion 8 setup, reused by 11
const EquationParams kSub(1.0, 0.0, 1);
const Modulus kSubMod = Modulus::power_law(-1.0);

SolverConfig sub_config() {
    SolverConfig c;
    c.grid = Grid(1, 1024, 10.0);
    c.t_max = 5000.0;
    return c;
}

} // namespace

int main() {
    report(1, "fraclap cross-realization", [] {
        const auto t0 = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (double s : {0.3, 0.5, 0.8}) {
            const auto r = cross_validate(gaussian_function(1), [s](double x) { return gaussian_fraclap_fourier(s, 1, std::abs(x)); },
                                          s, linspace(-3.0, 3.0, 9));
            worst = std::max(worst, r.max_rel_err);
        }
        const double t = elapsed(t0);
        return Verdict{worst < 1e-3 && t < 120.0, fmt("max rel err %.2e, %.1fs", worst, t)};
    });

    report(2, "C_2s constant", [] {
        const double c = c2s_constant(0.5, 1);
        const double rel = std::abs(c - 1.0 / (2.0 * M_PI)) * 2.0 * M_PI;
        return Verdict{rel < 1e-6, fmt("C=%.12f rel err %.2e", c, rel)};
    });

    report(3, "weighted test-function bounds", [] {
        struct Case {
            double sbar;
            int j;
        };
        std::string d;
        bool ok = true;
        for (auto c : {Case{1, 0}, Case{0.5, 0}, Case{1.5, 0}, Case{1, 1}}) {
            TestFunctionPsi psi;
            psi.beta2 = c.sbar == 0.5 ? 2 : 3;
            psi.validate(c.sbar);
            const auto r = verify_lemma42(psi, c.sbar, c.j, 41, 41, 10.0);
            ok = ok && r.finite && r.violations == 0;
            d += fmt("(%.1f,%.0f) C=%.3g v=%.0f ", c.sbar, c.j, r.constant, r.violations);
        }
        return Verdict{ok, d};
    });

    report(4, "H / H^-1 round trip", [] {
        std::vector<std::pair<double, double>> tab;
        for (double t : geomspace(1e-8, 0.3, 60)) tab.emplace_back(t, std::pow(std::log(1.0 / t), -0.7));
        double worst = 0.0;
        for (const auto& m : {Modulus::constant_one(), Modulus::power_law(-1.0), Modulus::power_law(0.5),
                              Modulus::log_power(0.5), Modulus::log_power(1.0), Modulus::log_power(2.0),
                              Modulus::iter_log_power(2, 0.5), Modulus::iter_log_power(2, 1.0),
                              Modulus::iter_log_power(3, 2.0), Modulus::tabulated(tab)}) {
            for (double t : geomspace(1e-6 * m.tau0(), m.tau0(), 200))
                worst = std::max(worst, std::abs(Hinv(m, H(m, t).value()) - t) / t);
        }
        return Verdict{worst < 1e-8, fmt("max rel err %.2e over 10 moduli", worst)};
    });

    report(5, "Dini dichotomy", [] {
        int wrong = 0, total = 0;
        for (double g : {0.1, 0.5, 0.9, 1.0, 1.0 + 1e-6, 1.1, 2.0, 5.0}) {
            for (const auto& m : {Modulus::log_power(g), Modulus::iter_log_power(2, g), Modulus::iter_log_power(3, g)}) {
                const bool nondini = dini_classify(m).verdict == DiniVerdict::NonDini;
                wrong += nondini != (g <= 1.0);
                ++total;
            }
        }
        return Verdict{wrong == 0, fmt("%.0f/%.0f classified correctly", total - wrong, total)};
    });

    report(6, "kernel correctness", [] {
        double wr = 0.0;
        for (auto [s, d] : {std::pair{1.0, 0.0}, {1.0, 0.25}, {1.0, 0.5}, {1.5, 1.0}, {2.0, 2.0}}) {
            EquationParams p(s, d, 1);
            for (double xi : geomspace(1e-4, 1e2, 10000)) {
                for (double t : {1e-3, 0.1, 1.0, 10.0}) {
                    const auto k = kernel_values(t, xi, p);
                    const double w = k.K0 * k.dK1 - k.K1 * k.dK0 - std::exp(-std::pow(xi, 2 * d) * t);
                    wr = std::max(wr, std::abs(w));
                }
            }
        }
        // double root of (σ, δ) = (1, 0): ξ = 1/2
        EquationParams p(1.0, 0.0, 1);
        double jump = 0.0;
        for (double t : {0.5, 1.0, 3.0}) {
            const auto a = kernel_values(t, 0.5 - 1e-9, p), b = kernel_values(t, 0.5 + 1e-9, p);
            jump = std::max({jump, std::abs(a.K0 - b.K0), std::abs(a.K1 - b.K1)});
        }
        // single mode sin(x) on a 2π-periodic box vs ODE u'' + u' + u = 0
        Grid g(1, 64, M_PI);
        LinearState st{SpectralField::from_function(g, [](double x) { return std::sin(x); }),
                       SpectralField::from_function(g, [](double x) { return 0.5 * std::cos(x); })};
        const auto out = propagate_linear(st, 3.0, p);
        using state = std::array<double, 4>; // (a, a', b, b') for sin and cos coefficients
        state y{1.0, 0.0, 0.0, 0.5};
        auto rhs = [](const state& s, state& ds, double) {
            ds[0] = s[1];
            ds[1] = -s[1] - s[0];
            ds[2] = s[3];
            ds[3] = -s[3] - s[2];
        };
        namespace ode = boost::numeric::odeint;
        ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<state>>(1e-14, 1e-14), rhs, y, 0.0, 3.0,
                                1e-3);
        double prop = 0.0;
        for (int i = 0; i < g.N; ++i) {
            const double x = g.x(i);
            prop = std::max(prop, std::abs(out.u.values()[i] - (y[0] * std::sin(x) + y[2] * std::cos(x))));
        }
        return Verdict{wr < 1e-10 && jump < 1e-6 && prop < 1e-8,
                       fmt("wronskian %.1e, double-root jump %.1e, ODE err %.1e", wr, jump, prop)};
    });

    report(7, "linear decay rates", [] {
        const auto t0 = std::chrono::steady_clock::now();
        const auto a = measure_decay(EquationParams(1.0, 0.0, 1));
        const double ta = elapsed(t0);
        const auto t1 = std::chrono::steady_clock::now();
        const auto b = measure_decay(EquationParams(1.0, 0.25, 1));
        const double tb = elapsed(t1);
        const bool ok = std::abs(a.slope / a.target - 1) < 0.15 && std::abs(b.slope / b.target - 1) < 0.15 &&
                        ta < 300 && tb < 300;
        return Verdict{ok, fmt("slopes %.4f (target %.4f), %.4f (target %.4f)", a.slope, a.target, b.slope, b.target)};
    });

    double T_largest = NAN;
    report(8, "sub-critical lifespan scaling", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        const auto prof = gaussian_velocity_profile(kSub, 0.5);
        const auto res = sweep_epsilon(kSub, kSubMod, {0.4, 0.3, 0.2, 0.15, 0.1}, prof, sub_config(), 0);
        for (const auto& s : res)
            if (!s.blowup) return Verdict{false, fmt("no blow-up at eps=%.2f", s.epsilon)};
        T_largest = res.front().T_measured;
        const auto f = fit_scaling(res, ScalingModel::PowerLaw);
        const double t = elapsed(t0);
        return Verdict{f.slope >= 1.7 && f.slope <= 2.3 && t < 1800,
                       fmt("slope %.3f (r2 %.4f), T(0.4)=%.2f, T(0.1)=%.1f", f.slope, f.r2, res.front().T_measured,
                           res.back().T_measured)};
    });

    report(9, "critical lifespan trend", [] {
        const EquationParams p(1.0, 0.0, 1);
        SolverConfig c;
        c.grid = Grid(1, 1024, 10.0);
        c.t_max = 20000.0;
        const auto res = sweep_epsilon(p, Modulus::constant_one(), {1.0, 0.8, 0.6}, gaussian_velocity_profile(p, 0.5), c, 0);
        for (const auto& s : res)
            if (!s.blowup) return Verdict{false, fmt("no blow-up at eps=%.2f", s.epsilon)};
        const auto f = fit_scaling(res, ScalingModel::LogLinear);
        bool monotone = true;
        double prev = INFINITY;
        for (const auto& m : {Modulus::constant_one(), Modulus::log_power(0.5), Modulus::power_law(-1.0)}) {
            prev = INFINITY;
            for (double e : geomspace(0.01, 0.5, 25)) {
                const double lt = predict_lifespan(p, m, e).logT_lower;
                monotone = monotone && lt <= prev;
                prev = lt;
            }
        }
        const double ref = predict_lifespan(p, Modulus::constant_one(), 0.1).logT_lower;
        const double lim = predict_lifespan(p, Modulus::log_power(1e-3), 0.1).logT_lower;
        const double gap = std::abs(lim - ref) / std::abs(ref);
        return Verdict{f.pearson > 0.9 && monotone && gap < 0.05,
                       fmt("pearson %.4f, T = %.0f..%.0f, gamma->0 log gap %.2e", f.pearson, res.front().T_measured,
                           res.back().T_measured, gap)};
    });

    report(10, "blow-up / global dichotomy", [] {
        const EquationParams p(1.0, 0.0, 1);
        SolverConfig c;
        c.grid = Grid(1, 1024, 10.0);
        c.t_max = 1000.0;
        const auto prof = gaussian_velocity_profile(p, 0.5);
        const auto dini = run_to_blowup(p, Modulus::log_power(2.0), 0.05, prof, c).sample;
        const auto nond = run_to_blowup(p, Modulus::log_power(0.5), 0.05, prof, c).sample;
        const bool ok = dini.outcome == RunOutcome::Global && dini.weighted_bounded &&
                        (nond.outcome == RunOutcome::BlowUp || nond.outcome == RunOutcome::InconclusiveGrowing);
        return Verdict{ok, "gamma=2: " + std::string(outcome_name(dini.outcome)) +
                               fmt(" (excess exponent %.2f); ", dini.excess_exponent) +
                               "gamma=0.5: " + std::string(outcome_name(nond.outcome)) +
                               fmt(" (excess exponent %.2f)", nond.excess_exponent)};
    });

    report(11, "Y-functional diagnostic", [&] {
        auto c = sub_config();
        c.snapshot_dt = 0.05;
        const auto prof = gaussian_velocity_profile(kSub, 0.5);
        const auto r = run_to_blowup(kSub, kSubMod, 0.4, prof, c);
        if (!r.sample.blowup) return Verdict{false, "no blow-up"};
        const double T = r.sample.T_measured;
        const auto fam = TestFunctionFamily::defaults(kSub);
        const auto Y = compute_Y(r.trajectory, kSub, kSubMod, fam, geomspace(0.5, T / 2, 40));
        const auto ck = check_differential_inequality(Y, kSub, kSubMod, 0.4, 1.0, data_constant(kSub, prof), 1.0, T / 2);
        const bool ok = Y.monotone && Y.bound_holds && ck.pass;
        return Verdict{ok, fmt("T=%.2f, C_fit=%.3f <= C=%.3f, c_hat=%.4f", T, Y.C_fit, Y.C_bound, ck.c_hat) +
                               fmt(", positive from R=%.2f", ck.R_positive) +
                               (std::isnan(T_largest) ? "" : fmt(" (sweep T %.2f)", T_largest))};
    });

    report(12, "solver convergence and linear limit", [] {
        const EquationParams p(1.0, 0.0, 1);
        Grid g(1, 256, 12.0);
        DataProfile d;
        d.u0 = [](double r) { return std::exp(-r * r); };
        d.u1 = [](double r) { return 0.5 * std::exp(-r * r / 2.0); };
        const auto s0 = initial_state(g, d, 0.8);
        const auto m = Modulus::constant_one();
        const auto a = evolve_fixed(s0, 0.1, 2.0, p, m);
        const auto b = evolve_fixed(s0, 0.05, 2.0, p, m);
        const auto c = evolve_fixed(s0, 0.025, 2.0, p, m);
        auto diff = [](const SpectralField& x, const SpectralField& y) {
            double e = 0.0;
            for (size_t i = 0; i < x.values().size(); ++i) e = std::max(e, std::abs(x.values()[i] - y.values()[i]));
            return e;
        };
        const double ratio = diff(a.u, b.u) / diff(b.u, c.u);
        const auto lin = evolve_fixed(s0, 0.05, 2.0, p, Modulus::zero());
        const auto ex = propagate_linear(LinearState{s0.u, s0.v}, 2.0, p);
        const double lerr = std::max(diff(lin.u, ex.u), diff(lin.v, ex.v));
        return Verdict{ratio > 3.5 && ratio < 4.5 && lerr < 1e-12, fmt("ratio %.3f, linear-limit err %.1e", ratio, lerr)};
    });

    std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
