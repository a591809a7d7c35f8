#include "sigmalab/errors.hpp"
#include "sigmalab/solver.hpp"

#include <doctest.h>

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>

using namespace sigmalab;

namespace {

double max_diff(const SpectralField& a, const SpectralField& b) {
    const auto& x = a.values();
    const auto& y = b.values();
    double m = 0.0;
    for (size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

DataProfile bump_profile() {
    DataProfile d;
    d.u0 = [](double r) { return std::exp(-r * r); };
    d.u1 = [](double r) { return 0.5 * std::exp(-r * r / 2.0); };
    d.radius = 5.0;
    d.name = "bump";
    return d;
}

// zero mode of ü + u̇ = |u|^3 (σ = 1, δ = 0, n = 1, μ = 1)
std::array<double, 2> ode_reference(double u0, double v0, double t) {
    using state = std::array<double, 2>;
    state y{u0, v0};
    auto rhs = [](const state& s, state& d, double) {
        d[0] = s[1];
        d[1] = -s[1] + std::pow(std::abs(s[0]), 3.0);
    };
    namespace ode = boost::numeric::odeint;
    ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<state>>(1e-14, 1e-14), rhs, y, 0.0, t,
                            t / 100.0);
    return y;
}

} // namespace

TEST_CASE("linear limit: mu = 0 reproduces the exact propagator") {
    EquationParams p(1.0, 0.25, 1);
    Grid g(1, 256, 12.0);
    auto s0 = initial_state(g, bump_profile(), 0.7);
    auto out = evolve_fixed(s0, 0.05, 2.0, p, Modulus::zero());
    auto lin = propagate_linear(LinearState{s0.u, s0.v}, 2.0, p);
    // dealiasing acts on the nonlinear term only, which is zero here
    CHECK(max_diff(out.u, lin.u) < 1e-12);
    CHECK(max_diff(out.v, lin.v) < 1e-12);
    CHECK(out.t == doctest::Approx(2.0));
}

TEST_CASE("epsilon = 0 stays zero") {
    EquationParams p(1.0, 0.0, 1);
    SolverConfig cfg;
    cfg.grid = Grid(1, 128, 10.0);
    cfg.t_max = 5.0;
    cfg.auto_box = false;
    auto r = run_to_blowup(p, Modulus::constant_one(), 0.0, gaussian_velocity_profile(p), cfg);
    CHECK_FALSE(r.sample.blowup);
    for (const auto& s : r.trajectory.samples) CHECK(s.l_inf == 0.0);
}

TEST_CASE("zero-mode ODE: one-step local errors") {
    EquationParams p(1.0, 0.0, 1);
    Grid g(1, 16, 3.0);
    DataProfile flat;
    flat.u0 = [](double) { return 0.8; };
    flat.u1 = [](double) { return 0.3; };
    auto s0 = initial_state(g, flat, 1.0);
    double prev_u = 0.0, prev_v = 0.0;
    for (double dt : {0.2, 0.1, 0.05}) {
        auto out = step(s0, dt, p, Modulus::constant_one(), 1.0).state;
        const auto ref = ode_reference(0.8, 0.3, dt);
        const double eu = std::abs(out.u.values()[3] - ref[0]);
        const double ev = std::abs(out.v.values()[3] - ref[1]);
        if (prev_u > 0.0) {
            // u_t carries the O(dt^3) defect of the trapezoidal forcing; u integrates it once more
            CHECK(prev_v / ev > 6.5);
            CHECK(prev_v / ev < 9.5);
            CHECK(prev_u / eu > 6.5);
        }
        prev_u = eu;
        prev_v = ev;
        // stays spatially constant
        CHECK(std::abs(out.u.values()[0] - out.u.values()[11]) < 1e-13);
    }
}

TEST_CASE("self-convergence under dt halving is second order") {
    EquationParams p(1.0, 0.0, 1);
    Grid g(1, 256, 12.0);
    auto s0 = initial_state(g, bump_profile(), 0.8);
    auto m = Modulus::constant_one();
    auto a = evolve_fixed(s0, 0.1, 2.0, p, m);
    auto b = evolve_fixed(s0, 0.05, 2.0, p, m);
    auto c = evolve_fixed(s0, 0.025, 2.0, p, m);
    double ratio = max_diff(a.u, b.u) / max_diff(b.u, c.u);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("nonlinearity and effective power") {
    CHECK(nonlinearity(-2.0, 3.0, Modulus::constant_one()) == doctest::Approx(8.0));
    CHECK(nonlinearity(0.0, 3.0, Modulus::power_law(-1.0)) == 0.0);
    CHECK(nonlinearity(0.5, 3.0, Modulus::power_law(-1.0)) == doctest::Approx(0.25));
    CHECK(nonlinearity(0.0, 3.0, Modulus::zero()) == 0.0);
    EquationParams p(1.0, 0.0, 1);
    CHECK(effective_power(p, Modulus::constant_one()) == doctest::Approx(3.0));
    CHECK(effective_power(p, Modulus::power_law(-1.0)) == doctest::Approx(2.0));
}

TEST_CASE("large data blows up, the threshold time is bracketed by the extrapolation") {
    EquationParams p(1.0, 0.0, 1);
    SolverConfig cfg;
    cfg.grid = Grid(1, 256, 10.0);
    cfg.t_max = 50.0;
    auto r = run_to_blowup(p, Modulus::constant_one(), 5.0, gaussian_velocity_profile(p, 0.5), cfg);
    REQUIRE(r.sample.blowup);
    CHECK(r.sample.outcome == RunOutcome::BlowUp);
    CHECK(std::isfinite(r.sample.T_measured));
    CHECK(r.sample.T_measured > 0.0);
    CHECK(r.sample.T_measured <= r.sample.T_threshold * 1.05);
    CHECK(r.trajectory.blowup_index >= 0);
}

TEST_CASE("config validation") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate(1.0));
    auto bad = cfg;
    bad.dt0 = -1.0;
    CHECK_THROWS_AS(bad.validate(1.0), Error);
    bad = cfg;
    bad.blowup_threshold = 0.5;
    CHECK_THROWS_AS(bad.validate(1.0), Error);
    bad = cfg;
    bad.dealias = 1.5;
    CHECK_THROWS_AS(bad.validate(1.0), Error);
}

TEST_CASE("fit_scaling recovers synthetic exponents") {
    std::vector<LifespanSample> s;
    for (double e : {0.4, 0.3, 0.2, 0.1}) {
        LifespanSample x;
        x.epsilon = e;
        x.blowup = true;
        x.T_measured = 3.0 * std::pow(e, -2.0);
        s.push_back(x);
    }
    auto f = fit_scaling(s, ScalingModel::PowerLaw);
    CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0));
    for (auto& x : s) x.T_measured = std::exp(0.5 * std::pow(x.epsilon, -2.0));
    auto l = fit_scaling(s, ScalingModel::LogLinear);
    CHECK(l.slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(l.pearson == doctest::Approx(1.0));
    s.resize(1);
    CHECK_THROWS_AS(fit_scaling(s, ScalingModel::PowerLaw), Error);
}

TEST_CASE("sweep: lifespans decrease with epsilon") {
    EquationParams p(1.0, 0.0, 1);
    SolverConfig cfg;
    cfg.grid = Grid(1, 256, 10.0);
    cfg.t_max = 200.0;
    auto res = sweep_epsilon(p, Modulus::power_law(-1.0), {3.0, 2.0, 1.5}, gaussian_velocity_profile(p, 0.5), cfg, 2);
    REQUIRE(res.size() == 3);
    for (auto& r : res) REQUIRE(r.blowup);
    CHECK(res[0].T_measured < res[1].T_measured);
    CHECK(res[1].T_measured < res[2].T_measured);
    CHECK_THROWS_AS(sweep_epsilon(p, Modulus::power_law(-1.0), {1.0, 2.0}, gaussian_velocity_profile(p), cfg, 1),
                    Error);
}
