#include "sigmalab/blowup_diag.hpp"
#include "sigmalab/errors.hpp"
#include "sigmalab/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sigmalab;

namespace {

TrajectoryRecord zero_trajectory(double t_end, double dt) {
    TrajectoryRecord tr;
    tr.grid = Grid(1, 64, 10.0);
    for (double t = 0.0; t <= t_end + 1e-12; t += dt) tr.snapshots.push_back({t, std::vector<double>(64, 0.0)});
    return tr;
}

// shared blow-up run: p = 2 sub-critical power, ε = 0.4
const RunResult& blowup_run() {
    static const RunResult r = [] {
        EquationParams p(1.0, 0.0, 1);
        SolverConfig cfg;
        cfg.grid = Grid(1, 512, 10.0);
        cfg.t_max = 500.0;
        cfg.snapshot_dt = 0.05;
        return run_to_blowup(p, Modulus::power_law(-1.0), 0.4, gaussian_velocity_profile(p, 0.5), cfg);
    }();
    return r;
}

} // namespace

TEST_CASE("family defaults satisfy the constraints") {
    for (auto [s, d, n] : {std::tuple{1.0, 0.0, 1}, {1.0, 0.25, 1}, {1.5, 0.5, 2}, {2.0, 0.0, 2}}) {
        EquationParams p(s, d, n);
        auto f = TestFunctionFamily::defaults(p);
        CHECK_NOTHROW(f.validate(p));
        CHECK(f.beta0 < f.beta1);
        auto bad = f;
        bad.beta0 = f.beta1;
        CHECK_THROWS_AS(bad.validate(p), Error);
        bad = f;
        bad.theta = 0.5;
        CHECK_THROWS_AS(bad.validate(p), Error);
        bad = f;
        bad.r2 = 1.0;
        CHECK_THROWS_AS(bad.validate(p), Error);
    }
}

TEST_CASE("closed forms at the origin and plateaus") {
    auto f = TestFunctionFamily::defaults(EquationParams(1.0, 0.0, 1));
    CHECK(phi(0, 0, f) == 1.0);
    CHECK(capital_phi(0, 0, f) == 0.0);
    CHECK(rho(0.25) == 1.0);
    CHECK(rho(2.0) == 0.0);
    CHECK(rho(0.75) == doctest::Approx(0.5));
}

TEST_CASE("rho is C2 and non-increasing") {
    const double h = 1e-4;
    auto d1 = [&](double t) { return (rho(t + h) - rho(t - h)) / (2 * h); };
    auto d2 = [&](double t) { return (rho(t + h) - 2 * rho(t) + rho(t - h)) / (h * h); };
    for (double k : {0.5, 1.0}) {
        CHECK(std::abs(d1(k)) < 1e-6);
        CHECK(std::abs(d2(k)) < 1e-2);
    }
    double prev = 1.0;
    for (double t = 0.0; t <= 1.2; t += 0.01) {
        CHECK(rho(t) <= prev + 1e-15);
        prev = rho(t);
    }
}

TEST_CASE("bounds on a random point cloud") {
    EquationParams p(1.5, 0.5, 2);
    auto f = TestFunctionFamily::defaults(p);
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> U(0.0, 20.0);
    const double bound = phi_r_integral_bound(f);
    for (int i = 0; i < 200; ++i) {
        const double t = U(gen), r = U(gen), R = 0.1 + U(gen);
        const double ph = phi(t, r, f), cp = capital_phi(t, r, f);
        CHECK(ph > 0.0);
        CHECK(ph <= 1.0);
        CHECK(cp >= 0.0);
        CHECK(cp <= 1.0);
        CHECK(psi_R(t, r, R, f) <= 1.0);
        CHECK(psi_R(t, r, R, f) >= psi_R(t + 0.5, r, R, f));
        CHECK(psi_R(t, r, R, f) >= psi_R(t, r + 0.5, R, f));
        if (i % 10 == 0) CHECK(phi_r_integral(t, r, R, f) <= bound * (1 + 1e-8));
    }
    // the supremum is approached as R grows
    CHECK(phi_r_integral(0.1, 0.1, 1e80, f) == doctest::Approx(bound).epsilon(1e-2));
}

TEST_CASE("zero solution: Y vanishes and the inequality check reports degeneracy") {
    EquationParams p(1.0, 0.0, 1);
    auto f = TestFunctionFamily::defaults(p);
    auto tr = zero_trajectory(10.0, 0.02);
    auto R = geomspace(0.5, 5.0, 12);
    auto Y = compute_Y(tr, p, Modulus::constant_one(), f, R);
    for (double v : Y.Y) CHECK(v == 0.0);
    auto ck = check_differential_inequality(Y, p, Modulus::constant_one(), 0.1, 1.0, 1.0);
    CHECK(ck.degenerate);
    CHECK(ck.c_hat == 0.0);
    CHECK_FALSE(ck.pass);
}

TEST_CASE("input checks") {
    EquationParams p(1.0, 0.0, 1);
    auto f = TestFunctionFamily::defaults(p);
    auto tr = zero_trajectory(10.0, 0.5);
    CHECK_THROWS_AS(compute_Y(tr, p, Modulus::constant_one(), f, geomspace(0.5, 5.0, 12)), Error);
    auto dense = zero_trajectory(4.0, 0.02);
    CHECK_THROWS_AS(compute_Y(dense, p, Modulus::constant_one(), f, geomspace(0.5, 5.0, 12)), Error);
    auto Y = compute_Y(dense, p, Modulus::constant_one(), f, geomspace(0.5, 4.0, 5));
    CHECK_THROWS_AS(check_differential_inequality(Y, p, Modulus::constant_one(), 0.1, 1.0, 1.0), Error);
}

TEST_CASE("data constant of the normalized profile") {
    EquationParams p(1.0, 0.0, 1);
    CHECK(data_constant(p, gaussian_velocity_profile(p, 0.5)) == doctest::Approx(1.0).epsilon(1e-6));
    EquationParams q(1.0, 0.25, 1);
    CHECK(data_constant(q, gaussian_velocity_profile(q, 0.5)) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("blow-up trajectory: monotone Y, bounded by I_R, positive c-hat") {
    const auto& run = blowup_run();
    REQUIRE(run.sample.blowup);
    EquationParams p(1.0, 0.0, 1);
    auto m = Modulus::power_law(-1.0);
    auto f = TestFunctionFamily::defaults(p);
    const double T = run.sample.T_measured;
    auto Y = compute_Y(run.trajectory, p, m, f, geomspace(0.5, T / 2, 30));
    CHECK(Y.monotone);
    CHECK(Y.bound_holds);
    CHECK(Y.C_fit > 0.0);
    CHECK(Y.C_fit <= Y.C_bound);
    for (double v : Y.y) CHECK(v >= 0.0);
    const double Cd = data_constant(p, gaussian_velocity_profile(p, 0.5));
    auto ck = check_differential_inequality(Y, p, m, 0.4, 1.0, Cd, 1.0, T / 2);
    CHECK(ck.pass);
    CHECK(ck.c_hat > 0.0);
    auto ck2 = check_differential_inequality(Y, p, m, 0.4, 2.0, Cd, 1.0, T / 2);
    CHECK(ck2.c_hat <= ck.c_hat);
}
