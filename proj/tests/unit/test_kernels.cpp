#include "sigmalab/errors.hpp"
#include "sigmalab/kernels.hpp"
#include "sigmalab/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>
#include <doctest.h>

#include <array>
#include <cmath>

using namespace sigmalab;

namespace {

// ü + a u̇ + b u = 0 to near machine precision
std::array<double, 2> ode_oracle(double a, double b, std::array<double, 2> y, double t) {
    namespace ode = boost::numeric::odeint;
    auto rhs = [&](const std::array<double, 2>& x, std::array<double, 2>& dx, double) {
        dx[0] = x[1];
        dx[1] = -a * x[1] - b * x[0];
    };
    ode::integrate_adaptive(ode::make_controlled(1e-14, 1e-14, ode::runge_kutta_dopri5<std::array<double, 2>>()), rhs,
                            y, 0.0, t, 1e-3);
    return y;
}

} // namespace

TEST_CASE("roots") {
    const EquationParams p(1, 0, 1);
    auto r = lambda12(0.0, p);
    CHECK(r.lambda1.real() == doctest::Approx(0.0));
    CHECK(r.lambda2.real() == doctest::Approx(-1.0));
    r = lambda12(1.0, p);
    CHECK(r.branch == RootBranch::ComplexRoots);
    CHECK(r.lambda1.real() == doctest::Approx(-0.5));
    CHECK(std::abs(r.lambda1.imag()) == doctest::Approx(std::sqrt(3.0) / 2));
    r = lambda12(0.5, p);
    CHECK(r.branch == RootBranch::DoubleRoot);
    CHECK(r.lambda1.real() == doctest::Approx(-0.5));
    CHECK(lambda12(0.3, p).branch == RootBranch::RealRoots);
    CHECK_THROWS_AS(lambda12(-1.0, p), Error);
}

TEST_CASE("kernel examples") {
    const EquationParams p(1, 0, 1);
    const auto k0 = kernel_values(0.0, 3.0, p);
    CHECK(k0.K0 == 1.0);
    CHECK(k0.K1 == 0.0);
    CHECK(k0.dK0 == 0.0);
    CHECK(k0.dK1 == 1.0);
    CHECK(kernel_values(2.0, 0.0, p).K1 == doctest::Approx(1 - std::exp(-2.0)).epsilon(1e-14));
    const double ref = std::exp(-0.5);
    CHECK(kernel_values(1.0, 0.5, p).K1 == doctest::Approx(ref).epsilon(1e-14));
    CHECK(std::abs(kernel_values(1.0, 0.5 + 1e-7, p).K1 - ref) < 1e-6);
    CHECK(std::abs(kernel_values(1.0, 0.5 - 1e-7, p).K1 - ref) < 1e-6);
}

TEST_CASE("continuity across the double root") {
    for (auto [s, d] : {std::pair{1.0, 0.0}, std::pair{1.5, 1.0}, std::pair{2.0, 1.2}}) {
        const EquationParams p(s, d, 1);
        // |ξ|^{4δ} = 4|ξ|^{2σ}
        const double xi0 = std::pow(4.0, 1.0 / (4 * d - 2 * s));
        REQUIRE(lambda12(xi0, p).branch == RootBranch::DoubleRoot);
        for (double t : {0.3, 1.0, 5.0}) {
            const auto k = kernel_values(t, xi0, p);
            for (double e : {1e-9, 1e-7, 1e-5, 1e-4}) {
                for (double xi : {xi0 * (1 + e), xi0 * (1 - e)}) {
                    const auto q = kernel_values(t, xi, p);
                    const double scale = 1e-6 * std::max(1.0, e / 1e-7);
                    CHECK(std::abs(q.K0 - k.K0) < scale);
                    CHECK(std::abs(q.K1 - k.K1) < scale);
                    CHECK(std::abs(q.dK1 - k.dK1) < scale);
                }
            }
        }
    }
}

TEST_CASE("Wronskian identity on 10^4 modes") {
    for (auto [s, d] : {std::pair{1.0, 0.0}, std::pair{1.0, 0.25}, std::pair{1.0, 0.5}, std::pair{1.5, 1.0}, std::pair{2.0, 2.0}}) {
        const EquationParams p(s, d, 1);
        const auto xs = geomspace(1e-4, 1e2, 10000);
        for (double t : {1e-3, 0.1, 1.0, 10.0}) {
            double worst = 0.0;
            for (double xi : xs) {
                const auto k = kernel_values(t, xi, p);
                const double det = k.K0 * k.dK1 - k.K1 * k.dK0;
                worst = std::max(worst, std::abs(det - std::exp(-std::pow(xi, 2 * d) * t)));
            }
            CHECK(worst < 1e-10);
        }
    }
}

TEST_CASE("derivatives, positivity and stability") {
    const EquationParams p(1.5, 0.4, 1);
    for (double xi : {0.0, 0.2, 1.0, 3.0})
        for (double t : {0.5, 2.0}) {
            const double h = 1e-5;
            const auto k = kernel_values(t, xi, p);
            const auto kp = kernel_values(t + h, xi, p);
            const auto km = kernel_values(t - h, xi, p);
            CHECK(k.dK0 == doctest::Approx((kp.K0 - km.K0) / (2 * h)).epsilon(1e-7).scale(1e-8));
            CHECK(k.dK1 == doctest::Approx((kp.K1 - km.K1) / (2 * h)).epsilon(1e-7).scale(1e-8));
            const auto r = lambda12(xi, p);
            CHECK(r.lambda1.real() <= 1e-15);
            CHECK(r.lambda2.real() <= 1e-15);
            if (r.branch != RootBranch::ComplexRoots) CHECK(k.K1 >= 0.0);
        }
}

TEST_CASE("Duhamel weights match quadrature") {
    namespace bq = boost::math::quadrature;
    for (auto [s, d] : {std::pair{1.0, 0.0}, std::pair{1.0, 0.5}, std::pair{2.0, 0.3}, std::pair{1.5, 1.5}})
        for (double xi : {0.0, 1e-3, 0.5, 2.0, 40.0})
            for (double t : {1e-4, 0.01, 0.5, 3.0}) {
                const EquationParams p(s, d, 1);
                const double W = bq::gauss_kronrod<double, 61>::integrate(
                    [&](double r) { return kernel_values(r, xi, p).K1; }, 0.0, t, 10, 1e-12);
                const double V = bq::gauss_kronrod<double, 61>::integrate(
                    [&](double r) { return (t - r) * kernel_values(r, xi, p).K1; }, 0.0, t, 10, 1e-12);
                const auto w = duhamel_weights(t, xi, p);
                CHECK(w.W1 == doctest::Approx(W).epsilon(1e-9));
                CHECK(w.V == doctest::Approx(V).epsilon(1e-9));
            }
}

TEST_CASE("propagation") {
    const EquationParams p(1, 0, 1);
    const Grid g(1, 64, M_PI);
    LinearState z{SpectralField(g), SpectralField(g)};
    CHECK(propagate_linear(z, 3.0, p).u.sup_norm() == 0.0);

    LinearState s{SpectralField::from_function(g, [](double x) { return std::sin(x); }), SpectralField(g)};
    const auto out = propagate_linear(s, 1.0, p);
    const auto y = ode_oracle(1.0, 1.0, {1.0, 0.0}, 1.0);
    for (int i = 0; i < g.N; ++i) {
        CHECK(std::abs(out.u.values()[i] - y[0] * std::sin(g.x(i))) < 1e-8);
        CHECK(std::abs(out.v.values()[i] - y[1] * std::sin(g.x(i))) < 1e-8);
    }

    const EquationParams q(1.5, 0.6, 1);
    LinearState r{SpectralField::from_function(g, [](double x) { return std::exp(-4 * x * x); }),
                  SpectralField::from_function(g, [](double x) { return std::cos(2 * x) * x; })};
    const auto a = propagate_linear(propagate_linear(r, 0.7, q), 1.6, q);
    const auto b = propagate_linear(r, 2.3, q);
    for (int i = 0; i < g.N; ++i) {
        CHECK(std::abs(a.u.values()[i] - b.u.values()[i]) < 1e-10);
        CHECK(std::abs(a.v.values()[i] - b.v.values()[i]) < 1e-10);
    }
    const PropagatorTable tab(q, g, 2.3);
    CHECK(tab.wronskian_defect() < 1e-10);
    const auto c = propagate_linear(r, tab);
    for (int i = 0; i < g.N; ++i) CHECK(c.u.values()[i] == doctest::Approx(b.u.values()[i]).epsilon(1e-14));
    CHECK_THROWS_AS(propagate_linear(r, PropagatorTable(q, Grid(1, 32, M_PI), 1.0)), Error);
    CHECK_THROWS_AS(PropagatorTable(q, g, 0.0), Error);
}

TEST_CASE("decay targets and measurement") {
    CHECK(decay_target(EquationParams(1, 0, 1), INFINITY) == doctest::Approx(-0.5));
    CHECK(decay_target(EquationParams(1, 0.25, 1), INFINITY) == doctest::Approx(-1.0 / 3));
    DecayOptions o;
    o.t_max = 200;
    const auto m = measure_decay(EquationParams(1, 0, 1), o);
    CHECK(m.slope == doctest::Approx(-0.5).epsilon(0.05));
    CHECK(m.boundary_fraction < 1e-6);
    o.L = 20;
    CHECK_THROWS_AS(measure_decay(EquationParams(1, 0, 1), o), Error);
}
