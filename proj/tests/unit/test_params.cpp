#include <doctest.h>

#include "sigmalab/errors.hpp"
#include "sigmalab/params.hpp"

#include <cmath>
#include <tuple>

using namespace sigmalab;

TEST_CASE("critical exponent values and the infinite branch") {
    CHECK(critical_exponent({1, 0, 1}).value() == doctest::Approx(3.0));
    CHECK(critical_exponent({1, 1, 1}).is_infinite());
    CHECK(critical_exponent({2, 1, 3}).value() == doctest::Approx(5.0));
    CHECK_THROWS_AS((void)critical_exponent({1, 1, 1}).value(), Error);
    CHECK(critical_exponent({1, 1, 1}).to_string() == "inf");
}

TEST_CASE("Fujita exponent for sigma=1, delta=0") {
    for (int n = 1; n <= 6; ++n)
        CHECK(critical_exponent({1, 0, n}).value() == doctest::Approx(1.0 + 2.0 / n));
}

TEST_CASE("critical exponent decreases in n") {
    double prev = INFINITY;
    for (int n = 2; n <= 8; ++n) {
        const double pc = critical_exponent({1.5, 0.4, n}).value();
        CHECK(pc < prev);
        prev = pc;
    }
}

TEST_CASE("kappa") {
    CHECK(kappa({1, 0, 1}) == 2.0);
    CHECK(kappa({1, 1, 1}) == 1.0);
    CHECK(kappa({2, 0.5, 1}) == 3.0);
    // kappa = sigma once delta >= sigma/2, 2(sigma-delta) below
    for (double d : {0.9, 1.3, 1.7}) CHECK(kappa({1.7, d, 2}) == doctest::Approx(1.7));
    for (double d : {0.0, 0.3, 0.8}) CHECK(kappa({1.7, d, 2}) == doctest::Approx(2 * (1.7 - d)));
}

TEST_CASE("s0 and q0 in all four branches") {
    auto [s, q] = s0_q0({1.5, 0.7, 1});
    CHECK(s == doctest::Approx(0.5));
    CHECK(q == doctest::Approx(2.0));
    std::tie(s, q) = s0_q0({2, 1, 1, 0.5});
    CHECK(s == 0.5);
    CHECK(q == 2.0);
    std::tie(s, q) = s0_q0({1.5, 1, 2});
    CHECK(s == doctest::Approx(0.5));
    CHECK(q == doctest::Approx(3.0));
    std::tie(s, q) = s0_q0({2, 0.25, 1});
    CHECK(s == doctest::Approx(0.25));
    std::tie(s, q) = s0_q0({1, 0, 3, 0.2});
    CHECK(s == doctest::Approx(0.2));
    CHECK(q == doctest::Approx(3.4));
}

TEST_CASE("regime classification with tolerance") {
    CHECK(EquationParams(1, 0.2, 1).regime() == DampingRegime::Effective);
    CHECK(EquationParams(1, 0.5, 1).regime() == DampingRegime::Limit);
    CHECK(EquationParams(1, 0.5 + 1e-14, 1).regime() == DampingRegime::Limit);
    CHECK(EquationParams(1, 0.5 + 1e-9, 1).regime() == DampingRegime::NonEffective);
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(EquationParams(0.5, 0, 1), Error);
    CHECK_THROWS_AS(EquationParams(1, 1.5, 1), Error);
    CHECK_THROWS_AS(EquationParams(1, -0.1, 1), Error);
    CHECK_THROWS_AS(EquationParams(1, 0, 0), Error);
    try {
        EquationParams(1, 1.5, 1);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParamsInvalid);
        CHECK(std::string(e.what()).find("delta must lie in [0, sigma]") != std::string::npos);
    }
}

TEST_CASE("global existence admissibility") {
    CHECK(global_existence_admissible({1, 0, 1}).admissible);
    const auto r = global_existence_admissible({1, 0, 2});
    CHECK_FALSE(r.admissible);
    CHECK(r.reason == AdmissibilityReason::EffectiveDimensionOutOfRange);
    CHECK(nbar(2.0) == doctest::Approx(2.0 * (std::sqrt(2.0) + 1.0)));
    CHECK(global_existence_admissible({2, 2, 3}).admissible);
    CHECK(global_existence_admissible({1, 0.5, 2}).admissible);
    CHECK_FALSE(global_existence_admissible({1, 0.5, 1}).admissible);
    const auto open = global_existence_admissible({1, 0.8, 2});
    CHECK(open.reason == AdmissibilityReason::UnsupportedByTheory);
    CHECK(reason_name(open.reason) == "unsupported-by-theory");
    // n = 5 > nbar(2)
    CHECK(global_existence_admissible({2, 2, 5}).reason == AdmissibilityReason::NonEffectiveDimensionOutOfRange);
}
