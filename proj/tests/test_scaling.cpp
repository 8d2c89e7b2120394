#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "fraclab/scaling.hpp"

using namespace fraclab;

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(validate(FracParams{0.0, 0.1}), std::domain_error);
    CHECK_THROWS_AS(validate(FracParams{1.0, 0.1}), std::domain_error);
    CHECK_THROWS_AS(validate(FracParams{0.5, 0.0}), std::domain_error);
    CHECK_THROWS_AS(validate(FracParams{0.5, 1.0}), std::domain_error);
    CHECK_THROWS_AS(validate(FracParams{0.5, -0.1}), std::domain_error);
    CHECK_NOTHROW(validate(FracParams{0.5, 0.5}));
}

TEST_CASE("phi kernel basics") {
    CHECK(phi_kernel(0.0) == doctest::Approx(1.0));
    CHECK(phi_kernel(1e-9) == doctest::Approx(1.0).epsilon(1e-8));
    // x/(1-e^-x) directly at moderate x
    CHECK(phi_kernel(2.0) == doctest::Approx(2.0 / (1.0 - std::exp(-2.0))).epsilon(1e-14));
    CHECK(phi_kernel(-1.0) == doctest::Approx(-1.0 / (1.0 - std::exp(1.0))).epsilon(1e-14));
}

TEST_CASE("reference values") {
    CHECK(lambda_minus({0.4, 0.1}) == doctest::Approx(0.456977118269).epsilon(1e-10));
    CHECK(lambda_plus({0.6, 0.1}) == doctest::Approx(0.541942772762).epsilon(1e-10));
    CHECK(lambda_minus({0.45, 1e-3}) == doctest::Approx(0.186622483596).epsilon(1e-10));
    CHECK(lambda_plus({0.55, 1e-3}) == doctest::Approx(0.200476023754).epsilon(1e-10));
    CHECK(lambda_continuous({0.5, 1e-4}) == doctest::Approx(0.108573620476).epsilon(1e-10));
}

TEST_CASE("branch domains") {
    CHECK_THROWS_AS(lambda_plus({0.4, 0.1}), std::domain_error);
    CHECK_THROWS_AS(lambda_minus({0.6, 0.1}), std::domain_error);
}

TEST_CASE("defining identities against the naive formulas") {
    // lambda_plus solves lambda*(1 - eps^{2s-1}) = (2s-1), etc.  Check against
    // the unguarded expressions where those are well conditioned.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> S(0.55, 0.95), E(1e-6, 0.5);
    for (int i = 0; i < 1000; ++i) {
        const double s = S(rng), eps = E(rng);
        const double naive = (2 * s - 1) / (1 - std::pow(eps, 2 * s - 1));
        CHECK(lambda_plus({s, eps}) == doctest::Approx(naive).epsilon(1e-12));
        const double sm = 1.0 - s; // mirrored into (0.05,0.45)
        const double naive_m = (1 - 2 * sm) / (1 - std::pow(eps, (1 - 2 * sm) / (2 * sm)));
        CHECK(lambda_minus({sm, eps}) == doctest::Approx(naive_m).epsilon(1e-12));
    }
}

TEST_CASE("continuity across s = 1/2") {
    for (double eps : {1e-2, 1e-3, 1e-5}) {
        const double L = -std::log(eps);
        const double mid = lambda_continuous({0.5, eps});
        CHECK(mid == doctest::Approx(1.0 / L).epsilon(1e-13));
        for (double d : {1e-6, 1e-8, 1e-10}) {
            CHECK(lambda_continuous({0.5 + d, eps}) == doctest::Approx(mid).epsilon(1e-4));
            CHECK(lambda_continuous({0.5 - d, eps}) == doctest::Approx(mid).epsilon(1e-4));
        }
    }
}

TEST_CASE("scaled coefficients") {
    for (double s : {0.35, 0.5, 0.65}) {
        for (double eps : {1e-2, 1e-4}) {
            FracParams p{s, eps};
            auto [cpot, csem] = scaled_coefficients(p);
            const double lam = lambda_continuous(p);
            CHECK(cpot == doctest::Approx(lam / eps).epsilon(1e-13));
            const double expo = std::max(2 * s - 1, 0.0);
            CHECK(csem == doctest::Approx(lam * std::pow(eps, expo)).epsilon(1e-13));
        }
    }
}

TEST_CASE("regime classification") {
    CHECK(regime({0.5, 1e-3}).cls == Regime::SubLogarithmic);
    CHECK(regime({0.53, 1e-3}).cls == Regime::Order1);
    CHECK(regime({0.5 + 1e-13, 1e-3}).value == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(regime({0.9, 1e-8}).cls == Regime::SuperLogarithmic);
    CHECK(regime({0.500001, 1e-3}).cls == Regime::SubLogarithmic);
    // value is (2s-1)|log eps|
    auto r = regime({0.6, 1e-4});
    CHECK(r.value == doctest::Approx(0.2 * (-std::log(1e-4))).epsilon(1e-12));
}
