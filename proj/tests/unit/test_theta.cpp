#include <doctest.h>

#include "boxdyn/theta.hpp"

#include <cmath>
#include <random>

using namespace boxdyn;

namespace {

// independent partial-sum oracles, fixed 50 terms
cplx oracle_theta2(cplx z, cplx kappa) {
    cplx s(0.0);
    for (int n = 0; n < 50; ++n) {
        const double h = n + 0.5;
        s += std::exp(cplx(0.0, M_PI) * kappa * (h * h)) * std::cos((2.0 * n + 1.0) * z);
    }
    return 2.0 * s;
}

cplx oracle_theta4(cplx z, cplx kappa) {
    cplx s(1.0);
    for (int n = 1; n < 50; ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        s += sign * std::exp(cplx(0.0, M_PI) * kappa * (1.0 * n * n)) * 2.0 *
             std::cos(2.0 * n * z);
    }
    return s;
}

}  // namespace

TEST_SUITE("theta") {

TEST_CASE("theta2 spot values") {
    // termwise zero at z = pi/2
    CHECK(std::abs(theta2_direct({cplx(M_PI / 2, 0.0), cplx(0.0, 2.0)})) < 1e-14);

    const cplx v = theta2_direct({cplx(0.0), cplx(0.0, 4.0)});
    CHECK(std::abs(v - oracle_theta2(cplx(0.0), cplx(0.0, 4.0))) < 1e-16);
    CHECK(v.real() == doctest::Approx(0.0864278365285956).epsilon(1e-13));
    CHECK(std::abs(v.imag()) < 1e-18);
}

TEST_CASE("theta4 spot values") {
    // only n = 0 survives for large Im kappa
    const cplx big = theta4_direct({cplx(0.7, 0.1), cplx(0.3, 10.0)});
    CHECK(std::abs(big - 1.0) < 2.0 * std::exp(-10.0 * M_PI) * std::exp(0.3) + 1e-15);

    const cplx v = theta4_direct({cplx(0.0), cplx(0.0, 1.0)});
    CHECK(std::abs(v - oracle_theta4(cplx(0.0), cplx(0.0, 1.0))) < 1e-15);
    CHECK(v.real() == doctest::Approx(0.9135791381561168).epsilon(1e-13));
}

TEST_CASE("shift symmetries") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const cplx z(M_PI * u(rng), u(rng));
        const cplx k(u(rng), 0.05 + 2.0 * (u(rng) + 1.0));
        const cplx a2 = theta2_direct({z, k});
        const cplx b2 = theta2_direct({z + M_PI, k});
        CHECK(std::abs(a2 + b2) < 1e-12 * std::max(1.0, std::abs(a2)));
        const cplx a4 = theta4_direct({z, k});
        const cplx b4 = theta4_direct({z + M_PI, k});
        CHECK(std::abs(a4 - b4) < 1e-12 * std::max(1.0, std::abs(a4)));
        // parity
        CHECK(std::abs(a2 - theta2_direct({-z, k})) < 1e-13 * std::max(1.0, std::abs(a2)));
        CHECK(std::abs(a4 - theta4_direct({-z, k})) < 1e-13 * std::max(1.0, std::abs(a4)));
    }
}

TEST_CASE("jacobi transformation identity") {
    // self-dual point
    const cplx a = theta2_direct({cplx(0.0), cplx(0.0, 1.0)});
    const cplx b = jacobi_transform_theta2({cplx(0.0), cplx(0.0, 1.0)});
    CHECK(std::abs(a - b) < 1e-12);

    const cplx c = theta2_direct({cplx(0.3, 0.1), cplx(0.2, 0.5)});
    const cplx d = jacobi_transform_theta2({cplx(0.3, 0.1), cplx(0.2, 0.5)});
    CHECK(std::abs(c - d) < 1e-12 * std::abs(c));

    CHECK(std::abs(jacobi_transform_theta2({cplx(M_PI / 2, 0.0), cplx(0.0, 2.0)})) < 1e-12);

    // randomized sweep over the full Im kappa decade range
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double im_k = 0.05 * std::pow(50.0 / 0.05, u01(rng));
        const cplx k(2.0 * u01(rng) - 1.0, im_k);
        const cplx z(M_PI * (2.0 * u01(rng) - 1.0), 2.0 * u01(rng) - 1.0);
        const cplx lhs = theta2_direct({z, k});
        const cplx rhs = jacobi_transform_theta2({z, k});
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("theta4 quasi-periodicity tail bound") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        // arguments as they appear after the transformation, Im(-1/kappa) >= 20
        const double im = 20.0 + 60.0 * u01(rng);
        const cplx kp(4.0 * u01(rng) - 2.0, im);
        const cplx zp(4.0 * u01(rng) - 2.0, 4.0 * u01(rng) - 2.0);
        const double dev = std::abs(theta4_direct({zp, kp}) - 1.0);
        const double bound = 3.0 * std::exp(-M_PI * im) * std::exp(2.0 * std::abs(zp.imag()));
        CHECK(dev <= bound);
    }
}

TEST_CASE("domain and convergence failures") {
    CHECK_THROWS_AS(theta2_direct({cplx(0.0), cplx(1.0, 0.0)}), std::invalid_argument);
    CHECK_THROWS_AS(theta4_direct({cplx(0.0), cplx(0.0, -1.0)}), std::invalid_argument);
    // nome decay too slow to converge before the term cap
    CHECK_THROWS_AS(theta2_direct({cplx(0.3, 0.0), cplx(0.0, 1e-12)}), std::runtime_error);
}

TEST_CASE("algorithm selection matches the direct series") {
    // dual route chosen for small Im kappa; values must agree with the
    // direct series where both converge
    for (const cplx k : {cplx(0.0, 0.07), cplx(-0.4, 0.3), cplx(0.1, 9.0)}) {
        const cplx z(0.77, 0.05);
        const cplx a = theta2({z, k});
        const cplx b = theta2_direct({z, k});
        CHECK(std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(b)));
        const cplx c = theta4({z, k});
        const cplx d = theta4_direct({z, k});
        CHECK(std::abs(c - d) < 1e-12 * std::max(1.0, std::abs(d)));
    }
}

}  // TEST_SUITE
