#include <doctest.h>

#include "boxdyn/model.hpp"

#include <cmath>
#include <random>

using namespace boxdyn;

TEST_SUITE("model") {

TEST_CASE("wall_length across variants") {
    const auto lin = WallTrajectory::linear(100.0, 1e-4);
    CHECK(wall_length(lin, 0.0) == doctest::Approx(100.0).epsilon(1e-15));
    CHECK(wall_length(lin, 1000.0) == doctest::Approx(100.1).epsilon(1e-15));

    const auto sta = WallTrajectory::make_static(100.0);
    CHECK(wall_length(sta, 12345.0) == 100.0);

    const auto sm = WallTrajectory::smooth_turn_on(100.0, 1e-4, 1e3);
    CHECK(wall_length(sm, 0.0) == 100.0);
    // asymptotic slope is q once the exponential has died
    const double slope = (wall_length(sm, 2000.0) - wall_length(sm, 1000.0)) / 1000.0;
    CHECK(slope == doctest::Approx(1e-4).epsilon(1e-12));

    const auto rev = WallTrajectory::piecewise_reversal(100.0, 1e-4, 2000.0);
    CHECK(wall_length(rev, 1000.0) == doctest::Approx(100.1).epsilon(1e-15));
    CHECK(wall_length(rev, 2000.0) == doctest::Approx(100.0).epsilon(1e-15));

    // contraction past collapse is rejected
    const auto crash = WallTrajectory::linear(100.0, -1.0);
    CHECK(wall_length(crash, 99.0) > 0.0);
    CHECK_THROWS_AS(wall_length(crash, 100.0), std::domain_error);
}

TEST_CASE("wall_velocity is analytic") {
    CHECK(wall_velocity(WallTrajectory::make_static(50.0), 3.0) == 0.0);
    CHECK(wall_velocity(WallTrajectory::linear(100.0, 1e-4), 77.0) == 1e-4);

    const auto sm = WallTrajectory::smooth_turn_on(100.0, 1e-4, 1e3);
    CHECK(wall_velocity(sm, 0.0) == 0.0);
    // matches d/dt of L(t) by central differences
    const double t = 3e-3, h = 1e-7;
    const double fd = (wall_length(sm, t + h) - wall_length(sm, t - h)) / (2.0 * h);
    CHECK(wall_velocity(sm, t) == doctest::Approx(fd).epsilon(1e-7));

    const auto rev = WallTrajectory::piecewise_reversal(100.0, 1e-4, 2000.0);
    CHECK_THROWS_AS(wall_velocity(rev, 1000.0), std::invalid_argument);
    CHECK(wall_velocity_left(rev, 1000.0) == 1e-4);
    CHECK(wall_velocity_right(rev, 1000.0) == -1e-4);
}

TEST_CASE("phase_integral closed forms and quadrature agree") {
    const auto lin = WallTrajectory::linear(100.0, 1e-4);
    CHECK(phase_integral(lin, 0.0) == 0.0);
    CHECK(phase_integral(lin, 1000.0) ==
          doctest::Approx(1000.0 / (100.0 * 100.1)).epsilon(1e-14));

    // independent quadrature oracle
    auto integrand = [](double s) {
        const double L = 100.0 + 1e-4 * s;
        return 1.0 / (L * L);
    };
    const double quad = adaptive_quadrature(integrand, 0.0, 1000.0, 1e-13);
    CHECK(std::abs(phase_integral(lin, 1000.0) - quad) < 1e-12 * quad);

    const auto sta = WallTrajectory::make_static(100.0);
    CHECK(phase_integral(sta, 42.0) == doctest::Approx(42.0 / 1e4).epsilon(1e-15));

    // smooth turn-on via adaptive quadrature matches an independent run
    const auto sm = WallTrajectory::smooth_turn_on(100.0, 1e-4, 1e3);
    auto f2 = [&sm](double s) { const double L = wall_length(sm, s); return 1.0 / (L * L); };
    const double ref = adaptive_quadrature(f2, 0.0, 0.5, 1e-14);
    CHECK(std::abs(phase_integral(sm, 0.5) - ref) < 1e-12 * ref);

    // reversal branch: continuous across T/2
    const auto rev = WallTrajectory::piecewise_reversal(100.0, 1e-3, 2000.0);
    const double below = phase_integral(rev, 1000.0 - 1e-9);
    const double above = phase_integral(rev, 1000.0 + 1e-9);
    CHECK(std::abs(above - below) < 1e-12);

    // monotone non-decreasing in t
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 2000.0);
    for (int i = 0; i < 200; ++i) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        CHECK(phase_integral(rev, b) >= phase_integral(rev, a) - 1e-18);
    }
}

TEST_CASE("eigenstates: values, boundaries, orthonormality") {
    const Grid g2 = Grid::transformed(2.0, 257);
    const WaveField f0 = eigenstate({0, Parity::Even}, 2.0, g2);
    CHECK(std::abs(f0.samples[128] - cplx(1.0)) < 1e-15);   // sqrt(2/2) cos 0
    CHECK(f0.samples.front() == cplx(0.0));
    CHECK(f0.samples.back() == cplx(0.0));

    const Grid g = Grid::transformed(100.0, 2049);
    const WaveField e0 = eigenstate({0, Parity::Even}, 100.0, g);
    CHECK(std::abs(inner_product(e0, e0) - cplx(1.0)) < 1e-10);

    // Gram matrix of the first 20 states (both parities interleaved)
    const Grid gg = Grid::transformed(100.0, 4097);
    std::vector<WaveField> basis;
    for (std::size_t n = 0; n < 10; ++n) {
        basis.push_back(eigenstate({n, Parity::Even}, 100.0, gg));
        basis.push_back(eigenstate({n, Parity::Odd}, 100.0, gg));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j) {
            const cplx v = inner_product(basis[i], basis[j]);
            worst = std::max(worst, std::abs(v - (i == j ? cplx(1.0) : cplx(0.0))));
        }
    CHECK(worst < 1e-8);

    CHECK_THROWS_AS(eigenstate({0, Parity::Even}, 50.0, g), std::invalid_argument);
}

TEST_CASE("eigenvalues") {
    const PhysicalParams p;
    CHECK(eigenvalue({0, Parity::Even}, 100.0, p) ==
          doctest::Approx(M_PI * M_PI / 2e4).epsilon(1e-15));
    CHECK(eigenvalue({0, Parity::Even}, 100.0, p) == doctest::Approx(4.9348022005446789e-4));
    CHECK(eigenvalue({1, Parity::Even}, 100.0, p) ==
          doctest::Approx(9.0 * eigenvalue({0, Parity::Even}, 100.0, p)).epsilon(1e-15));
    CHECK(eigenvalue({0, Parity::Even}, 200.0, p) ==
          doctest::Approx(0.25 * eigenvalue({0, Parity::Even}, 100.0, p)).epsilon(1e-15));
    // odd family: 2(n+1) quantum numbers
    CHECK(eigenvalue({0, Parity::Odd}, 100.0, p) ==
          doctest::Approx(4.0 * eigenvalue({0, Parity::Even}, 100.0, p)).epsilon(1e-15));
}

TEST_CASE("inner product is sesquilinear and guards grids") {
    const Grid g = Grid::transformed(100.0, 513);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    WaveField a(g, 0.0), b(g, 0.0);
    for (std::size_t i = 1; i + 1 < g.n(); ++i) {
        a.samples[i] = cplx(nd(rng), nd(rng));
        b.samples[i] = cplx(nd(rng), nd(rng));
    }
    const cplx ab = inner_product(a, b);
    const cplx ba = inner_product(b, a);
    CHECK(std::abs(ab - std::conj(ba)) < 1e-13 * std::abs(ab));

    const WaveField e0 = eigenstate({0, Parity::Even}, 100.0, g);
    const WaveField e1 = eigenstate({1, Parity::Even}, 100.0, g);
    CHECK(std::abs(inner_product(e0, e1)) < 1e-10);

    WaveField c(Grid::transformed(100.0, 257), 0.0);
    CHECK_THROWS_AS(inner_product(a, c), std::invalid_argument);
}

TEST_CASE("quadrature weights integrate cubics exactly") {
    for (std::size_t n : {5ul, 9ul, 101ul, 4ul, 8ul, 4096ul}) {
        const double dx = 1.0 / static_cast<double>(n - 1);
        const auto w = simpson_weights(n, dx);
        double s0 = 0.0, s3 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = static_cast<double>(i) * dx;
            s0 += w[i];
            s3 += w[i] * x * x * x;
        }
        CHECK(s0 == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(s3 == doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("grid invariants and trapezoid norm") {
    const Grid g = Grid::transformed(100.0, 4096);
    CHECK(g.x.front() == -50.0);
    CHECK(g.x.back() == 50.0);
    CHECK_THROWS_AS(Grid::transformed(100.0, 2), std::invalid_argument);

    const WaveField e5 = eigenstate({5, Parity::Even}, 100.0, g);
    CHECK(std::abs(norm_l2_trapezoid(e5) - 1.0) < 1e-8);
    CHECK(std::abs(norm_l2(e5) - 1.0) < 1e-10);
}

}  // TEST_SUITE
