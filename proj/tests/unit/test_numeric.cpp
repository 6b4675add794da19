#include <doctest.h>

#include "boxdyn/analytic.hpp"
#include "boxdyn/numeric.hpp"

#include <cmath>
#include <random>

using namespace boxdyn;

namespace {

const PhysicalParams kP;

double linf_diff(const WaveField& a, const WaveField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.n(); ++i)
        m = std::max(m, std::abs(a.samples[i] - b.samples[i]));
    return m;
}

// plain-dot inner product: the discrete L2 pairing of the propagator
cplx dot(const WaveField& a, const WaveField& b) {
    cplx s(0.0);
    for (std::size_t i = 0; i < a.n(); ++i) s += std::conj(a.samples[i]) * b.samples[i];
    return s * a.grid.dx;
}

// residual norm of the exact basis solution under the discrete generator
double basis_residual(const WallTrajectory& traj, std::size_t n, double t,
                      std::size_t n_points) {
    const Grid g = Grid::transformed(traj.L0, n_points);
    const WaveField psi = basis_tilde({n, Parity::Even}, traj, t, g, kP);
    const WaveField h = transformed_rhs(psi, traj, t, kP, 4);
    const double L = wall_length(traj, t);
    const double j = 2.0 * static_cast<double>(n) + 1.0;
    const double alpha_dot =
        kP.m * traj.q * traj.q / (2.0 * kP.hbar * traj.L0 * traj.L0);
    const double beta_dot = kP.hbar * M_PI * M_PI * j * j / (2.0 * kP.m * L * L);
    WaveField res(g, t);
    for (std::size_t i = 0; i < g.n(); ++i)
        res.samples[i] = h.samples[i] - kP.hbar * (beta_dot - alpha_dot * g.x[i] * g.x[i]) *
                                            psi.samples[i];
    return norm_l2(res);
}

}  // namespace

TEST_SUITE("numeric") {

TEST_CASE("static generator reproduces eigenvalues") {
    const auto sta = WallTrajectory::make_static(100.0);
    const Grid g = Grid::transformed(100.0, 2048);
    for (std::size_t n : {0ul, 3ul}) {
        const WaveField phi = eigenstate({n, Parity::Even}, 100.0, g);
        const WaveField h = transformed_rhs(phi, sta, 0.0, kP, 4);
        const double E = eigenvalue({n, Parity::Even}, 100.0, kP);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.n(); ++i)
            worst = std::max(worst, std::abs(h.samples[i] - E * phi.samples[i]));
        CHECK(worst < 1e-11);
    }
}

TEST_CASE("dilation discretization is exactly antisymmetric") {
    // <a|(yP+Py)b> = <(yP+Py)a|b> in the propagator's discrete pairing;
    // (yP+Py) = -2 i hbar (y d/dy + 1/2), extracted as H - kinetic at gamma-only
    const auto traj = WallTrajectory::linear(100.0, 1.0);   // gamma = 1/L at t=0
    const Grid g = Grid::transformed(100.0, 1024);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    WaveField a(g, 0.0), b(g, 0.0);
    for (std::size_t i = 1; i + 1 < g.n(); ++i) {
        a.samples[i] = cplx(nd(rng), nd(rng));
        b.samples[i] = cplx(nd(rng), nd(rng));
    }
    const auto sta = WallTrajectory::make_static(100.0);
    auto dil_only = [&](const WaveField& f) {
        WaveField moving = transformed_rhs(f, traj, 0.0, kP, 4);
        WaveField kin = transformed_rhs(f, sta, 0.0, kP, 4);
        WaveField out(f.grid, 0.0);
        const double gamma = 1.0 / 100.0;
        for (std::size_t i = 0; i < f.n(); ++i)
            out.samples[i] = (moving.samples[i] - kin.samples[i]) *
                             (-2.0 / gamma);   // = (yP+Py) f
        return out;
    };
    const WaveField da = dil_only(a), db = dil_only(b);
    const cplx lhs = dot(a, db), rhs = dot(da, b);
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(lhs)));
}

TEST_CASE("residual anchor at acceptance scale") {
    const auto traj = WallTrajectory::linear(100.0, 1e-4);
    CHECK(basis_residual(traj, 0, 500.0, 4096) < 1e-8);
}

TEST_CASE("residual falls as the 4th power of the spacing") {
    const auto sta = WallTrajectory::linear(100.0, 0.0);
    const double r512 = basis_residual(sta, 10, 100.0, 513);
    const double r1024 = basis_residual(sta, 10, 100.0, 1025);
    const double r2048 = basis_residual(sta, 10, 100.0, 2049);
    CHECK(r512 / r1024 == doctest::Approx(16.0).epsilon(0.2));
    CHECK(r1024 / r2048 == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("stationary state keeps its phase") {
    const auto sta = WallTrajectory::make_static(100.0);
    const Grid g = Grid::transformed(100.0, 513);
    const WaveField phi = eigenstate({1, Parity::Even}, 100.0, g);
    PropagatorConfig cfg;
    cfg.n_points = 513;
    const double t = 10.0;
    PropagationStats stats;
    const WaveField out = propagate_numeric(phi, sta, 0.0, t, cfg, kP, &stats);
    WaveField ref = phi;
    ref.t = out.t;
    const cplx overlap = inner_product(ref, out);
    CHECK(std::abs(std::abs(overlap) - 1.0) < 1e-8);
    const double E = eigenvalue({1, Parity::Even}, 100.0, kP);
    const double phase_err = std::abs(std::arg(overlap) - (-E * t));
    CHECK(phase_err < 1e-6);
    CHECK(stats.norm_drift < 1e-10);
}

TEST_CASE("moving-wall propagation matches the exact basis solution (short span)") {
    const auto traj = WallTrajectory::linear(100.0, 1e-4);
    const Grid g = Grid::transformed(100.0, 1025);
    const WaveField psi0 = basis_tilde({0, Parity::Even}, traj, 0.0, g, kP);
    PropagatorConfig cfg;
    cfg.n_points = 1025;
    PropagationStats stats;
    const WaveField out = propagate_numeric(psi0, traj, 0.0, 10.0, cfg, kP, &stats);
    const WaveField ref = basis_tilde({0, Parity::Even}, traj, 10.0, g, kP);
    CHECK(linf_diff(out, ref) < 1e-8);
    CHECK(stats.norm_drift < 1e-10);
}

TEST_CASE("second-order convergence in the time step") {
    const auto traj = WallTrajectory::linear(100.0, 1e-4);
    const Grid g = Grid::transformed(100.0, 1025);
    const WaveField psi0 = gaussian_initial(GaussianParams{0.5}, g);
    auto run = [&](double dt) {
        PropagatorConfig cfg;
        cfg.n_points = 1025;
        cfg.dt = dt;
        return propagate_numeric(psi0, traj, 0.0, 5.0, cfg, kP);
    };
    const WaveField a = run(1.6e-3), b = run(8e-4), c = run(4e-4);
    const double d12 = linf_diff(a, b), d23 = linf_diff(b, c);
    CHECK(d12 / d23 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("dilation maps: identity, unitarity, round trip, interpolation") {
    const auto traj = WallTrajectory::linear(100.0, 1e-4);
    const Grid g = Grid::transformed(100.0, 2049);

    // t = 0 is the identity
    const WaveField f0 = basis_tilde({1, Parity::Even}, traj, 0.0, g, kP);
    const WaveField p0 = to_physical(f0, traj, 0.0, Grid::physical(100.0, 0.0, 2049));
    CHECK(linf_diff(f0, p0) < 1e-15);

    // aligned round trip on a random smooth normalized field
    std::mt19937_64 rng(17);
    std::normal_distribution<double> nd;
    WaveField r(g, 0.0);
    for (std::size_t n = 0; n < 12; ++n) {
        const WaveField e = eigenstate({n, n % 2 ? Parity::Odd : Parity::Even}, 100.0, g);
        const cplx w(nd(rng), nd(rng));
        for (std::size_t i = 0; i < g.n(); ++i) r.samples[i] += w * e.samples[i];
    }
    const double nr = norm_l2(r);
    for (auto& s : r.samples) s /= nr;
    const double t = 4321.0;
    const double L = wall_length(traj, t);
    const WaveField ph = to_physical(r, traj, t, Grid::physical(L, t, 2049));
    CHECK(std::abs(norm_l2(ph) - norm_l2(r)) < 1e-10);
    const WaveField back = to_transformed(ph, traj, t);
    CHECK(linf_diff(back, r) < 1e-12);

    // interpolating path agrees with the direct physical solution
    const Grid phys_other = Grid::physical(L, t, 1537);
    const WaveField tilde = basis_tilde({4, Parity::Even}, traj, t, g, kP);
    const WaveField interp = to_physical(tilde, traj, t, phys_other);
    const WaveField direct = basis_physical({4, Parity::Even}, traj, t, phys_other, kP);
    CHECK(linf_diff(interp, direct) < 1e-8);

    CHECK_THROWS_AS(to_physical(r, traj, t, Grid::physical(2.0 * L, t, 2049)),
                    std::invalid_argument);
}

TEST_CASE("config guards") {
    const auto traj = WallTrajectory::linear(100.0, 1e-4);
    const Grid g = Grid::transformed(100.0, 1025);
    const WaveField psi0 = basis_tilde({0, Parity::Even}, traj, 0.0, g, kP);
    PropagatorConfig cfg;
    cfg.n_points = 1025;
    cfg.dt = 1.0;   // far beyond the CFL sanity rule at this resolution
    CHECK_THROWS_AS(propagate_numeric(psi0, traj, 0.0, 1.0, cfg, kP), std::invalid_argument);
    cfg.dt = 0.0;
    cfg.spatial_order = 3;
    CHECK_THROWS_AS(propagate_numeric(psi0, traj, 0.0, 1.0, cfg, kP), std::invalid_argument);
}

TEST_CASE("smooth turn-on and reversal trajectories propagate cleanly") {
    const auto sm = WallTrajectory::smooth_turn_on(100.0, 1e-4, 1e3);
    const Grid g = Grid::transformed(100.0, 1025);
    WaveField sup(g, 0.0);
    const WaveField p1 = eigenstate({1, Parity::Even}, 100.0, g);
    const WaveField p10 = eigenstate({10, Parity::Even}, 100.0, g);
    for (std::size_t i = 0; i < g.n(); ++i)
        sup.samples[i] = (p10.samples[i] - p1.samples[i]) / std::sqrt(2.0);

    PropagatorConfig cfg;
    cfg.n_points = 1025;
    PropagationStats stats;
    std::vector<double> obs = {0.05};
    propagate_numeric(sup, sm, 0.0, 0.1, cfg, kP, &stats, &obs);
    CHECK(stats.norm_drift < 1e-9);
    CHECK(stats.continuity_residual < 1e-5);

    // across the reversal kink
    const auto rev = WallTrajectory::piecewise_reversal(100.0, 1e-3, 20.0);
    PropagationStats rs;
    propagate_numeric(sup, rev, 9.0, 11.0, cfg, kP, &rs);
    CHECK(rs.norm_drift < 1e-9);
}

}  // TEST_SUITE
