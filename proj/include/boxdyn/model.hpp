#ifndef BOXDYN_MODEL_HPP
#define BOXDYN_MODEL_HPP

// Shared domain model: physical parameters, wall-trajectory laws, grids,
// the static box eigenbasis and quadrature-based inner products.
// All quantities are in atomic units (hbar = 1 unless overridden).

#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace boxdyn {

using cplx = std::complex<double>;

struct PhysicalParams {
    double m = 1.0;
    double hbar = 1.0;
    double c = 137.035999;   // signal speed, used only for light-cone bookkeeping

    void validate() const;
};

enum class TrajectoryKind { Static, Linear, SmoothTurnOn, PiecewiseReversal };

// Boundary law L(t).  Static: L0.  Linear: L0 + q t.
// SmoothTurnOn: L0 + q t (1 - e^{-beta t}).
// PiecewiseReversal: L0 + q t for t <= T/2, L0 + q (T - t) afterwards.
struct WallTrajectory {
    TrajectoryKind kind = TrajectoryKind::Static;
    double L0 = 100.0;
    double q = 0.0;
    double beta = 0.0;   // SmoothTurnOn only
    double T = 0.0;      // PiecewiseReversal only

    static WallTrajectory make_static(double L0);
    static WallTrajectory linear(double L0, double q);
    static WallTrajectory smooth_turn_on(double L0, double q, double beta);
    static WallTrajectory piecewise_reversal(double L0, double q, double T);

    void validate() const;
    bool is_linear_family() const {
        return kind == TrajectoryKind::Static || kind == TrajectoryKind::Linear;
    }
};

double wall_length(const WallTrajectory& traj, double t);
double wall_velocity(const WallTrajectory& traj, double t);

// One-sided wall velocities for the reversal kink at t = T/2.
double wall_velocity_left(const WallTrajectory& traj, double t);
double wall_velocity_right(const WallTrajectory& traj, double t);

// \int_0^t L(t')^{-2} dt'.  Closed form for Static/Linear/PiecewiseReversal,
// adaptive quadrature (rel. tol 1e-12) for SmoothTurnOn.
double phase_integral(const WallTrajectory& traj, double t);

enum class DomainTag { Transformed, Physical };

// Uniform grid on [-W/2, W/2], endpoints included and exactly +-W/2.
struct Grid {
    std::vector<double> x;
    double dx = 0.0;
    DomainTag tag = DomainTag::Transformed;
    double t = 0.0;   // time stamp for Physical grids

    static Grid transformed(double L0, std::size_t n_points);
    static Grid physical(double L, double t, std::size_t n_points);

    std::size_t n() const { return x.size(); }
    double width() const { return x.back() - x.front(); }
    bool same_as(const Grid& other) const;
};

struct WaveField {
    Grid grid;
    std::vector<cplx> samples;
    double t = 0.0;

    WaveField() = default;
    WaveField(Grid g, double time) : grid(std::move(g)), samples(grid.n(), cplx(0.0)), t(time) {}

    std::size_t n() const { return samples.size(); }
    void enforce_dirichlet() {
        if (!samples.empty()) { samples.front() = 0.0; samples.back() = 0.0; }
    }
};

enum class Parity { Even, Odd };

struct BasisIndex {
    std::size_t n = 0;
    Parity parity = Parity::Even;
};

// Instantaneous eigenstate of the fixed-width box, sampled on `grid`.
// Even: sqrt(2/L) cos((2n+1) pi x / L);  Odd: sqrt(2/L) sin(2(n+1) pi x / L).
WaveField eigenstate(const BasisIndex& idx, double L, const Grid& grid);

double eigenvalue(const BasisIndex& idx, double L, const PhysicalParams& params);

// Composite-Simpson quadrature weights (3/8 rule on the last segment when the
// interval count is odd).  Simpson is the fixed rule for all inner products;
// the trapezoid variant exists for diagnostics only.
std::vector<double> simpson_weights(std::size_t n, double dx);
std::vector<double> trapezoid_weights(std::size_t n, double dx);

// \int conj(a) b dx over the common grid (Simpson).
cplx inner_product(const WaveField& a, const WaveField& b);

double norm_l2(const WaveField& a);            // Simpson
double norm_l2_trapezoid(const WaveField& a);  // diagnostics

// Generic adaptive Simpson quadrature, relative tolerance `rel_tol`.
// Reports the achieved tolerance through `achieved` when non-null.
double adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                           double rel_tol, double* achieved = nullptr);

}  // namespace boxdyn

#endif
