#include "boxdyn/model.hpp"

#include <cmath>
#include <stdexcept>

namespace boxdyn {

void PhysicalParams::validate() const {
    if (!(m > 0.0) || !(hbar > 0.0) || !(c > 0.0))
        throw std::invalid_argument("PhysicalParams: m, hbar, c must be positive");
}

WallTrajectory WallTrajectory::make_static(double L0) {
    WallTrajectory t; t.kind = TrajectoryKind::Static; t.L0 = L0; t.validate(); return t;
}
WallTrajectory WallTrajectory::linear(double L0, double q) {
    WallTrajectory t; t.kind = TrajectoryKind::Linear; t.L0 = L0; t.q = q; t.validate(); return t;
}
WallTrajectory WallTrajectory::smooth_turn_on(double L0, double q, double beta) {
    WallTrajectory t; t.kind = TrajectoryKind::SmoothTurnOn; t.L0 = L0; t.q = q; t.beta = beta;
    t.validate(); return t;
}
WallTrajectory WallTrajectory::piecewise_reversal(double L0, double q, double T) {
    WallTrajectory t; t.kind = TrajectoryKind::PiecewiseReversal; t.L0 = L0; t.q = q; t.T = T;
    t.validate(); return t;
}

void WallTrajectory::validate() const {
    if (!(L0 > 0.0)) throw std::invalid_argument("WallTrajectory: L0 must be positive");
    if (kind == TrajectoryKind::SmoothTurnOn && !(beta > 0.0))
        throw std::invalid_argument("WallTrajectory: beta must be positive for SmoothTurnOn");
    if (kind == TrajectoryKind::PiecewiseReversal && !(T > 0.0))
        throw std::invalid_argument("WallTrajectory: T must be positive for PiecewiseReversal");
}

double wall_length(const WallTrajectory& traj, double t) {
    if (t < 0.0) throw std::invalid_argument("wall_length: t must be >= 0");
    double L = 0.0;
    switch (traj.kind) {
        case TrajectoryKind::Static: L = traj.L0; break;
        case TrajectoryKind::Linear: L = traj.L0 + traj.q * t; break;
        case TrajectoryKind::SmoothTurnOn:
            L = traj.L0 + traj.q * t * (1.0 - std::exp(-traj.beta * t));
            break;
        case TrajectoryKind::PiecewiseReversal:
            L = (t <= 0.5 * traj.T) ? traj.L0 + traj.q * t : traj.L0 + traj.q * (traj.T - t);
            break;
    }
    if (!(L > 0.0)) throw std::domain_error("wall_length: L(t) <= 0 (wall collapse)");
    return L;
}

double wall_velocity_left(const WallTrajectory& traj, double t) {
    switch (traj.kind) {
        case TrajectoryKind::Static: return 0.0;
        case TrajectoryKind::Linear: return traj.q;
        case TrajectoryKind::SmoothTurnOn: {
            const double e = std::exp(-traj.beta * t);
            return traj.q * (1.0 - e) + traj.q * traj.beta * t * e;
        }
        case TrajectoryKind::PiecewiseReversal:
            return (t <= 0.5 * traj.T) ? traj.q : -traj.q;
    }
    return 0.0;
}

double wall_velocity_right(const WallTrajectory& traj, double t) {
    if (traj.kind == TrajectoryKind::PiecewiseReversal)
        return (t < 0.5 * traj.T) ? traj.q : -traj.q;
    return wall_velocity_left(traj, t);
}

double wall_velocity(const WallTrajectory& traj, double t) {
    if (t < 0.0) throw std::invalid_argument("wall_velocity: t must be >= 0");
    if (traj.kind == TrajectoryKind::PiecewiseReversal && t == 0.5 * traj.T)
        throw std::invalid_argument("wall_velocity: undefined at the reversal kink t = T/2; "
                                    "use the one-sided variants");
    return wall_velocity_left(traj, t);
}

namespace {

// closed form of \int_0^t dt'/(a + q t')^2 on a branch without sign change
double linear_phase_piece(double a, double q, double t) {
    // equals t / (a (a + q t)) for every q including q = 0
    return t / (a * (a + q * t));
}

struct AdaptiveState {
    const std::function<double(double)>* f;
    double rel_tol;
    double worst = 0.0;
    int depth_limit = 48;
};

double adapt(AdaptiveState& st, double a, double b, double fa, double fm, double fb,
             double whole, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = (*st.f)(lm), frm = (*st.f)(rm);
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    const double scale = std::max(std::abs(left + right), 1e-300);
    if (depth >= st.depth_limit || std::abs(delta) <= 15.0 * st.rel_tol * scale) {
        if (depth >= st.depth_limit)
            st.worst = std::max(st.worst, std::abs(delta) / scale);
        return left + right + delta / 15.0;
    }
    return adapt(st, a, m, fa, flm, fm, left, depth + 1) +
           adapt(st, m, b, fm, frm, fb, right, depth + 1);
}

}  // namespace

double adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                           double rel_tol, double* achieved) {
    if (a == b) { if (achieved) *achieved = 0.0; return 0.0; }
    AdaptiveState st{&f, rel_tol};
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double result = adapt(st, a, b, fa, fm, fb, whole, 0);
    if (achieved) *achieved = std::max(st.worst, rel_tol);
    if (st.worst > rel_tol * 16.0)
        throw std::runtime_error("adaptive_quadrature: tolerance " + std::to_string(rel_tol) +
                                 " not reached; achieved " + std::to_string(st.worst));
    return result;
}

double phase_integral(const WallTrajectory& traj, double t) {
    if (t < 0.0) throw std::invalid_argument("phase_integral: t must be >= 0");
    if (t == 0.0) return 0.0;
    switch (traj.kind) {
        case TrajectoryKind::Static:
            return t / (traj.L0 * traj.L0);
        case TrajectoryKind::Linear:
            wall_length(traj, t);  // rejects collapsed walls
            return linear_phase_piece(traj.L0, traj.q, t);
        case TrajectoryKind::PiecewiseReversal: {
            const double h = 0.5 * traj.T;
            if (t <= h) return linear_phase_piece(traj.L0, traj.q, t);
            wall_length(traj, t);
            const double Lh = traj.L0 + traj.q * h;
            return linear_phase_piece(traj.L0, traj.q, h) +
                   linear_phase_piece(Lh, -traj.q, t - h);
        }
        case TrajectoryKind::SmoothTurnOn: {
            auto f = [&traj](double s) {
                const double L = traj.L0 + traj.q * s * (1.0 - std::exp(-traj.beta * s));
                return 1.0 / (L * L);
            };
            return adaptive_quadrature(f, 0.0, t, 1e-12);
        }
    }
    return 0.0;
}

Grid Grid::transformed(double L0, std::size_t n_points) {
    if (n_points < 3) throw std::invalid_argument("Grid: n_points must be >= 3");
    Grid g;
    g.tag = DomainTag::Transformed;
    g.t = 0.0;
    g.x.resize(n_points);
    g.dx = L0 / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i)
        g.x[i] = -0.5 * L0 + static_cast<double>(i) * g.dx;
    g.x.front() = -0.5 * L0;
    g.x.back() = 0.5 * L0;
    return g;
}

Grid Grid::physical(double L, double t, std::size_t n_points) {
    Grid g = transformed(L, n_points);
    g.tag = DomainTag::Physical;
    g.t = t;
    return g;
}

bool Grid::same_as(const Grid& other) const {
    return tag == other.tag && n() == other.n() && x.front() == other.x.front() &&
           x.back() == other.x.back();
}

WaveField eigenstate(const BasisIndex& idx, double L, const Grid& grid) {
    if (!(L > 0.0)) throw std::invalid_argument("eigenstate: L must be positive");
    if (std::abs(grid.width() - L) > 1e-12 * L)
        throw std::invalid_argument("eigenstate: grid does not span [-L/2, L/2]");
    WaveField f(grid, grid.t);
    const double amp = std::sqrt(2.0 / L);
    if (idx.parity == Parity::Even) {
        const double k = (2.0 * static_cast<double>(idx.n) + 1.0) * M_PI / L;
        for (std::size_t i = 0; i < grid.n(); ++i)
            f.samples[i] = amp * std::cos(k * grid.x[i]);
    } else {
        const double k = 2.0 * (static_cast<double>(idx.n) + 1.0) * M_PI / L;
        for (std::size_t i = 0; i < grid.n(); ++i)
            f.samples[i] = amp * std::sin(k * grid.x[i]);
    }
    f.enforce_dirichlet();
    return f;
}

double eigenvalue(const BasisIndex& idx, double L, const PhysicalParams& params) {
    if (!(L > 0.0)) throw std::invalid_argument("eigenvalue: L must be positive");
    const double j = (idx.parity == Parity::Even)
                         ? 2.0 * static_cast<double>(idx.n) + 1.0
                         : 2.0 * (static_cast<double>(idx.n) + 1.0);
    return j * j * params.hbar * params.hbar * M_PI * M_PI / (2.0 * params.m * L * L);
}

std::vector<double> simpson_weights(std::size_t n, double dx) {
    if (n < 3) throw std::invalid_argument("simpson_weights: need n >= 3");
    std::vector<double> w(n, 0.0);
    const std::size_t intervals = n - 1;
    std::size_t simpson_end = intervals;   // index of the last point covered by plain Simpson
    const bool odd = (intervals % 2 != 0);
    if (odd) simpson_end = intervals - 3;  // leave 3 intervals for the 3/8 rule
    if (simpson_end >= 2) {
        w[0] += dx / 3.0;
        w[simpson_end] += dx / 3.0;
        for (std::size_t i = 1; i < simpson_end; ++i)
            w[i] += (i % 2 == 1) ? 4.0 * dx / 3.0 : 2.0 * dx / 3.0;
    }
    if (odd) {
        const double c = 3.0 * dx / 8.0;
        w[simpson_end] += c;
        w[simpson_end + 1] += 3.0 * c;
        w[simpson_end + 2] += 3.0 * c;
        w[simpson_end + 3] += c;
    }
    return w;
}

std::vector<double> trapezoid_weights(std::size_t n, double dx) {
    std::vector<double> w(n, dx);
    w.front() = 0.5 * dx;
    w.back() = 0.5 * dx;
    return w;
}

cplx inner_product(const WaveField& a, const WaveField& b) {
    if (!a.grid.same_as(b.grid))
        throw std::invalid_argument("inner_product: grid mismatch");
    if (a.t != b.t)
        throw std::invalid_argument("inner_product: time-stamp mismatch");
    const auto w = simpson_weights(a.n(), a.grid.dx);
    cplx acc(0.0);
    for (std::size_t i = 0; i < a.n(); ++i)
        acc += w[i] * std::conj(a.samples[i]) * b.samples[i];
    return acc;
}

double norm_l2(const WaveField& a) {
    const auto w = simpson_weights(a.n(), a.grid.dx);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.n(); ++i) acc += w[i] * std::norm(a.samples[i]);
    return std::sqrt(acc);
}

double norm_l2_trapezoid(const WaveField& a) {
    const auto w = trapezoid_weights(a.n(), a.grid.dx);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.n(); ++i) acc += w[i] * std::norm(a.samples[i]);
    return std::sqrt(acc);
}

}  // namespace boxdyn
