#include "boxdyn/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace boxdyn {

namespace {

// ---- spatial stencils ----------------------------------------------------
//
// Kinetic matrix (symmetric):  -(hbar^2 s^2 / 2m) d2/dy2 with
//   order 2: (-1, 2, -1)/dy^2
//   order 4: (1, -16, 30, -16, 1)/(12 dy^2); the rows next to the walls use
//            the odd-extension ghost psi_{-1} = -psi_1, which only modifies
//            the diagonal (30 -> 29) and keeps the matrix symmetric.
// Dilation matrix (antisymmetric): (Y D1 + D1 Y)/2 built from the
// antisymmetric central first-derivative D1; out-of-range couplings are
// dropped, which preserves exact antisymmetry.

struct Stencil {
    int order = 4;
    double dy = 0.0;
    std::vector<double> y;        // interior points
    std::vector<double> kdiag;    // kinetic diagonal pattern (unit coefficient)
    std::vector<double> g1, g2;   // dilation upper-band geometry factors

    static Stencil build(const Grid& grid, int order) {
        Stencil s;
        s.order = order;
        s.dy = grid.dx;
        const std::size_t m = grid.n() - 2;
        s.y.assign(grid.x.begin() + 1, grid.x.end() - 1);
        s.kdiag.resize(m);
        s.g1.assign(m, 0.0);
        s.g2.assign(m, 0.0);
        if (order == 4) {
            for (std::size_t i = 0; i < m; ++i)
                s.kdiag[i] = (i == 0 || i == m - 1) ? 29.0 : 30.0;
            for (std::size_t i = 0; i + 1 < m; ++i)
                s.g1[i] = (s.y[i] + s.y[i + 1]) * 0.5 * (2.0 / (3.0 * s.dy));
            for (std::size_t i = 0; i + 2 < m; ++i)
                s.g2[i] = -(s.y[i] + s.y[i + 2]) * 0.5 / (12.0 * s.dy);
        } else {
            for (std::size_t i = 0; i < m; ++i) s.kdiag[i] = 2.0;
            for (std::size_t i = 0; i + 1 < m; ++i)
                s.g1[i] = (s.y[i] + s.y[i + 1]) * 0.5 / (2.0 * s.dy);
        }
        return s;
    }

    // kinetic unit scale so that K = kin_scale(s2) * pattern
    double kin_scale(const PhysicalParams& p, double s2) const {
        const double base = p.hbar * p.hbar * s2 / (2.0 * p.m);
        return (order == 4) ? base / (12.0 * dy * dy) : base / (dy * dy);
    }
    double koff1() const { return (order == 4) ? -16.0 : -1.0; }
    double koff2() const { return (order == 4) ? 1.0 : 0.0; }
};

void require_transformed(const WaveField& f, const char* who) {
    if (f.grid.tag != DomainTag::Transformed)
        throw std::invalid_argument(std::string(who) + ": transformed-grid field required");
}

// ---- Cayley step ----------------------------------------------------------
// Solves (I + i theta H) psi^+ = (I - i theta H) psi with H evaluated from
// per-step scalars kappa (kinetic unit) and bgam = theta*hbar*gamma.
// Split real/imaginary pentadiagonal (order 4) or tridiagonal (order 2)
// elimination without pivoting; the matrix is strongly diagonally dominant
// under the CFL-rule time steps.
struct StepWorkspace {
    std::vector<double> pr, pi, rr, ri;
    std::vector<double> ddr, ddi, u1r, u1i, u2r, u2i, ivr, ivi;

    void resize(std::size_t m) {
        for (auto* v : {&pr, &pi, &rr, &ri, &ddr, &ddi, &u1r, &u1i, &u2r, &u2i, &ivr, &ivi})
            v->assign(m, 0.0);
    }
};

void cayley_step(const Stencil& st, StepWorkspace& w, double A, double m16, double A2,
                 double B) {
    // matrix entries at row i:
    //   diag   = 1 + i A kdiag[i]
    //   upper1 = -B g1[i]   + i m16      upper2 = -B g2[i]   + i A2
    //   lower1 = +B g1[i-1] + i m16      lower2 = +B g2[i-2] + i A2
    const std::size_t m = st.y.size();
    auto& pr = w.pr; auto& pi = w.pi; auto& rr = w.rr; auto& ri = w.ri;

    // rhs = 2 psi - M+ psi
    for (std::size_t i = 0; i < m; ++i) {
        const double kd = A * st.kdiag[i];
        double ar = pr[i] - kd * pi[i];
        double ai = pi[i] + kd * pr[i];
        if (i >= 1) {
            const double br = B * st.g1[i - 1];
            ar += br * pr[i - 1] - m16 * pi[i - 1];
            ai += br * pi[i - 1] + m16 * pr[i - 1];
        }
        if (i >= 2 && st.order == 4) {
            const double br = B * st.g2[i - 2];
            ar += br * pr[i - 2] - A2 * pi[i - 2];
            ai += br * pi[i - 2] + A2 * pr[i - 2];
        }
        if (i + 1 < m) {
            const double br = -B * st.g1[i];
            ar += br * pr[i + 1] - m16 * pi[i + 1];
            ai += br * pi[i + 1] + m16 * pr[i + 1];
        }
        if (i + 2 < m && st.order == 4) {
            const double br = -B * st.g2[i];
            ar += br * pr[i + 2] - A2 * pi[i + 2];
            ai += br * pi[i + 2] + A2 * pr[i + 2];
        }
        rr[i] = 2.0 * pr[i] - ar;
        ri[i] = 2.0 * pi[i] - ai;
    }

    auto recip = [](double dr, double di, double& orr, double& oii) {
        const double s = 1.0 / (dr * dr + di * di);
        orr = dr * s; oii = -di * s;
    };

    if (st.order == 2) {
        // tridiagonal elimination
        w.ddr[0] = 1.0; w.ddi[0] = A * st.kdiag[0];
        w.u1r[0] = -B * st.g1[0]; w.u1i[0] = m16;
        recip(w.ddr[0], w.ddi[0], w.ivr[0], w.ivi[0]);
        for (std::size_t i = 1; i < m; ++i) {
            const double a1r = B * st.g1[i - 1], a1i = m16;
            const double wr = a1r * w.ivr[i - 1] - a1i * w.ivi[i - 1];
            const double wi = a1r * w.ivi[i - 1] + a1i * w.ivr[i - 1];
            w.ddr[i] = 1.0 - (wr * w.u1r[i - 1] - wi * w.u1i[i - 1]);
            w.ddi[i] = A * st.kdiag[i] - (wr * w.u1i[i - 1] + wi * w.u1r[i - 1]);
            w.u1r[i] = (i + 1 < m) ? -B * st.g1[i] : 0.0;
            w.u1i[i] = (i + 1 < m) ? m16 : 0.0;
            rr[i] -= wr * rr[i - 1] - wi * ri[i - 1];
            ri[i] -= wr * ri[i - 1] + wi * rr[i - 1];
            recip(w.ddr[i], w.ddi[i], w.ivr[i], w.ivi[i]);
        }
        {
            const std::size_t i = m - 1;
            pr[i] = rr[i] * w.ivr[i] - ri[i] * w.ivi[i];
            pi[i] = rr[i] * w.ivi[i] + ri[i] * w.ivr[i];
        }
        for (std::size_t k = m - 1; k-- > 0;) {
            const double xr = rr[k] - (w.u1r[k] * pr[k + 1] - w.u1i[k] * pi[k + 1]);
            const double xi = ri[k] - (w.u1r[k] * pi[k + 1] + w.u1i[k] * pr[k + 1]);
            pr[k] = xr * w.ivr[k] - xi * w.ivi[k];
            pi[k] = xr * w.ivi[k] + xi * w.ivr[k];
        }
        return;
    }

    // pentadiagonal elimination
    w.ddr[0] = 1.0; w.ddi[0] = A * st.kdiag[0];
    w.u1r[0] = -B * st.g1[0]; w.u1i[0] = m16;
    w.u2r[0] = -B * st.g2[0]; w.u2i[0] = A2;
    recip(w.ddr[0], w.ddi[0], w.ivr[0], w.ivi[0]);
    {
        const double a1r = B * st.g1[0], a1i = m16;
        const double wr = a1r * w.ivr[0] - a1i * w.ivi[0];
        const double wi = a1r * w.ivi[0] + a1i * w.ivr[0];
        w.ddr[1] = 1.0 - (wr * w.u1r[0] - wi * w.u1i[0]);
        w.ddi[1] = A * st.kdiag[1] - (wr * w.u1i[0] + wi * w.u1r[0]);
        w.u1r[1] = -B * st.g1[1] - (wr * w.u2r[0] - wi * w.u2i[0]);
        w.u1i[1] = m16 - (wr * w.u2i[0] + wi * w.u2r[0]);
        w.u2r[1] = -B * st.g2[1]; w.u2i[1] = A2;
        rr[1] -= wr * rr[0] - wi * ri[0];
        ri[1] -= wr * ri[0] + wi * rr[0];
        recip(w.ddr[1], w.ddi[1], w.ivr[1], w.ivi[1]);
    }
    for (std::size_t i = 2; i < m; ++i) {
        const double a2r = B * st.g2[i - 2], a2i = A2;
        const double w2r = a2r * w.ivr[i - 2] - a2i * w.ivi[i - 2];
        const double w2i = a2r * w.ivi[i - 2] + a2i * w.ivr[i - 2];
        const double t1r = B * st.g1[i - 1] - (w2r * w.u1r[i - 2] - w2i * w.u1i[i - 2]);
        const double t1i = m16 - (w2r * w.u1i[i - 2] + w2i * w.u1r[i - 2]);
        const double w1r = t1r * w.ivr[i - 1] - t1i * w.ivi[i - 1];
        const double w1i = t1r * w.ivi[i - 1] + t1i * w.ivr[i - 1];
        w.ddr[i] = 1.0 - (w2r * w.u2r[i - 2] - w2i * w.u2i[i - 2]) -
                   (w1r * w.u1r[i - 1] - w1i * w.u1i[i - 1]);
        w.ddi[i] = A * st.kdiag[i] - (w2r * w.u2i[i - 2] + w2i * w.u2r[i - 2]) -
                   (w1r * w.u1i[i - 1] + w1i * w.u1r[i - 1]);
        const bool has1 = (i + 1 < m), has2 = (i + 2 < m);
        w.u1r[i] = (has1 ? -B * st.g1[i] : 0.0) - (w1r * w.u2r[i - 1] - w1i * w.u2i[i - 1]);
        w.u1i[i] = (has1 ? m16 : 0.0) - (w1r * w.u2i[i - 1] + w1i * w.u2r[i - 1]);
        w.u2r[i] = has2 ? -B * st.g2[i] : 0.0;
        w.u2i[i] = has2 ? A2 : 0.0;
        rr[i] -= (w2r * rr[i - 2] - w2i * ri[i - 2]) + (w1r * rr[i - 1] - w1i * ri[i - 1]);
        ri[i] -= (w2r * ri[i - 2] + w2i * rr[i - 2]) + (w1r * ri[i - 1] + w1i * rr[i - 1]);
        recip(w.ddr[i], w.ddi[i], w.ivr[i], w.ivi[i]);
    }
    {
        const std::size_t i = m - 1;
        pr[i] = rr[i] * w.ivr[i] - ri[i] * w.ivi[i];
        pi[i] = rr[i] * w.ivi[i] + ri[i] * w.ivr[i];
    }
    {
        const std::size_t i = m - 2;
        const double xr = rr[i] - (w.u1r[i] * pr[i + 1] - w.u1i[i] * pi[i + 1]);
        const double xi = ri[i] - (w.u1r[i] * pi[i + 1] + w.u1i[i] * pr[i + 1]);
        pr[i] = xr * w.ivr[i] - xi * w.ivi[i];
        pi[i] = xr * w.ivi[i] + xi * w.ivr[i];
    }
    for (std::size_t k = m - 2; k-- > 0;) {
        const double xr = rr[k] - (w.u1r[k] * pr[k + 1] - w.u1i[k] * pi[k + 1]) -
                          (w.u2r[k] * pr[k + 2] - w.u2i[k] * pi[k + 2]);
        const double xi = ri[k] - (w.u1r[k] * pi[k + 1] + w.u1i[k] * pr[k + 1]) -
                          (w.u2r[k] * pi[k + 2] + w.u2i[k] * pr[k + 2]);
        pr[k] = xr * w.ivr[k] - xi * w.ivi[k];
        pi[k] = xr * w.ivi[k] + xi * w.ivr[k];
    }
}

// 4th-order first derivative with one-sided closures, full grid
std::vector<double> derivative4(const std::vector<double>& f, double dx) {
    const std::size_t n = f.size();
    std::vector<double> d(n, 0.0);
    if (n < 5) throw std::invalid_argument("derivative4: need at least 5 points");
    const double c = 1.0 / (12.0 * dx);
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * c;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * c;
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * c;
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * c;
    d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] +
                3.0 * f[n - 5]) * c;
    return d;
}

std::vector<cplx> derivative4c(const std::vector<cplx>& f, double dx) {
    const std::size_t n = f.size();
    std::vector<double> re(n), im(n);
    for (std::size_t i = 0; i < n; ++i) { re[i] = f[i].real(); im[i] = f[i].imag(); }
    const auto dre = derivative4(re, dx);
    const auto dim = derivative4(im, dx);
    std::vector<cplx> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = cplx(dre[i], dim[i]);
    return d;
}

}  // namespace

void PropagatorConfig::validate() const {
    if (n_points < 8) throw std::invalid_argument("PropagatorConfig: n_points too small");
    if (spatial_order != 2 && spatial_order != 4)
        throw std::invalid_argument("PropagatorConfig: spatial_order must be 2 or 4");
}

double grid_kinetic_max(const PhysicalParams& params, double L0, double L,
                        std::size_t n_points, int spatial_order) {
    const double dy = L0 / static_cast<double>(n_points - 1);
    const double s2 = (L0 / L) * (L0 / L);
    const double base = params.hbar * params.hbar * s2 / (2.0 * params.m * dy * dy);
    return (spatial_order == 4) ? base * 16.0 / 3.0 : base * 4.0;
}

double cfl_timestep(const PropagatorConfig& cfg, const PhysicalParams& params,
                    const WallTrajectory& traj, double t0, double t1) {
    // E_max is largest where L is smallest over the span
    double lmin = std::min(wall_length(traj, t0), wall_length(traj, t1));
    if (traj.kind == TrajectoryKind::PiecewiseReversal && t0 < 0.5 * traj.T && t1 > 0.5 * traj.T)
        lmin = std::min(lmin, wall_length(traj, 0.5 * traj.T));
    const double emax = grid_kinetic_max(params, traj.L0, lmin, cfg.n_points, cfg.spatial_order);
    return 0.49 * params.hbar / emax;
}

WaveField transformed_rhs(const WaveField& psi_tilde, const WallTrajectory& traj, double t,
                          const PhysicalParams& params, int spatial_order) {
    require_transformed(psi_tilde, "transformed_rhs");
    if (spatial_order != 2 && spatial_order != 4)
        throw std::invalid_argument("transformed_rhs: spatial_order must be 2 or 4");
    const Stencil st = Stencil::build(psi_tilde.grid, spatial_order);
    const double L = wall_length(traj, t);
    const double gam = wall_velocity_left(traj, t) / L;
    const double s2 = (traj.L0 / L) * (traj.L0 / L);
    const double kap = st.kin_scale(params, s2);
    const double k1 = kap * st.koff1(), k2 = kap * st.koff2();
    const std::size_t m = st.y.size();

    WaveField out(psi_tilde.grid, t);
    const auto& p = psi_tilde.samples;
    for (std::size_t i = 0; i < m; ++i) {
        cplx acc = kap * st.kdiag[i] * p[i + 1];
        cplx gacc(0.0);
        if (i >= 1) { acc += k1 * p[i]; gacc -= st.g1[i - 1] * p[i]; }
        if (i >= 2 && spatial_order == 4) { acc += k2 * p[i - 1]; gacc -= st.g2[i - 2] * p[i - 1]; }
        if (i + 1 < m) { acc += k1 * p[i + 2]; gacc += st.g1[i] * p[i + 2]; }
        if (i + 2 < m && spatial_order == 4) { acc += k2 * p[i + 3]; gacc += st.g2[i] * p[i + 3]; }
        out.samples[i + 1] = acc + cplx(0.0, params.hbar * gam) * gacc;
    }
    out.enforce_dirichlet();
    return out;
}

WaveField propagate_numeric(const WaveField& psi0, const WallTrajectory& traj, double t0,
                            double t1, const PropagatorConfig& cfg,
                            const PhysicalParams& params, PropagationStats* stats,
                            const std::vector<double>* observe_times, const ObserverFn& observe) {
    cfg.validate();
    require_transformed(psi0, "propagate_numeric");
    if (psi0.n() != cfg.n_points)
        throw std::invalid_argument("propagate_numeric: psi0 grid size != cfg.n_points");
    if (!(t1 >= t0)) throw std::invalid_argument("propagate_numeric: t1 < t0");

    const double dt_rule = cfl_timestep(cfg, params, traj, t0, t1);
    double dt = (cfg.dt > 0.0) ? cfg.dt : dt_rule;
    {
        // CFL-like sanity: dt * E_max / hbar < 0.5
        double lmin = std::min(wall_length(traj, t0), wall_length(traj, t1));
        if (traj.kind == TrajectoryKind::PiecewiseReversal && t0 < 0.5 * traj.T &&
            t1 > 0.5 * traj.T)
            lmin = std::min(lmin, wall_length(traj, 0.5 * traj.T));
        const double emax =
            grid_kinetic_max(params, traj.L0, lmin, cfg.n_points, cfg.spatial_order);
        if (!(dt * emax / params.hbar < 0.5))
            throw std::invalid_argument("propagate_numeric: dt violates the CFL sanity rule "
                                        "dt * E_max / hbar < 0.5");
    }

    const Stencil st = Stencil::build(psi0.grid, cfg.spatial_order);
    const std::size_t m = st.y.size();
    StepWorkspace w;
    w.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        w.pr[i] = psi0.samples[i + 1].real();
        w.pi[i] = psi0.samples[i + 1].imag();
    }

    WaveField cur(psi0.grid, t0);
    auto snapshot = [&](double t) {
        cur.t = t;
        for (std::size_t i = 0; i < m; ++i) cur.samples[i + 1] = cplx(w.pr[i], w.pi[i]);
        cur.enforce_dirichlet();
    };
    snapshot(t0);

    const double norm0 = norm_l2(cur);
    double max_drift = 0.0, max_cont = 0.0;
    std::size_t total_steps = 0;

    // observation schedule: strictly increasing interior times, then t1
    std::vector<double> marks;
    if (observe_times)
        for (double tt : *observe_times)
            if (tt > t0 && tt < t1) marks.push_back(tt);
    marks.push_back(t1);
    for (std::size_t i = 1; i < marks.size(); ++i)
        if (!(marks[i] > marks[i - 1]))
            throw std::invalid_argument("propagate_numeric: observation times must increase");

    if (observe && observe_times) {
        for (double tt : *observe_times)
            if (tt == t0) observe(t0, cur);
    }

    // continuity bookkeeping: |psi|^2 snapshots around each interior mark
    struct DensitySnap {
        bool valid = false;
        double t = 0.0, h_before = 0.0;
        std::vector<double> rho_before, rho_at;
        std::vector<cplx> psi_at;
    } pend;
    std::vector<double> rho_before_next;   // staging buffer; moved into pend on landing
    double h_before_next = 0.0;
    auto record_rho = [&](std::vector<double>& dst) {
        dst.resize(psi0.n());
        dst[0] = dst[psi0.n() - 1] = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            dst[i + 1] = w.pr[i] * w.pr[i] + w.pi[i] * w.pi[i];
    };

    auto continuity_residual = [&](const DensitySnap& s, double h_after,
                                   const std::vector<double>& rho_after) {
        // physical-domain residual d rho/dt + d j/dx at the mark time.
        // The transformed-frame samples at t +- h live at physical points
        // x = y L(t+-h)/L0; both densities are interpolated onto the
        // physical grid of the mark time before differencing.
        const double L = wall_length(traj, s.t);
        const double scale = traj.L0 / L;   // physical measure: rho_phys = scale * rho~(y)
        const std::size_t n = psi0.n();
        const double Lb = wall_length(traj, s.t - s.h_before);
        const double La = wall_length(traj, s.t + h_after);
        // map: fixed physical x = y_c * L/L0; transformed coordinate in the
        // neighbor snapshot: y' = x L0 / L(t') = y_c * L / L(t')
        std::vector<double> rb(n), ra(n);
        const double y0 = psi0.grid.x.front(), dyg = psi0.grid.dx;
        auto interp = [&](const std::vector<double>& f, double yq) {
            double u = (yq - y0) / dyg;
            double fi = std::floor(u);
            std::ptrdiff_t i1 = static_cast<std::ptrdiff_t>(fi);
            i1 = std::clamp<std::ptrdiff_t>(i1, 1, static_cast<std::ptrdiff_t>(n) - 3);
            const double s_loc = u - static_cast<double>(i1);
            const double fm1 = f[i1 - 1], f0 = f[i1], f1 = f[i1 + 1], f2 = f[i1 + 2];
            const double a0 = f0;
            const double a1 = 0.5 * (f1 - fm1);
            const double a2 = fm1 - 2.5 * f0 + 2.0 * f1 - 0.5 * f2;
            const double a3 = 0.5 * (f2 - fm1) + 1.5 * (f0 - f1);
            return a0 + s_loc * (a1 + s_loc * (a2 + s_loc * a3));
        };
        for (std::size_t i = 0; i < n; ++i) {
            const double yc = psi0.grid.x[i];
            rb[i] = interp(s.rho_before, yc * L / Lb) * (traj.L0 / Lb);
            ra[i] = interp(rho_after, yc * L / La) * (traj.L0 / La);
        }
        // current on the mark-time physical grid
        const double dxp = dyg / scale;
        std::vector<cplx> psi_phys(n);
        const double amp = std::sqrt(scale);
        for (std::size_t i = 0; i < n; ++i) psi_phys[i] = amp * s.psi_at[i];
        const auto dpsi = derivative4c(psi_phys, dxp);
        std::vector<double> j(n);
        for (std::size_t i = 0; i < n; ++i)
            j[i] = params.hbar / params.m * std::imag(std::conj(psi_phys[i]) * dpsi[i]);
        const auto djdx = derivative4(j, dxp);
        // nonuniform centered time derivative
        const double hb = s.h_before, ha = h_after;
        double l1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double rdot = (rb[i] * (-ha / (hb * (hb + ha))) +
                                 scale * s.rho_at[i] * ((ha - hb) / (ha * hb)) +
                                 ra[i] * (hb / (ha * (hb + ha))));
            l1 += std::abs(rdot + djdx[i]) * dxp;
        }
        return l1;
    };

    double t = t0;

    for (double mark : marks) {
        const double span = mark - t;
        if (span <= 0.0) continue;
        const std::size_t nseg = std::max<std::size_t>(1, static_cast<std::size_t>(
                                     std::ceil(span / dt - 1e-12)));
        const double h = span / static_cast<double>(nseg);
        const double theta = h / (2.0 * params.hbar);
        for (std::size_t k = 0; k < nseg; ++k) {
            const double tm = t + 0.5 * h;
            const double L = wall_length(traj, tm);
            double ldot;
            if (traj.kind == TrajectoryKind::PiecewiseReversal && tm == 0.5 * traj.T)
                ldot = 0.0;   // measure-zero kink; either one-sided value integrates the same
            else
                ldot = wall_velocity_left(traj, tm);
            const double s2 = (traj.L0 / L) * (traj.L0 / L);
            const double kap = st.kin_scale(params, s2);
            const double A = theta * kap;
            const double m16 = theta * kap * st.koff1();
            const double A2 = theta * kap * st.koff2();
            const double B = theta * params.hbar * (ldot / L);

            // stage the pre-landing density when the next landing is an interior mark
            if (k + 1 == nseg && stats && mark < t1) {
                record_rho(rho_before_next);   // rho at mark - h
                h_before_next = h;
            }
            cayley_step(st, w, A, m16, A2, B);
            ++total_steps;
            t += h;

            if (pend.valid) {
                // first step after an interior mark: close the continuity stencil
                std::vector<double> rho_after;
                record_rho(rho_after);
                max_cont = std::max(max_cont, continuity_residual(pend, h, rho_after));
                pend.valid = false;
            }
        }
        t = mark;
        snapshot(t);
        max_drift = std::max(max_drift, std::abs(norm_l2(cur) - norm0));
        if (stats && mark < t1) {
            pend.valid = true;
            pend.t = mark;
            pend.h_before = h_before_next;
            pend.rho_before = rho_before_next;
            record_rho(pend.rho_at);
            pend.psi_at = cur.samples;
        }
        if (observe && (mark < t1 || (observe_times &&
                                      std::find(observe_times->begin(), observe_times->end(),
                                                t1) != observe_times->end())))
            observe(t, cur);
    }

    snapshot(t1);
    const double normf = norm_l2(cur);
    max_drift = std::max(max_drift, std::abs(normf - norm0));
    if (stats) {
        stats->norm_initial = norm0;
        stats->norm_final = normf;
        stats->norm_drift = max_drift;
        stats->continuity_residual = max_cont;
        stats->steps = total_steps;
    }
    if (max_drift > 1e-6 * std::max(1.0, norm0))
        throw std::runtime_error("propagate_numeric: norm drift " + std::to_string(max_drift) +
                                 " exceeds 1e-6; aborting");
    return cur;
}

WaveField to_physical(const WaveField& psi_tilde, const WallTrajectory& traj, double t,
                      const Grid& grid_phys) {
    require_transformed(psi_tilde, "to_physical");
    const double L = wall_length(traj, t);
    const double L0 = traj.L0;
    if (std::abs(grid_phys.width() - L) > 1e-10 * L)
        throw std::invalid_argument("to_physical: physical grid must span [-L(t)/2, L(t)/2]");
    const double amp = std::sqrt(L0 / L);
    WaveField out(grid_phys, t);
    const std::size_t n = psi_tilde.n();
    if (grid_phys.n() == n) {
        // scaled image of the transformed grid: exact sample alignment
        for (std::size_t i = 0; i < n; ++i) out.samples[i] = amp * psi_tilde.samples[i];
        out.t = t;
        out.enforce_dirichlet();
        return out;
    }
    const double y0 = psi_tilde.grid.x.front(), dy = psi_tilde.grid.dx;
    for (std::size_t i = 0; i < grid_phys.n(); ++i) {
        const double y = grid_phys.x[i] * L0 / L;
        if (y < -0.5 * L0 - 1e-12 || y > 0.5 * L0 + 1e-12)
            throw std::invalid_argument("to_physical: target point maps outside [-L0/2, L0/2]");
        double u = (y - y0) / dy;
        std::ptrdiff_t i1 = static_cast<std::ptrdiff_t>(std::floor(u));
        i1 = std::clamp<std::ptrdiff_t>(i1, 1, static_cast<std::ptrdiff_t>(n) - 3);
        const double s = u - static_cast<double>(i1);
        const cplx fm1 = psi_tilde.samples[i1 - 1], f0 = psi_tilde.samples[i1],
                   f1 = psi_tilde.samples[i1 + 1], f2 = psi_tilde.samples[i1 + 2];
        const cplx a1 = 0.5 * (f1 - fm1);
        const cplx a2 = fm1 - 2.5 * f0 + 2.0 * f1 - 0.5 * f2;
        const cplx a3 = 0.5 * (f2 - fm1) + 1.5 * (f0 - f1);
        out.samples[i] = amp * (f0 + s * (a1 + s * (a2 + s * a3)));
    }
    out.enforce_dirichlet();
    return out;
}

WaveField to_transformed(const WaveField& psi, const WallTrajectory& traj, double t) {
    if (psi.grid.tag != DomainTag::Physical)
        throw std::invalid_argument("to_transformed: physical-grid field required");
    const double L = wall_length(traj, t);
    const double amp = std::sqrt(L / traj.L0);
    Grid g = Grid::transformed(traj.L0, psi.n());
    WaveField out(g, t);
    for (std::size_t i = 0; i < psi.n(); ++i) out.samples[i] = amp * psi.samples[i];
    out.enforce_dirichlet();
    return out;
}

}  // namespace boxdyn
