#include "boxdyn/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace boxdyn {

namespace {

constexpr double kTailBound = 1e-12;   // |c_N|^2 at the cutoff
constexpr std::size_t kTailCap = 512;
constexpr double kNodeThreshold = 1e-30;

void require_linear_family(const WallTrajectory& traj, const char* who) {
    if (!traj.is_linear_family())
        throw std::invalid_argument(std::string(who) +
                                    ": exact solutions exist only for Static/Linear walls");
}

void require_even(const BasisIndex& idx, const char* who) {
    if (idx.parity != Parity::Even)
        throw std::invalid_argument(std::string(who) + ": odd-parity solutions not provided");
}

void require_transformed_grid(const Grid& grid, double L0, const char* who) {
    if (grid.tag != DomainTag::Transformed || std::abs(grid.width() - L0) > 1e-12 * L0)
        throw std::invalid_argument(std::string(who) +
                                    ": grid must be Transformed over [-L0/2, L0/2]");
}

// complex Gaussian-width parameter of the expansion integrals
cplx chirp_a(const GaussianParams& g, const WallTrajectory& traj, const PhysicalParams& p) {
    const double ldot0 = wall_velocity_left(traj, 0.0);
    return cplx(1.0 / (4.0 * g.d * g.d), p.m * ldot0 / (2.0 * p.hbar * traj.L0));
}

}  // namespace

double SpectralCoefficients::norm_sq() const {
    double acc = 0.0;
    for (const auto& c : coeffs) acc += std::norm(c);
    return acc;
}

void GaussianParams::validate_localized(double L0) const {
    if (!(d > 0.0)) throw std::invalid_argument("GaussianParams: d must be positive");
    if (d > L0 / 10.0)
        throw std::invalid_argument("GaussianParams: localization requires d <= L0/10");
}

WaveField gaussian_initial(const GaussianParams& g, const Grid& grid) {
    if (!(g.d > 0.0)) throw std::invalid_argument("gaussian_initial: d must be positive");
    WaveField f(grid, 0.0);
    const double norm = std::pow(2.0 * M_PI * g.d * g.d, -0.25);
    for (std::size_t i = 0; i < grid.n(); ++i)
        f.samples[i] = norm * std::exp(-grid.x[i] * grid.x[i] / (4.0 * g.d * g.d));
    f.enforce_dirichlet();
    return f;
}

WaveField basis_tilde(const BasisIndex& idx, const WallTrajectory& traj, double t,
                      const Grid& grid, const PhysicalParams& params) {
    require_linear_family(traj, "basis_tilde");
    require_even(idx, "basis_tilde");
    require_transformed_grid(grid, traj.L0, "basis_tilde");
    const double L = wall_length(traj, t);
    const double Ldot = wall_velocity_left(traj, t);
    const double L0 = traj.L0;
    const double j = 2.0 * static_cast<double>(idx.n) + 1.0;
    const double alpha = params.m * L * Ldot / (2.0 * params.hbar * L0 * L0);
    const double beta =
        params.hbar * M_PI * M_PI * j * j * phase_integral(traj, t) / (2.0 * params.m);
    const double amp = std::sqrt(2.0 / L0);
    WaveField f(grid, t);
    for (std::size_t i = 0; i < grid.n(); ++i) {
        const double y = grid.x[i];
        f.samples[i] = amp * std::exp(cplx(0.0, alpha * y * y - beta)) *
                       std::cos(j * M_PI * y / L0);
    }
    f.enforce_dirichlet();
    return f;
}

cplx basis_physical_point(const BasisIndex& idx, const WallTrajectory& traj, double t,
                          double x, const PhysicalParams& params) {
    require_linear_family(traj, "basis_physical");
    require_even(idx, "basis_physical");
    const double L = wall_length(traj, t);
    const double Ldot = wall_velocity_left(traj, t);
    const double j = 2.0 * static_cast<double>(idx.n) + 1.0;
    const double alpha = params.m * Ldot / (2.0 * params.hbar * L);
    const double beta =
        params.hbar * M_PI * M_PI * j * j * phase_integral(traj, t) / (2.0 * params.m);
    return std::sqrt(2.0 / L) * std::exp(cplx(0.0, alpha * x * x - beta)) *
           std::cos(j * M_PI * x / L);
}

WaveField basis_physical(const BasisIndex& idx, const WallTrajectory& traj, double t,
                         const Grid& grid, const PhysicalParams& params) {
    const double L = wall_length(traj, t);
    if (grid.tag != DomainTag::Physical || std::abs(grid.width() - L) > 1e-10 * L)
        throw std::invalid_argument("basis_physical: grid must be Physical over [-L(t)/2, L(t)/2]");
    WaveField f(grid, t);
    for (std::size_t i = 0; i < grid.n(); ++i)
        f.samples[i] = basis_physical_point(idx, traj, t, grid.x[i], params);
    f.enforce_dirichlet();
    return f;
}

SpectralCoefficients expand_initial(const WaveField& psi0, const WallTrajectory& traj,
                                    std::size_t n_request, const PhysicalParams& params) {
    require_linear_family(traj, "expand_initial");
    require_transformed_grid(psi0.grid, traj.L0, "expand_initial");
    if (psi0.t != 0.0)
        throw std::invalid_argument("expand_initial: psi0 must be stamped t = 0");

    SpectralCoefficients out;
    out.traj = traj;
    out.t_ref = 0.0;
    std::size_t n_target = std::max<std::size_t>(n_request, 4);
    n_target = std::min(n_target, kTailCap);
    while (true) {
        while (out.coeffs.size() < n_target) {
            const BasisIndex idx{out.coeffs.size(), Parity::Even};
            out.coeffs.push_back(inner_product(basis_tilde(idx, traj, 0.0, psi0.grid, params),
                                               psi0));
        }
        if (std::norm(out.coeffs.back()) <= kTailBound) break;
        if (n_target >= kTailCap)
            throw std::runtime_error("expand_initial: tail bound unreachable at cap 512; "
                                     "|c_N|^2 = " + std::to_string(std::norm(out.coeffs.back())));
        n_target = std::min(kTailCap, n_target + std::max<std::size_t>(8, n_target / 2));
    }
    return out;
}

SpectralCoefficients gaussian_coefficients(const GaussianParams& g, const WallTrajectory& traj,
                                           std::size_t n_request, const PhysicalParams& params) {
    require_linear_family(traj, "gaussian_coefficients");
    g.validate_localized(traj.L0);
    const double L0 = traj.L0;
    const cplx a = chirp_a(g, traj, params);
    const cplx pref = std::sqrt(2.0 / L0) * std::pow(2.0 * M_PI * g.d * g.d, -0.25) *
                      std::sqrt(M_PI / a);
    SpectralCoefficients out;
    out.traj = traj;
    out.t_ref = 0.0;
    std::size_t n_target = std::max<std::size_t>(n_request, 4);
    n_target = std::min(n_target, kTailCap);
    while (true) {
        while (out.coeffs.size() < n_target) {
            const double b = (2.0 * static_cast<double>(out.coeffs.size()) + 1.0) * M_PI / L0;
            out.coeffs.push_back(pref * std::exp(-b * b / (4.0 * a)));
        }
        if (std::norm(out.coeffs.back()) <= kTailBound) break;
        if (n_target >= kTailCap)
            throw std::runtime_error("gaussian_coefficients: tail bound unreachable at cap 512");
        n_target = std::min(kTailCap, n_target + std::max<std::size_t>(8, n_target / 2));
    }
    return out;
}

WaveField propagate_spectral(const SpectralCoefficients& coeffs, double t, const Grid& grid,
                             const PhysicalParams& params) {
    require_linear_family(coeffs.traj, "propagate_spectral");
    WaveField acc(grid, t);
    for (std::size_t n = 0; n < coeffs.coeffs.size(); ++n) {
        const BasisIndex idx{n, Parity::Even};
        const WaveField b = (grid.tag == DomainTag::Transformed)
                                ? basis_tilde(idx, coeffs.traj, t, grid, params)
                                : basis_physical(idx, coeffs.traj, t, grid, params);
        for (std::size_t i = 0; i < grid.n(); ++i)
            acc.samples[i] += coeffs.coeffs[n] * b.samples[i];
    }
    acc.enforce_dirichlet();
    return acc;
}

ThetaArgument kappa_z(const GaussianParams& g, const WallTrajectory& traj, double x, double t,
                      const PhysicalParams& params) {
    require_linear_family(traj, "kappa_z");
    g.validate_localized(traj.L0);
    const double L0 = traj.L0;
    const double ldot0 = wall_velocity_left(traj, 0.0);
    const double hb = params.hbar;
    const cplx denom = L0 * cplx(2.0 * g.d * g.d * params.m * ldot0, -hb * L0);
    const cplx kap = 4.0 * M_PI * hb * g.d * g.d / denom -
                     cplx(2.0 * M_PI * hb / params.m * phase_integral(traj, t), 0.0);
    if (!(kap.imag() > 0.0))
        throw std::domain_error("kappa_z: Im(kappa) <= 0 (parameter-domain violation)");
    return ThetaArgument{cplx(M_PI * x / wall_length(traj, t), 0.0), kap};
}

cplx gaussian_closed_form_point(const GaussianParams& g, const WallTrajectory& traj, double x,
                                double t, const PhysicalParams& params) {
    const double L = wall_length(traj, t);
    const double Ldot = wall_velocity_left(traj, t);
    const cplx a = chirp_a(g, traj, params);
    const ThetaArgument arg = kappa_z(g, traj, x, t, params);
    const cplx pref = std::pow(2.0 * M_PI * g.d * g.d, -0.25) * std::sqrt(M_PI / a) /
                      std::sqrt(traj.L0 * L) *
                      std::exp(cplx(0.0, params.m * x * x * Ldot / (2.0 * params.hbar * L)));
    return pref * theta2(arg);
}

WaveField gaussian_closed_form(const GaussianParams& g, const WallTrajectory& traj, double t,
                               const Grid& grid, const PhysicalParams& params) {
    const double L = wall_length(traj, t);
    if (grid.tag != DomainTag::Physical || std::abs(grid.width() - L) > 1e-10 * L)
        throw std::invalid_argument("gaussian_closed_form: grid must span [-L(t)/2, L(t)/2]");
    WaveField f(grid, t);
    for (std::size_t i = 0; i < grid.n(); ++i)
        f.samples[i] = gaussian_closed_form_point(g, traj, grid.x[i], t, params);
    f.enforce_dirichlet();
    return f;
}

StaticMovingRatio ratio_static_moving(const GaussianParams& g, const WallTrajectory& traj,
                                      double x, double t, const PhysicalParams& params) {
    if (traj.kind != TrajectoryKind::Linear && traj.kind != TrajectoryKind::Static)
        throw std::invalid_argument("ratio_static_moving: Linear or Static walls only");
    const WallTrajectory still = WallTrajectory::make_static(traj.L0);

    const cplx psi_q = gaussian_closed_form_point(g, traj, x, t, params);
    if (std::norm(psi_q) < kNodeThreshold * kNodeThreshold)
        throw std::domain_error("ratio_static_moving: |psi| below the node threshold");

    // route 1: Eq.-(17)-style theta2 ratio with all prefactors
    const cplx psi_0 = gaussian_closed_form_point(g, still, x, t, params);
    StaticMovingRatio out;
    out.theta2_route = psi_0 / psi_q;

    // route 2: theta4-reduced form; the prefactors cancel against the
    // transformation factors exactly.
    const ThetaArgument a0 = kappa_z(g, still, x, t, params);
    const ThetaArgument aq = kappa_z(g, traj, x, t, params);
    const cplx th4_0 = theta4_direct({a0.z / a0.kappa, -1.0 / a0.kappa});
    const cplx th4_q = theta4_direct({aq.z / aq.kappa, -1.0 / aq.kappa});
    out.theta4_route = th4_0 / th4_q;

    out.route_disagreement = std::abs(out.theta2_route - out.theta4_route);
    return out;
}

SpectralCoefficients rebase_at_reversal(const SpectralCoefficients& coeffs,
                                        const WallTrajectory& traj, std::size_t grid_points,
                                        const PhysicalParams& params) {
    if (traj.kind != TrajectoryKind::PiecewiseReversal)
        throw std::invalid_argument("rebase_at_reversal: PiecewiseReversal trajectory required");
    const double th = 0.5 * traj.T;
    const double Lh = traj.L0 + traj.q * th;
    const WallTrajectory expanding = WallTrajectory::linear(traj.L0, traj.q);
    const WallTrajectory contracting = WallTrajectory::linear(Lh, -traj.q);

    // expanding-branch state at T/2, mapped to the physical domain
    const Grid phys = Grid::physical(Lh, th, grid_points);
    WaveField psi_half(phys, th);
    for (std::size_t n = 0; n < coeffs.coeffs.size(); ++n) {
        const BasisIndex idx{n, Parity::Even};
        for (std::size_t i = 0; i < phys.n(); ++i)
            psi_half.samples[i] +=
                coeffs.coeffs[n] * basis_physical_point(idx, expanding, th, phys.x[i], params);
    }
    psi_half.enforce_dirichlet();

    // re-expansion in the contracting-branch basis at its local t = 0
    SpectralCoefficients out;
    out.traj = contracting;
    out.t_ref = 0.0;
    std::size_t n_target = std::max<std::size_t>(coeffs.coeffs.size() + 8, 16);
    n_target = std::min(n_target, kTailCap);
    while (true) {
        while (out.coeffs.size() < n_target) {
            const BasisIndex idx{out.coeffs.size(), Parity::Even};
            WaveField b(phys, th);
            for (std::size_t i = 0; i < phys.n(); ++i)
                b.samples[i] = basis_physical_point(idx, contracting, 0.0, phys.x[i], params);
            // physical-domain overlap at the junction time
            const auto w = simpson_weights(phys.n(), phys.dx);
            cplx acc(0.0);
            for (std::size_t i = 0; i < phys.n(); ++i)
                acc += w[i] * std::conj(b.samples[i]) * psi_half.samples[i];
            out.coeffs.push_back(acc);
        }
        if (std::norm(out.coeffs.back()) <= kTailBound) break;
        if (n_target >= kTailCap)
            throw std::runtime_error("rebase_at_reversal: tail bound unreachable at cap 512");
        n_target = std::min(kTailCap, n_target + std::max<std::size_t>(8, n_target / 2));
    }
    return out;
}

}  // namespace boxdyn
