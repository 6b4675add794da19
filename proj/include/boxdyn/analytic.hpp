#ifndef BOXDYN_ANALYTIC_HPP
#define BOXDYN_ANALYTIC_HPP

// Exact moving-wall machinery for linearly moving (or static) walls:
// the fundamental basis solutions, spectral propagation of arbitrary initial
// states, the theta-function closed form for an initially Gaussian state,
// the static/moving wavefunction ratio, and rebasing across a motion
// reversal.

#include "boxdyn/model.hpp"
#include "boxdyn/theta.hpp"

namespace boxdyn {

struct SpectralCoefficients {
    std::vector<cplx> coeffs;     // even-parity index n = 0, 1, ...
    WallTrajectory traj;
    double t_ref = 0.0;

    double norm_sq() const;
};

struct GaussianParams {
    double d = 1.0;   // width; |G(x,0)|^2 = e^{-x^2/2d^2} / (d sqrt(2 pi))

    void validate_localized(double L0) const;
};

// Initial Gaussian state sampled on a grid spanning [-L0/2, L0/2].
WaveField gaussian_initial(const GaussianParams& g, const Grid& grid);

// Transformed-domain basis solution (even parity, Linear/Static trajectory):
//   sqrt(2/L0) e^{i m x^2 L Ldot / (2 hbar L0^2) - i hbar pi^2 (2n+1)^2 PI(t) / (2m)}
//     cos((2n+1) pi x / L0),  PI(t) = phase_integral(t).
WaveField basis_tilde(const BasisIndex& idx, const WallTrajectory& traj, double t,
                      const Grid& grid, const PhysicalParams& params);

// Physical-domain image of basis_tilde under the dilation map.
WaveField basis_physical(const BasisIndex& idx, const WallTrajectory& traj, double t,
                         const Grid& grid, const PhysicalParams& params);

// Pointwise evaluation (no grid) of the physical basis solution and its
// spatial derivative; used by observables oracles.
cplx basis_physical_point(const BasisIndex& idx, const WallTrajectory& traj, double t,
                          double x, const PhysicalParams& params);

// Expansion of psi0 (transformed grid, t = 0) over the basis solutions.
// n_request is a lower bound on the cutoff; the cutoff grows until the
// |c_N|^2 <= 1e-12 tail rule holds (cap 512).
SpectralCoefficients expand_initial(const WaveField& psi0, const WallTrajectory& traj,
                                    std::size_t n_request, const PhysicalParams& params);

// Closed-form expansion coefficients of the initial Gaussian,
//   g_n = sqrt(2/L0) (2 pi d^2)^{-1/4} sqrt(pi/a) e^{-b_n^2/(4a)},
//   a = 1/(4 d^2) + i m Ldot(0) / (2 hbar L0),  b_n = (2n+1) pi / L0.
SpectralCoefficients gaussian_coefficients(const GaussianParams& g, const WallTrajectory& traj,
                                           std::size_t n_request, const PhysicalParams& params);

// Sum of coeff_n * basis(n, t) on a transformed or physical grid.
WaveField propagate_spectral(const SpectralCoefficients& coeffs, double t, const Grid& grid,
                             const PhysicalParams& params);

// Theta arguments of the closed-form Gaussian evolution:
//   z = pi x / L(t),
//   kappa = 4 pi hbar d^2 / (L0 (2 d^2 m Ldot(0) - i hbar L0))
//           - (2 pi hbar / m) phase_integral(t).
ThetaArgument kappa_z(const GaussianParams& g, const WallTrajectory& traj, double x, double t,
                      const PhysicalParams& params);

// Closed-form wavefunction evolved from the initial Gaussian (physical
// domain), built from theta2(kappa_z(...)).
cplx gaussian_closed_form_point(const GaussianParams& g, const WallTrajectory& traj, double x,
                                double t, const PhysicalParams& params);
WaveField gaussian_closed_form(const GaussianParams& g, const WallTrajectory& traj, double t,
                               const Grid& grid, const PhysicalParams& params);

// psi(x,t; static) / psi(x,t; q) computed along two routes that must agree:
// the theta2 ratio form and the theta4-reduced form.
struct StaticMovingRatio {
    cplx theta2_route;
    cplx theta4_route;
    double route_disagreement;   // |theta2_route - theta4_route|
};
StaticMovingRatio ratio_static_moving(const GaussianParams& g, const WallTrajectory& traj,
                                      double x, double t, const PhysicalParams& params);

// Re-expand an expanding-branch state at t = T/2 in the contracting-branch
// basis of a PiecewiseReversal trajectory.  The result's trajectory is
// Linear(L(T/2), -q) with t_ref = 0 in branch-local time.
SpectralCoefficients rebase_at_reversal(const SpectralCoefficients& coeffs,
                                        const WallTrajectory& traj, std::size_t grid_points,
                                        const PhysicalParams& params);

}  // namespace boxdyn

#endif
