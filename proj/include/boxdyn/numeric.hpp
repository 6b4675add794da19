#ifndef BOXDYN_NUMERIC_HPP
#define BOXDYN_NUMERIC_HPP

// Finite-difference oracle for the fixed-domain transformed problem
//
//   i hbar d/dt psi~ = [ -(hbar^2/2m) (L0/L)^2 d^2/dy^2
//                        + i hbar (Ldot/L) (y d/dy + 1/2) ] psi~
//
// on [-L0/2, L0/2] with Dirichlet ends, for arbitrary wall trajectories.
// Spatial discretization: symmetric kinetic stencil (2nd or 4th order; the
// 4th-order stencil closes with the odd-extension ghost, which keeps the
// matrix exactly symmetric) and an exactly antisymmetric symmetrized
// dilation stencil (Y D1 + D1 Y)/2.  Time stepping: implicit-midpoint
// Cayley steps with operator coefficients at the step midpoint; the step
// matrix is Hermitian-generated, so the discrete norm is conserved to
// roundoff.

#include "boxdyn/model.hpp"

namespace boxdyn {

struct PropagatorConfig {
    double dt = 0.0;              // <= 0 selects the CFL-rule default
    std::size_t n_points = 4096;
    int spatial_order = 4;        // 2 or 4

    void validate() const;
};

// Largest kinetic eigenvalue of the discretized operator at wall width L.
double grid_kinetic_max(const PhysicalParams& params, double L0, double L,
                        std::size_t n_points, int spatial_order);

// dt from the CFL-like sanity rule dt * E_max / hbar < 0.5, with the kinetic
// coefficient maximized over the span [t0, t1].
double cfl_timestep(const PropagatorConfig& cfg, const PhysicalParams& params,
                    const WallTrajectory& traj, double t0, double t1);

// Application of the transformed-domain generator H~(t) (right-hand side of
// i hbar d/dt psi~ = H~ psi~) to a transformed-grid field.
WaveField transformed_rhs(const WaveField& psi_tilde, const WallTrajectory& traj, double t,
                          const PhysicalParams& params, int spatial_order = 4);

struct PropagationStats {
    double norm_initial = 0.0;
    double norm_final = 0.0;
    double norm_drift = 0.0;          // max |norm(t) - norm(0)| seen at checkpoints
    double continuity_residual = 0.0; // max L1 residual of d|psi|^2/dt + dj/dx (physical domain)
    std::size_t steps = 0;
};

// Propagate psi0 from t0 to t1.  `observe`, when set, is called at t0, at
// every requested observation time, and at t1 with the current transformed
// field.  Observation times must be strictly increasing within (t0, t1].
using ObserverFn = std::function<void(double t, const WaveField& psi_tilde)>;

WaveField propagate_numeric(const WaveField& psi0, const WallTrajectory& traj, double t0,
                            double t1, const PropagatorConfig& cfg,
                            const PhysicalParams& params, PropagationStats* stats = nullptr,
                            const std::vector<double>* observe_times = nullptr,
                            const ObserverFn& observe = {});

// Dilation map psi(x,t) = sqrt(L0/L) psi~(L0 x / L, t) and its inverse.
// When grid_phys is the scaled image of the transformed grid the samples map
// one-to-one; otherwise cubic interpolation is used (error O(dx^4)).
WaveField to_physical(const WaveField& psi_tilde, const WallTrajectory& traj, double t,
                      const Grid& grid_phys);
WaveField to_transformed(const WaveField& psi, const WallTrajectory& traj, double t);

}  // namespace boxdyn

#endif
