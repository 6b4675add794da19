#ifndef BOXDYN_OBSERVABLES_HPP
#define BOXDYN_OBSERVABLES_HPP

// Density, probability current, Bohmian velocity, weak momentum values,
// light-cone bookkeeping and Bohmian trajectories.  Fields live on
// physical-domain grids; spatial derivatives use 4th-order central
// differences with one-sided 4th-order closures at the walls.

#include "boxdyn/model.hpp"

namespace boxdyn {

// |psi|^2 on a physical grid and its first derivative stencil are the node
// threshold below which velocity-type quantities are reported undefined.
constexpr double kNodeDensityThreshold = 1e-30;

std::vector<double> density(const WaveField& psi);

// j = (hbar/m) Im(conj(psi) dpsi/dx)
std::vector<double> current(const WaveField& psi, const PhysicalParams& params);

// Eq.-(21)-style closed form for an even basis state under linear walls:
//   j_n(x,t) = 2 q x cos^2(pi (2n+1) x / (L0 + q t)) / (L0 + q t)^2
double current_basis_closed(const BasisIndex& idx, const WallTrajectory& traj, double x,
                            double t);

struct VelocitySample {
    double v = 0.0;
    bool defined = false;
};

// v = j / |psi|^2 at a grid point (by index) or at an arbitrary point
// (cubic interpolation of j and rho separately).
VelocitySample bohm_velocity_at(const WaveField& psi, const PhysicalParams& params, double x);

// Re P_w = m v, plus the direct-derivative route Re[-i hbar psi'(x)/psi(x)];
// both are reported so callers can check their agreement.
struct WeakMomentumSample {
    double re_pw = 0.0;         // m * j / rho route
    double re_pw_direct = 0.0;  // Re[-i hbar psi'/psi] route
    bool defined = false;
};
WeakMomentumSample weak_momentum_at(const WaveField& psi, const PhysicalParams& params,
                                    double x);

double light_cone_time(double x, double L0, const PhysicalParams& params);

struct ProbePoint {
    double x = 0.0;
    double t_c = 0.0;

    static ProbePoint make(double x, double L0, const PhysicalParams& params);
};

struct ObservableRecord {
    double t = 0.0;
    double density = 0.0;
    double j = 0.0;
    double v = 0.0;
    double re_pw = 0.0;
    bool inside_light_cone = false;
    bool defined = false;
};

struct ObservableSeries {
    ProbePoint probe;
    std::vector<ObservableRecord> records;
};

using StateProvider = std::function<WaveField(double t)>;

// Evaluates the observables at every (probe, time).  Times must be strictly
// increasing and start at 0.
std::vector<ObservableSeries> weak_scan(const StateProvider& state,
                                        const std::vector<ProbePoint>& probes,
                                        const std::vector<double>& times,
                                        const PhysicalParams& params);

// Populate a series from an already-computed field at one time (used when
// fields come from a numeric propagation observer).
void scan_append(std::vector<ObservableSeries>& series, const WaveField& psi,
                 double t, const PhysicalParams& params);

// 4th-order explicit integration of dx/dt = v(x, t); cubic interpolation of
// j and rho in x.  The path aborts near wavefunction nodes.
struct BohmPath {
    std::vector<double> t;
    std::vector<double> x;
};
BohmPath bohm_trajectory(const StateProvider& state, double x0, double t0, double t1, double dt,
                         const PhysicalParams& params);

}  // namespace boxdyn

#endif
