#include "boxdyn/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace boxdyn {

namespace {

void require_physical(const WaveField& psi, const char* who) {
    if (psi.grid.tag != DomainTag::Physical)
        throw std::invalid_argument(std::string(who) + ": physical-domain field required");
}

std::vector<double> derivative4(const std::vector<double>& f, double dx) {
    const std::size_t n = f.size();
    if (n < 5) throw std::invalid_argument("derivative4: need at least 5 points");
    std::vector<double> d(n);
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

double cubic_interp(const std::vector<double>& f, double x0, double dx, double x) {
    const std::size_t n = f.size();
    double u = (x - x0) / dx;
    std::ptrdiff_t i1 = static_cast<std::ptrdiff_t>(std::floor(u));
    i1 = std::clamp<std::ptrdiff_t>(i1, 1, static_cast<std::ptrdiff_t>(n) - 3);
    const double s = u - static_cast<double>(i1);
    const double fm1 = f[i1 - 1], f0 = f[i1], f1 = f[i1 + 1], f2 = f[i1 + 2];
    const double a1 = 0.5 * (f1 - fm1);
    const double a2 = fm1 - 2.5 * f0 + 2.0 * f1 - 0.5 * f2;
    const double a3 = 0.5 * (f2 - fm1) + 1.5 * (f0 - f1);
    return f0 + s * (a1 + s * (a2 + s * a3));
}

cplx cubic_interp_c(const std::vector<cplx>& f, double x0, double dx, double x) {
    const std::size_t n = f.size();
    double u = (x - x0) / dx;
    std::ptrdiff_t i1 = static_cast<std::ptrdiff_t>(std::floor(u));
    i1 = std::clamp<std::ptrdiff_t>(i1, 1, static_cast<std::ptrdiff_t>(n) - 3);
    const double s = u - static_cast<double>(i1);
    const cplx fm1 = f[i1 - 1], f0 = f[i1], f1 = f[i1 + 1], f2 = f[i1 + 2];
    const cplx a1 = 0.5 * (f1 - fm1);
    const cplx a2 = fm1 - 2.5 * f0 + 2.0 * f1 - 0.5 * f2;
    const cplx a3 = 0.5 * (f2 - fm1) + 1.5 * (f0 - f1);
    return f0 + s * (a1 + s * (a2 + s * a3));
}

struct FieldSamples {
    std::vector<double> rho;
    std::vector<double> j;
    std::vector<cplx> dpsi;
};

FieldSamples field_samples(const WaveField& psi, const PhysicalParams& params) {
    FieldSamples out;
    out.rho = density(psi);
    out.dpsi = derivative4c(psi.samples, psi.grid.dx);
    out.j.resize(psi.n());
    const double c = params.hbar / params.m;
    for (std::size_t i = 0; i < psi.n(); ++i)
        out.j[i] = c * std::imag(std::conj(psi.samples[i]) * out.dpsi[i]);
    return out;
}

}  // namespace

std::vector<double> density(const WaveField& psi) {
    require_physical(psi, "density");
    std::vector<double> rho(psi.n());
    for (std::size_t i = 0; i < psi.n(); ++i) rho[i] = std::norm(psi.samples[i]);
    return rho;
}

std::vector<double> current(const WaveField& psi, const PhysicalParams& params) {
    require_physical(psi, "current");
    const auto dpsi = derivative4c(psi.samples, psi.grid.dx);
    std::vector<double> j(psi.n());
    const double c = params.hbar / params.m;
    for (std::size_t i = 0; i < psi.n(); ++i)
        j[i] = c * std::imag(std::conj(psi.samples[i]) * dpsi[i]);
    j.front() = 0.0;
    j.back() = 0.0;
    return j;
}

double current_basis_closed(const BasisIndex& idx, const WallTrajectory& traj, double x,
                            double t) {
    if (traj.kind != TrajectoryKind::Linear && traj.kind != TrajectoryKind::Static)
        throw std::invalid_argument("current_basis_closed: Linear/Static walls only");
    if (idx.parity != Parity::Even)
        throw std::invalid_argument("current_basis_closed: even parity only");
    const double L = wall_length(traj, t);
    const double q = wall_velocity_left(traj, t);
    const double c = std::cos(M_PI * (2.0 * static_cast<double>(idx.n) + 1.0) * x / L);
    return 2.0 * q * x * c * c / (L * L);
}

VelocitySample bohm_velocity_at(const WaveField& psi, const PhysicalParams& params, double x) {
    require_physical(psi, "bohm_velocity");
    const FieldSamples fs = field_samples(psi, params);
    const double x0 = psi.grid.x.front(), dx = psi.grid.dx;
    const double rho = cubic_interp(fs.rho, x0, dx, x);
    VelocitySample out;
    if (!(rho > kNodeDensityThreshold)) return out;
    out.v = cubic_interp(fs.j, x0, dx, x) / rho;
    out.defined = true;
    return out;
}

WeakMomentumSample weak_momentum_at(const WaveField& psi, const PhysicalParams& params,
                                    double x) {
    require_physical(psi, "weak_momentum");
    const FieldSamples fs = field_samples(psi, params);
    const double x0 = psi.grid.x.front(), dx = psi.grid.dx;
    const double rho = cubic_interp(fs.rho, x0, dx, x);
    WeakMomentumSample out;
    if (!(rho > kNodeDensityThreshold)) return out;
    out.re_pw = params.m * cubic_interp(fs.j, x0, dx, x) / rho;
    const cplx p = cubic_interp_c(psi.samples, x0, dx, x);
    const cplx dp = cubic_interp_c(fs.dpsi, x0, dx, x);
    out.re_pw_direct = std::real(cplx(0.0, -params.hbar) * dp / p);
    out.defined = true;
    return out;
}

double light_cone_time(double x, double L0, const PhysicalParams& params) {
    if (!(std::abs(x) < 0.5 * L0))
        throw std::invalid_argument("light_cone_time: probe outside the initial box");
    return (0.5 * L0 - std::abs(x)) / params.c;
}

ProbePoint ProbePoint::make(double x, double L0, const PhysicalParams& params) {
    return ProbePoint{x, light_cone_time(x, L0, params)};
}

void scan_append(std::vector<ObservableSeries>& series, const WaveField& psi, double t,
                 const PhysicalParams& params) {
    require_physical(psi, "scan_append");
    const FieldSamples fs = field_samples(psi, params);
    const double x0 = psi.grid.x.front(), dx = psi.grid.dx;
    for (auto& s : series) {
        ObservableRecord rec;
        rec.t = t;
        rec.inside_light_cone = (t >= s.probe.t_c);
        rec.density = cubic_interp(fs.rho, x0, dx, s.probe.x);
        if (rec.density > kNodeDensityThreshold) {
            rec.j = cubic_interp(fs.j, x0, dx, s.probe.x);
            rec.v = rec.j / rec.density;
            rec.re_pw = params.m * rec.v;
            rec.defined = true;
        }
        s.records.push_back(rec);
    }
}

std::vector<ObservableSeries> weak_scan(const StateProvider& state,
                                        const std::vector<ProbePoint>& probes,
                                        const std::vector<double>& times,
                                        const PhysicalParams& params) {
    if (times.empty() || times.front() != 0.0)
        throw std::invalid_argument("weak_scan: times must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("weak_scan: times must be strictly increasing");
    std::vector<ObservableSeries> series;
    series.reserve(probes.size());
    for (const auto& p : probes) series.push_back(ObservableSeries{p, {}});
    for (double t : times) scan_append(series, state(t), t, params);
    return series;
}

BohmPath bohm_trajectory(const StateProvider& state, double x0, double t0, double t1, double dt,
                         const PhysicalParams& params) {
    if (!(dt > 0.0) || !(t1 > t0)) throw std::invalid_argument("bohm_trajectory: bad time span");
    auto velocity = [&](double x, double t, const WaveField& psi) {
        const FieldSamples fs = field_samples(psi, params);
        const double rho = cubic_interp(fs.rho, psi.grid.x.front(), psi.grid.dx, x);
        if (!(rho > kNodeDensityThreshold))
            throw std::runtime_error("bohm_trajectory: node neighbourhood at x = " +
                                     std::to_string(x) + ", t = " + std::to_string(t));
        return cubic_interp(fs.j, psi.grid.x.front(), psi.grid.dx, x) / rho;
    };
    BohmPath path;
    double x = x0, t = t0;
    path.t.push_back(t);
    path.x.push_back(x);
    while (t < t1 - 1e-15 * std::max(1.0, std::abs(t1))) {
        const double h = std::min(dt, t1 - t);
        const WaveField f1 = state(t);
        const WaveField f2 = state(t + 0.5 * h);
        const WaveField f3 = state(t + h);
        const double k1 = velocity(x, t, f1);
        const double k2 = velocity(x + 0.5 * h * k1, t + 0.5 * h, f2);
        const double k3 = velocity(x + 0.5 * h * k2, t + 0.5 * h, f2);
        const double k4 = velocity(x + h * k3, t + h, f3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
        const double half_width = 0.5 * f3.grid.width();
        if (!(x > -half_width && x < half_width))
            throw std::runtime_error("bohm_trajectory: path left the box interior");
        path.t.push_back(t);
        path.x.push_back(x);
    }
    return path;
}

}  // namespace boxdyn
