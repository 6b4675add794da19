#include "boxdyn/theta.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace boxdyn {

namespace {

constexpr double kRelTol = 1e-16;
constexpr std::size_t kTermCap = 1000000;

void require_upper_half(const ThetaArgument& arg, const char* who) {
    if (!(arg.kappa.imag() > 0.0))
        throw std::invalid_argument(std::string(who) + ": Im(kappa) must be > 0");
}

[[noreturn]] void report_cap(const char* who, double bound, double scale) {
    throw std::runtime_error(std::string(who) + ": series cap reached, remainder bound " +
                             std::to_string(bound / std::max(scale, 1e-300)) + " (relative)");
}

bool converged(double bound, double scale) {
    return bound <= kRelTol * scale || bound <= 1e-300;
}

}  // namespace

cplx theta2_direct(const ThetaArgument& arg) {
    require_upper_half(arg, "theta2");
    const double t = arg.kappa.imag();
    const double aiz = std::abs(arg.z.imag());
    cplx sum(0.0);
    for (std::size_t n = 0; n < kTermCap; ++n) {
        const double half = static_cast<double>(n) + 0.5;
        sum += std::exp(cplx(0.0, M_PI) * arg.kappa * (half * half)) *
               std::cos((2.0 * static_cast<double>(n) + 1.0) * arg.z);
        const double nh = half + 1.0;
        const double next_bound =
            2.0 * std::exp(-M_PI * t * nh * nh + aiz * (2.0 * static_cast<double>(n) + 3.0));
        const double scale = std::abs(sum);
        if (converged(next_bound, scale)) return 2.0 * sum;
        if (n + 1 == kTermCap) report_cap("theta2", next_bound, scale);
    }
    return 2.0 * sum;
}

cplx theta4_direct(const ThetaArgument& arg) {
    require_upper_half(arg, "theta4");
    const double t = arg.kappa.imag();
    const double aiz = std::abs(arg.z.imag());
    cplx sum(1.0);   // n = 0
    double sign = -1.0;
    for (std::size_t n = 1; n < kTermCap; ++n) {
        const double nd = static_cast<double>(n);
        // +n and -n terms combined
        sum += sign * std::exp(cplx(0.0, M_PI) * arg.kappa * (nd * nd)) *
               2.0 * std::cos(2.0 * nd * arg.z);
        const double nh = nd + 1.0;
        const double next_bound = 2.0 * std::exp(-M_PI * t * nh * nh + 2.0 * nh * aiz);
        const double scale = std::abs(sum);
        if (converged(next_bound, scale)) return sum;
        if (n + 1 == kTermCap) report_cap("theta4", next_bound, scale);
        sign = -sign;
    }
    return sum;
}

cplx jacobi_transform_theta2(const ThetaArgument& arg) {
    require_upper_half(arg, "jacobi_transform_theta2");
    if (arg.kappa == cplx(0.0))
        throw std::invalid_argument("jacobi_transform_theta2: kappa must be nonzero");
    const cplx dual_kappa = -1.0 / arg.kappa;
    const cplx dual_z = arg.z / arg.kappa;
    const cplx pref =
        std::exp(-cplx(0.0, 1.0) * arg.z * arg.z / (arg.kappa * M_PI)) /
        std::sqrt(-cplx(0.0, 1.0) * arg.kappa);
    return pref * theta4_direct({dual_z, dual_kappa});
}

cplx theta2(const ThetaArgument& arg) {
    require_upper_half(arg, "theta2");
    const double dual_im = (-1.0 / arg.kappa).imag();
    if (dual_im > arg.kappa.imag()) return jacobi_transform_theta2(arg);
    return theta2_direct(arg);
}

cplx theta4(const ThetaArgument& arg) {
    require_upper_half(arg, "theta4");
    const double dual_im = (-1.0 / arg.kappa).imag();
    if (dual_im > arg.kappa.imag()) {
        // theta4(z,k) = e^{-i z^2/(k pi)} / sqrt(-i k) * theta2(z/k, -1/k)
        const cplx pref =
            std::exp(-cplx(0.0, 1.0) * arg.z * arg.z / (arg.kappa * M_PI)) /
            std::sqrt(-cplx(0.0, 1.0) * arg.kappa);
        return pref * theta2_direct({arg.z / arg.kappa, -1.0 / arg.kappa});
    }
    return theta4_direct(arg);
}

}  // namespace boxdyn
