#ifndef BOXDYN_THETA_HPP
#define BOXDYN_THETA_HPP

// Jacobi theta functions for complex argument and lattice parameter,
// Im(kappa) > 0:
//
//   theta2(z, kappa) = 2 SUM_{n>=0} e^{i pi kappa (n+1/2)^2} cos((2n+1) z)
//   theta4(z, kappa) = SUM_{n in Z} (-1)^n e^{i pi kappa n^2} e^{2 i n z}
//
// plus the transformation theorem
//
//   theta2(z, kappa) = e^{-i z^2/(kappa pi)} / sqrt(-i kappa)
//                      * theta4(z/kappa, -1/kappa)
//
// with the principal square-root branch (Re(-i kappa) > 0 on the upper half
// plane, so the branch cut is never touched).
//
// Series are truncated when the remainder bound
// e^{-pi Im(kappa) (n+1/2)^2 + |Im z| (2n+1)} (and the n^2 analogue for
// theta4) falls below 1e-16 of the partial sum, with a hard cap of 1e6
// terms.  theta2() switches to the transformed series when the dual lattice
// parameter converges faster, which also evaluates the deep-tail region
// without cancellation; theta2_direct() always sums the defining series.

#include <complex>

namespace boxdyn {

using cplx = std::complex<double>;

struct ThetaArgument {
    cplx z;
    cplx kappa;   // Im(kappa) > 0 required
};

cplx theta2_direct(const ThetaArgument& arg);
cplx theta4_direct(const ThetaArgument& arg);

// Transform-route evaluation of theta2 (right-hand side of the theorem).
cplx jacobi_transform_theta2(const ThetaArgument& arg);

// Algorithm-selecting evaluations: direct series or dual series, whichever
// nome decays faster.
cplx theta2(const ThetaArgument& arg);
cplx theta4(const ThetaArgument& arg);

}  // namespace boxdyn

#endif
