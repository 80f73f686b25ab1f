#ifndef ISING_THETA_HPP
#define ISING_THETA_HPP

#include <complex>

#include "ising/geometry.hpp"

namespace ising {

// Modular data of a continuum torus C / (omega1 Z + omega2 Z).
//
// Convention: theta_nu(z) here is the Jacobi theta function evaluated at
// internal argument pi*z/omega1 with nome q = e^{i pi tau}, tau = omega2/omega1.
// With this scaling theta1(z) has its zeros exactly on the period lattice,
// so d_z log theta1(z-u) has a single pole per fundamental domain.  All
// derivatives below are with respect to the torus coordinate z (they carry
// the chain factor pi/omega1).
struct ModularParam {
  cplx omega1{1.0, 0.0};
  cplx omega2{0.0, 1.0};
  int trunc_order = 0;  // series index bound derived from |q|

  ModularParam() { finish(); }
  ModularParam(cplx o1, cplx o2) : omega1(o1), omega2(o2) { finish(); }

  cplx tau() const { return omega2 / omega1; }
  cplx nome() const;

 private:
  void finish();
};

// Theta values and z-derivatives (order 0, 1, 2) in the convention above.
cplx theta(int nu, cplx z, const ModularParam& mp);
cplx theta_deriv(int nu, cplx z, const ModularParam& mp, int order);

// theta1'/theta1 at x (the Abelian logarithmic derivative).
cplx log_deriv_theta1(cplx x, const ModularParam& mp);

// Wirtinger derivatives of |theta_nu|^2 at z:
//   d      = (d|theta|^2)     = theta' conj(theta)
//   dd     = (d^2|theta|^2)   = theta'' conj(theta)
//   dbar_d = (dbar d|theta|^2)= |theta'|^2
struct ThetaWirtinger {
  cplx d;
  cplx dd;
  double dbar_d;
};
ThetaWirtinger theta_wirtinger(int nu, cplx z, const ModularParam& mp);

// Abelian differential of the third kind: omega_{u,v}(z)/dz with residues
// +1 at u, -1 at v and vanishing A-period.
cplx abelian_third_kind(cplx u, cplx v, cplx z, const ModularParam& mp);

// Canonical differential of the second kind B(z,w) = d_z d_w log theta1(z-w).
cplx bergman(cplx z, cplx w, const ModularParam& mp);

}  // namespace ising

#endif
