#include "ising/theta.hpp"

#include <cmath>
#include <stdexcept>

namespace ising {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

cplx ModularParam::nome() const { return std::exp(cplx(0, kPi) * tau()); }

void ModularParam::finish() {
  if (omega1 == cplx(0, 0) || omega2 == cplx(0, 0))
    throw std::invalid_argument("ModularParam: zero period");
  cplx t = tau();
  if (!(t.imag() > 0.05))
    throw std::invalid_argument("ModularParam: Im tau must exceed 0.05");
  double absq = std::abs(nome());
  // First omitted term below 1e-16 of the leading one: |q|^{n^2} < 1e-18.
  trunc_order = static_cast<int>(std::ceil(std::sqrt(42.0 / -std::log(absq)))) + 4;
  if (trunc_order > 512) throw std::invalid_argument("ModularParam: |q| too close to 1");
}

namespace {

// Series in the internal argument zeta (DLMF 20.2); order = 0,1,2 derivatives
// with respect to zeta.
cplx theta_series(int nu, cplx zeta, const ModularParam& mp, int order) {
  const cplx q = mp.nome();
  const cplx logq = cplx(0, kPi) * mp.tau();
  const int nmax = mp.trunc_order;
  cplx acc(0, 0);
  auto trig = [order](cplx x, bool use_sin) -> cplx {
    // d/dx applied `order` times to sin or cos (factor handled by caller).
    bool s = use_sin;
    int sign = 1;
    for (int k = 0; k < order; ++k) {
      if (s) {  // sin -> cos
        s = false;
      } else {  // cos -> -sin
        s = true;
        sign = -sign;
      }
    }
    cplx v = s ? std::sin(x) : std::cos(x);
    return static_cast<double>(sign) * v;
  };
  if (nu == 1 || nu == 2) {
    for (int n = 0; n <= nmax; ++n) {
      double m = n + 0.5;
      cplx qp = std::exp(logq * (m * m));
      double fac = std::pow(2.0 * n + 1.0, order);
      cplx term;
      if (nu == 1)
        term = ((n & 1) ? -2.0 : 2.0) * qp * fac * trig((2.0 * n + 1.0) * zeta, true);
      else
        term = 2.0 * qp * fac * trig((2.0 * n + 1.0) * zeta, false);
      acc += term;
    }
  } else if (nu == 3 || nu == 4) {
    if (order == 0) acc += 1.0;
    for (int n = 1; n <= nmax; ++n) {
      cplx qp = std::exp(logq * (static_cast<double>(n) * n));
      double fac = std::pow(2.0 * n, order);
      double sgn = (nu == 4 && (n & 1)) ? -1.0 : 1.0;
      acc += 2.0 * sgn * qp * fac * trig(2.0 * n * zeta, false);
    }
  } else {
    throw std::invalid_argument("theta: nu must be 1..4");
  }
  return acc;
}

}  // namespace

cplx theta(int nu, cplx z, const ModularParam& mp) {
  return theta_series(nu, kPi * z / mp.omega1, mp, 0);
}

cplx theta_deriv(int nu, cplx z, const ModularParam& mp, int order) {
  if (order < 0 || order > 2) throw std::invalid_argument("theta_deriv: order must be 0..2");
  cplx chain = kPi / mp.omega1;
  cplx v = theta_series(nu, kPi * z / mp.omega1, mp, order);
  for (int k = 0; k < order; ++k) v *= chain;
  return v;
}

cplx log_deriv_theta1(cplx x, const ModularParam& mp) {
  cplx t = theta(1, x, mp);
  cplx tp = theta_deriv(1, x, mp, 1);
  double scale = std::abs(theta_deriv(1, 0.0, mp, 1));
  if (std::abs(t) < 1e-13 * scale * std::abs(mp.omega1))
    throw std::invalid_argument("log_deriv_theta1: argument at a lattice point");
  return tp / t;
}

ThetaWirtinger theta_wirtinger(int nu, cplx z, const ModularParam& mp) {
  cplx t = theta(nu, z, mp);
  cplx tp = theta_deriv(nu, z, mp, 1);
  cplx tpp = theta_deriv(nu, z, mp, 2);
  return {tp * std::conj(t), tpp * std::conj(t), std::norm(tp)};
}

cplx abelian_third_kind(cplx u, cplx v, cplx z, const ModularParam& mp) {
  return log_deriv_theta1(z - u, mp) - log_deriv_theta1(z - v, mp);
}

cplx bergman(cplx z, cplx w, const ModularParam& mp) {
  cplx x = z - w;
  cplx t = theta(1, x, mp);
  double scale = std::abs(theta_deriv(1, 0.0, mp, 1));
  if (std::abs(t) < 1e-13 * scale * std::abs(mp.omega1))
    throw std::invalid_argument("bergman: coincident points");
  cplx tp = theta_deriv(1, x, mp, 1);
  cplx tpp = theta_deriv(1, x, mp, 2);
  return (tp * tp - t * tpp) / (t * t);
}

}  // namespace ising
