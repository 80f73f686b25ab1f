#ifndef ISING_CONTINUUM_HPP
#define ISING_CONTINUUM_HPP

#include <vector>

#include "ising/marked_torus.hpp"
#include "ising/theta.hpp"

namespace ising {

// Sector <-> theta index.  Pinned empirically against exact lattice data
// (the n = 0 sector values single it out: E[mu^{(0,0)}] -> |theta_1(0)| = 0)
// and consistent with the sector-swap rule under full-period moves:
//   (0,0) <-> nu=1, (0,1) <-> nu=2, (1,1) <-> nu=3, (1,0) <-> nu=4.
int sector_nu(Sector pq);
Sector nu_sector(int nu);

struct ContinuumConfig {
  ModularParam mp;
  std::vector<cplx> points;  // v_1..v_n, n even, distinct mod the lattice
  void validate() const;
};

// Balanced sign vectors S'_0 = { s in {+-1}^n : sum s = 0 }.
std::vector<std::vector<int>> balanced_sign_vectors(int n);

// Pi = prod_{i<j} |theta1(v_ij)/theta1'(0)|^{s_i s_j / 2}.
double capital_pi(const ContinuumConfig& cfg, const std::vector<int>& s);

// D^nu = sum_{s'} |theta_nu(v_tilde)|^2 Pi.
double D_nu(const ContinuumConfig& cfg, int nu);

double constant_Cn(const ModularParam& mp, int n);  // 2^{-n/4} / sum_nu |theta_nu(0)|

// <sigma...sigma mu^{(p,q)}> = C_n sqrt(D^nu).
double spin_mu_correlation(const ContinuumConfig& cfg, Sector pq);
double spin_correlation_total(const ContinuumConfig& cfg);  // C_n sum_nu sqrt(D^nu)

// The displayed sums entering the squared observables.
cplx A_nu(const ContinuumConfig& cfg, int nu, cplx a, cplx z);
cplx B_nu(const ContinuumConfig& cfg, int nu, cplx a, cplx z);

// f^2 = 4 B(a,z) + 4 A^nu / D^nu ;  f*^2 = 4 B^nu / D^nu.
cplx f_squared(const ContinuumConfig& cfg, Sector pq, cplx a, cplx z);
cplx f_star_squared(const ContinuumConfig& cfg, Sector pq, cplx a, cplx z);

// Log-derivative coefficient A = d_{v1} log sqrt(D^nu) (closed form), and the
// independent extraction from the double limit of f^2.
cplx coefficient_A(const ContinuumConfig& cfg, Sector pq);
struct LimitExtraction {
  cplx value;
  bool converged = false;
  double spread = 0.0;  // agreement of successive Richardson estimates
};
LimitExtraction coefficient_A_from_fsq(const ContinuumConfig& cfg, Sector pq);

// log of the ratio <to>/<from> of sector spin correlators (equal tori).
double ratio_R(const ContinuumConfig& from, const ContinuumConfig& to, Sector pq);

// Square roots with tracked branches.
// f(a,z): branch fixed by f ~ 2/(z-a); continued along a straight path.
cplx f_value(const ContinuumConfig& cfg, Sector pq, cplx a, cplx z);
// f*(a,z): global sign fixed by matching the v1-singularity coefficients of
// f and f* as conjugates.
cplx f_star_value(const ContinuumConfig& cfg, Sector pq, cplx a, cplx z);
// f^{[eta]} = (1/2)(conj(eta) f + eta f*).
cplx f_eta(const ContinuumConfig& cfg, Sector pq, cplx eta, cplx a, cplx z);

// (-i/2)^l Pf[B] for energy insertions at the given midpoints.
double energy_prediction(const ContinuumConfig& cfg, Sector pq, const std::vector<cplx>& edges);

// Pfaffian prediction matrix A_ij = Re[conj(eta_i) f^{[eta_j]}(z_i, z_j)] for
// fermion insertions (corner positions with phases eta_i).
double fermion_prediction(const ContinuumConfig& cfg, Sector pq, const std::vector<cplx>& zs,
                          const std::vector<cplx>& etas);

}  // namespace ising

#endif
