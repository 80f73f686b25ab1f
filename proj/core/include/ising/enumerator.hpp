#ifndef ISING_ENUMERATOR_HPP
#define ISING_ENUMERATOR_HPP

#include <vector>

#include "ising/continuation.hpp"
#include "ising/marked_torus.hpp"

namespace ising {

double beta_critical();

// Per-edge couplings on the base torus.  The uniform-magnitude case (all
// |J_e| = beta, signs +-1) takes the exact integer-energy path.
struct CouplingField {
  double beta = 0.0;              // common magnitude
  std::vector<int8_t> sign;       // per primal edge, +-1
  static CouplingField critical(const TorusGeometry& base);
  CouplingField flipped(const Chain& primal_flips) const;
};

// Spin insertions (multiset reduced mod 2 per site) plus a disorder chain.
struct InsertionSet {
  std::vector<QPoint> spins;   // base sites
  Chain disorder;              // base dual-edge chain gamma (may be empty)
};

// Z = sum over all 2^N configurations; N <= 24.
long double partition_function(const MarkedTorus& mt, const CouplingField& J);

// E[ prod sigma * mu_gamma ], exact.
double expectation(const MarkedTorus& mt, const InsertionSet& ins, const CouplingField& J);

// E[ prod sigma * mu^{(p,q)} ] with mu^{(p,q)} = (1/4) sum_{ij} (-1)^{q_{pq}(i,j)} mu_ij.
double mu_sector_expectation(const MarkedTorus& mt, const std::vector<QPoint>& spins,
                             Sector sector);

// E[ prod_i eps_{e_i} * prod sigma * mu^{(p,q)} ] with eps_e = sqrt(2) s_+ s_- - 1.
// Edges are given as primal edge indices of the base torus.
double energy_expectation(const MarkedTorus& mt, const std::vector<int>& primal_edges,
                          const std::vector<QPoint>& spins, Sector sector);

// The two-point observable F(w, .) = E[psi_z psi_w prod sigma mu^{(p,q)}] over
// the split cover, built by breadth-first continuation from F(w,w+) = eta_w^2 E[...].
struct FermionFieldEnum {
  QPoint w_hat;
  Sector sector;
  cplx eta_w;
  double denom = 0.0;                 // E[prod sigma mu^{(p,q)}]
  std::vector<char> has_value;        // per SplitCover node
  std::vector<cplx> value;            // F(w, z) at each node
  cplx w_side_value[2][2][2][2];      // [k][l][sheet<0][side] arrivals at the split lifts
  char w_side_seen[2][2][2][2];

  const MarkedTorus* mt = nullptr;
  int node(QPoint hat_corner, int sheet) const;
};
FermionFieldEnum fermion_observable_enum(const MarkedTorus& mt, Sector sector, QPoint w_hat);

// Multi-point fermionic observable E[psi_{z1}...psi_{z2k} prod sigma mu^{(p,q)}]
// for k = 1, 2 with the recursive sign convention: the pair (z_{2r-1}, z_{2r})
// is continued from the split at z_{2r}, later pairs being held fixed.
cplx multi_fermion(const MarkedTorus& mt, Sector sector,
                   const std::vector<CoverCorner>& corners);

}  // namespace ising

#endif
