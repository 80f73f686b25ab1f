#ifndef ISING_TRANSFER_HPP
#define ISING_TRANSFER_HPP

#include "ising/enumerator.hpp"
#include "ising/marked_torus.hpp"

namespace ising {

// Exact partition functions and correlations on rectangular tori, beyond
// enumeration reach.  Two exact backends sit behind one contract:
//
//  - a row-to-row state-vector trace (bond-by-bond 2-local factors, any
//    uniform-magnitude signed couplings), feasible up to width 14;
//  - a Fisher-dimer Pfaffian evaluator for Z with arbitrary sign patterns,
//    combined through Kramers-Wannier duality into spin-sector correlators
//    at the critical coupling, feasible far beyond (width ~28, even sites).
//
// Oracle-checked against the exact enumerator on small tori.
class TransferEngine {
 public:
  explicit TransferEngine(const MarkedTorus& mt, int vector_width_cap = 14);

  // log Z for the given couplings (uniform magnitude, signed).
  long double log_Z(const CouplingField& J) const;

  // E[prod sigma . mu_gamma]; arbitrary chains on the vector backend.
  double correlation(const InsertionSet& ins, const CouplingField& J) const;

  // E[prod sigma . mu^{(p,q)}] at beta_c.
  double mu_sector(const std::vector<QPoint>& spins, Sector pq) const;

  // E[prod eps_e . prod sigma . mu^{(p,q)}] at beta_c (edges given as base
  // primal edge indices, disjoint from the spin sites).
  double mu_sector_energy(const std::vector<int>& primal_edges,
                          const std::vector<QPoint>& spins, Sector pq) const;

  bool uses_vector_backend() const { return vector_ok_; }

 private:
  const MarkedTorus* mt_;
  int width_;   // min lattice extent
  bool vector_ok_;

  double duality_sigma_mu(const std::vector<QPoint>& endpoints, int i, int j) const;
  double duality_sector(const std::vector<QPoint>& endpoints, Sector pq) const;
};

// Internals exposed for tests: state-vector torus trace and open-seam sums.
long double vector_log_trace(const TorusSpec& spec, const CouplingField& J,
                             const std::vector<QPoint>& sigma_sites, long double* sign);

// Z with arbitrary per-edge sign pattern at beta_c via Fisher-dimer Pfaffians.
class DimerZ {
 public:
  explicit DimerZ(const TorusSpec& spec);  // rectangular, even number of sites
  // log Z for couplings beta_c * sign_e; exact.
  long double log_Z(const std::vector<int8_t>& edge_sign) const;
  // Z with selected edges removed entirely (J = 0), used for calibration.
  long double log_Z_cut(const std::vector<int8_t>& edge_sign,
                        const std::vector<int>& zeroed_edges) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace ising

#endif
