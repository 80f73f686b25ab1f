#ifndef ISING_SHOLO_HPP
#define ISING_SHOLO_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ising/continuation.hpp"
#include "ising/marked_torus.hpp"

namespace ising {

// Normalized observable reconstructed from the s-holomorphicity linear
// system on T-hat.  Unknowns are one real line-coefficient per cover corner:
// G(z) = x_z * eta_hat(dir z) on the + ramification sheet, where
// G = conj(eta_w) F / E[prod sigma mu^{(p,q)}].  The four lifts of w are
// pinned to G(w_kl^{+-}) = +- (-1)^{pk+ql} tau_kl eta_w, tau_kl being the
// cut-sheet sign of the deck conjugation.
struct ObservableField {
  const MarkedTorus* mt = nullptr;
  Sector sector;
  QPoint w_hat;
  cplx eta_w;
  Eigen::VectorXd x;     // per hat corner
  double residual = 0;   // relative residual of the linear solve

  cplx G(QPoint hat_corner, int sheet = 1) const;
  cplx Fhat(QPoint hat_corner, int sheet = 1) const;  // eta_w * G
};

ObservableField solve_observable(const MarkedTorus& mt, Sector sector, QPoint w_hat);

// System assembly (shared by the solver and the kernel certification).
// Rows: two real equations per dual edge of T-hat; columns: hat corners.
Eigen::SparseMatrix<double> assemble_system(const MarkedTorus& mt);

// Singular values of the unsplit homogeneous system (dense; small sizes).
Eigen::VectorXd kernel_singular_values(const MarkedTorus& mt);
int kernel_dimension(const MarkedTorus& mt, double rel_tol = 1e-8);

// Height function G = Im int F^2 on sites and duals of the base torus
// (tree gauge; additively multi-valued around the torus cycles).
struct HeightFunction {
  std::vector<double> site_value;
  std::vector<double> dual_value;
  double closedness_defect = 0;  // max cycle defect around primal/dual edge quads
  double field_scale = 0;        // max |F| over corners
};
HeightFunction integrate_fsq(const ObservableField& f);

// min over dual sites (excluding the lifts of w*) of the dual Laplacian of G.
double subharmonicity_min(const ObservableField& f);

// Worst relative s-holomorphicity residual of an arbitrary corner field given
// per-node values on the split cover (used to certify enumerated fields).
double sholo_residual(const MarkedTorus& mt, const std::vector<char>& has_value,
                      const std::vector<cplx>& value);

// E[s_{v1'} s_{v2}...mu^{(p,q)}] / E[s_{v1} s_{v2}...mu^{(p,q)}] for a move of
// the first marked site to the adjacent site v1_new, read off the observable.
struct RatioStep {
  double ratio = 0;
  double residual = 0;
};
RatioStep discrete_ratio_step(const TorusSpec& spec, const std::vector<QPoint>& marked,
                              QPoint v1_new, Sector sector);

// Telescoping product of single steps along a lattice path of the first
// marked site.  Returns E[target]/E[start].
double discrete_ratio_path(const TorusSpec& spec, const std::vector<QPoint>& marked,
                           const std::vector<QPoint>& v1_path, Sector sector,
                           double* worst_residual = nullptr);

}  // namespace ising

#endif
