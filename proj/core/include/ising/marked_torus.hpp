#ifndef ISING_MARKED_TORUS_HPP
#define ISING_MARKED_TORUS_HPP

#include <optional>
#include <string>

#include "ising/chain.hpp"
#include "ising/geometry.hpp"

namespace ising {

// Sector label (p,q) for mu^{(p,q)}.
struct Sector {
  int p = 0;
  int q = 0;
  friend bool operator==(Sector a, Sector b) { return a.p == b.p && a.q == b.q; }
};

// A torus with its Torelli marking, marked spin sites and the combinatorial
// data of the 4-sheet cover T-hat and the double cover ramified at the
// marked sites.  Immutable after construction.
//
// Canonical marking: gamma10 is the dual staircase through the base dual
// vertex b* = (2,2) with displacement omega1; gamma01 runs one dual step up,
// then sideways by the shear, then up, with displacement omega2; the base
// corner b is the corner east of b* in the embedding.  The ramified double
// cover of T-hat is realized by cuts: for each marked site, two paths of
// primal edges on T-hat joining the (0,0)-lift to the (1,0)-lift and the
// (0,1)-lift to the (1,1)-lift; a walk's ramification sheet flips each time
// it hops a cut edge.
class MarkedTorus {
 public:
  static MarkedTorus create(const TorusSpec& spec, const std::vector<QPoint>& marked_sites);

  const TorusSpec& spec() const { return spec_; }
  const TorusGeometry& base() const { return base_; }
  const TorusGeometry& hat() const { return hat_; }

  int n_marked() const { return static_cast<int>(marked_.size()); }
  const std::vector<QPoint>& marked_sites() const { return marked_; }  // base canonical coords

  const Chain& loop10() const { return loop10_; }  // base dual-edge chains
  const Chain& loop01() const { return loop01_; }
  // Primal edges of the base torus crossing loop10/loop01 (coupling flips of mu_ij).
  const Chain& loop10_flips() const { return flips10_; }
  const Chain& loop01_flips() const { return flips01_; }
  Chain sector_flips(int i, int j) const;  // flips of mu_ij

  QPoint base_dual() const { return base_dual_; }
  QPoint base_corner() const { return base_corner_; }

  const Chain& cuts() const { return cuts_; }  // T-hat primal-edge chain
  bool cut_edge(int hat_primal_idx) const { return cuts_.test(hat_primal_idx); }

  // Lift of a base point to the canonical (0,0)-sheet of T-hat.
  QPoint lift(QPoint base_point) const { return hat_.reduce(base_point); }
  // Deck translation of T-hat by k*omega1 + l*omega2.
  QPoint deck(QPoint hat_point, int k, int l) const;

  bool is_marked_base_site(QPoint p) const;

  std::string to_json() const;
  static MarkedTorus from_json(const std::string& text);

 private:
  MarkedTorus(const TorusSpec& spec, std::vector<QPoint> marked);
  void build_loops();
  void build_cuts();

  TorusSpec spec_;
  TorusGeometry base_;
  TorusGeometry hat_;
  std::vector<QPoint> marked_;
  Chain loop10_, loop01_, flips10_, flips01_;
  Chain cuts_;
  QPoint base_dual_{2, 2};
  QPoint base_corner_{3, 1};
};

}  // namespace ising

#endif
