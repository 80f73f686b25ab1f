#ifndef ISING_CONTINUATION_HPP
#define ISING_CONTINUATION_HPP

#include <array>
#include <optional>
#include <vector>

#include "ising/chain.hpp"
#include "ising/marked_torus.hpp"

namespace ising {

// Base-branch corner phase eta = e^{i pi/4} e^{-i theta/2}, theta = dir*pi/2.
// The eight continuation branches are eta(k) = e^{i pi/4} e^{-i k pi/4},
// k in Z/8, with eta(k+4) = -eta(k); the base branch of a corner is k = dir.
cplx eta_of_branch(int k);
cplx eta_phase(const TorusGeometry& g, QPoint corner);

// State of the path continuation of psi_z relative to a reference corner:
// the disorder line gamma (base dual-edge chain), the accumulated sign from
// spin jumps across gamma, the square-root branch index, the ramification
// sheet on T-hat (cut crossings), and the record of dual edges hopped by
// primal-endpoint jumps (needed to compose multi-point insertions).
struct ContinuationState {
  Chain gamma;
  Chain crossed;
  int sign = 1;
  int branch = 0;
  int sheet = 1;

  cplx phase() const { return static_cast<double>(sign) * eta_of_branch(branch); }
};

// One step of the walker on the corner graph of T-hat.  `step` is one of
// (+-2,0),(0,+-2).  Exactly one of the two endpoint alternatives applies:
// a shared primal endpoint amends gamma by the hopped dual edge (and may
// cross a ramification cut); a shared dual endpoint flips the sign iff the
// hopped dual edge lies on gamma.  The branch index moves by +-1.
ContinuationState continue_step(const MarkedTorus& mt, QPoint hat_corner, QPoint step,
                                const ContinuationState& st);

// A corner of the ramified double cover of T-hat.
struct CoverCorner {
  QPoint hat_pos;  // canonical T-hat coordinates
  int sheet = 1;   // ramification sheet relative to the cut gauge
};

// z_{kl}: conjugate the loop gamma_{kl} through the base corner.  The result
// sits at the deck translate by k*omega1 + l*omega2; the sheet records the
// cut crossings along the canonical conjugation path.  `alt_route` takes a
// different (equivalent) auxiliary path; results must agree.
CoverCorner translate_pq(const MarkedTorus& mt, CoverCorner z, int k, int l,
                         bool alt_route = false);

// Which side of the split a neighbour of a corner lies on: +1 for the side
// reached by the counterclockwise rotation of the site->dual ray.
int split_side(const TorusGeometry& g, QPoint corner, QPoint neighbour_offset);

// Breadth-first continuation over the corner graph of T-hat split at the
// four lifts of a base corner w, starting from w+ on the canonical lift with
// the empty state.  Node indexing: 2*hat_corner_index + (sheet<0).
class SplitCover {
 public:
  SplitCover(const MarkedTorus& mt, QPoint w_hat_corner);

  const MarkedTorus& mt() const { return *mt_; }
  QPoint w_hat() const { return w_hat_; }
  int node_of(QPoint hat_corner, int sheet) const;
  bool visited(int node) const { return visited_[node]; }
  const ContinuationState& state(int node) const { return states_[node]; }
  int n_nodes() const { return static_cast<int>(states_.size()); }
  bool blocked_position(QPoint hat_corner) const;

  struct Arrival {
    bool seen = false;
    ContinuationState st;
  };
  // Arrival states at the split lift (k,l), given sheet and side (0:+,1:-).
  const Arrival& arrival(int k, int l, int sheet, int side) const {
    return arrivals_[k][l][sheet < 0][side];
  }

 private:
  const MarkedTorus* mt_;
  QPoint w_hat_;
  std::array<QPoint, 4> blocked_;
  std::vector<char> visited_;
  std::vector<ContinuationState> states_;
  Arrival arrivals_[2][2][2][2];
};

}  // namespace ising

#endif
