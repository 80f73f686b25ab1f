#ifndef ISING_GEOMETRY_HPP
#define ISING_GEOMETRY_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ising {

using cplx = std::complex<double>;

// The lattice C^delta = sqrt(2) e^{i pi/4} delta Z^2 is spanned by
// u1 = delta(1+i) and u2 = delta(i-1).  All combinatorics is done on an
// integer grid in quarter-units of that basis:
//   sites   == (0,0) mod 4
//   duals   == (2,2) mod 4
//   corners == (odd, odd)
// so a corner is the midpoint of its incident site/dual pair, and
// corner adjacency is +-(2,0), +-(0,2).
struct QPoint {
  int x = 0;
  int y = 0;
  friend QPoint operator+(QPoint a, QPoint b) { return {a.x + b.x, a.y + b.y}; }
  friend QPoint operator-(QPoint a, QPoint b) { return {a.x - b.x, a.y - b.y}; }
  friend QPoint operator*(int k, QPoint p) { return {k * p.x, k * p.y}; }
  friend bool operator==(QPoint a, QPoint b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(QPoint a, QPoint b) { return !(a == b); }
};

// Periods are integer pairs (a_j, b_j) meaning omega_j = delta*((a_j-b_j) + i(a_j+b_j)),
// i.e. omega_j = a_j*u1 + b_j*u2.
struct TorusSpec {
  double delta = 1.0;
  std::array<int, 2> period1{4, 0};
  std::array<int, 2> period2{0, 4};
  cplx offset{0.0, 0.0};

  long long det() const {
    return static_cast<long long>(period1[0]) * period2[1] -
           static_cast<long long>(period2[0]) * period1[1];
  }
  cplx omega1() const;
  cplx omega2() const;
  bool rectangular() const { return period1[1] == 0 && period2[0] == 0; }
  void validate() const;  // throws std::invalid_argument on degenerate input

  static TorusSpec square(int L, double delta = 1.0) {
    TorusSpec s;
    s.delta = delta;
    s.period1 = {L, 0};
    s.period2 = {0, L};
    return s;
  }
};

// Axis of an edge: 0 = +u1 (quarter step (4,0)), 1 = +u2 (quarter step (0,4)).
enum class Axis : int { U1 = 0, U2 = 1 };

// A torus (cover_scale=1) or its 4-sheet cover T-hat (cover_scale=2) as a
// quotient of the quarter grid.  Immutable after construction.
class TorusGeometry {
 public:
  TorusGeometry(const TorusSpec& spec, int cover_scale = 1);

  const TorusSpec& spec() const { return spec_; }
  int cover_scale() const { return cover_scale_; }

  QPoint reduce(QPoint p) const;

  int n_sites() const { return n_sites_; }
  int n_duals() const { return n_sites_; }
  int n_corners() const { return 4 * n_sites_; }
  int n_primal_edges() const { return 2 * n_sites_; }
  int n_dual_edges() const { return 2 * n_sites_; }

  bool is_site(QPoint p) const { return mod4(p.x) == 0 && mod4(p.y) == 0; }
  bool is_dual(QPoint p) const { return mod4(p.x) == 2 && mod4(p.y) == 2; }
  bool is_corner(QPoint p) const { return (p.x & 1) && (p.y & 1); }

  int site_index(QPoint p) const;
  int dual_index(QPoint p) const;
  int corner_index(QPoint p) const;
  QPoint site_at(int i) const;
  QPoint dual_at(int i) const;
  QPoint corner_at(int i) const;

  // Corner structure.  dir in {0,1,2,3}: dual - site = delta * i^dir in the
  // embedding, i.e. quarter offsets (2,-2),(2,2),(-2,2),(-2,-2).
  static int corner_dir_offset(QPoint dual_minus_site);
  QPoint corner_site(QPoint c) const;
  QPoint corner_dual(QPoint c) const;
  int corner_dir(QPoint c) const;

  // Edges, indexed by their canonical base endpoint and axis.
  int primal_edge_index(QPoint site, Axis a) const;
  int dual_edge_index(QPoint dual, Axis a) const;
  // Edge between two adjacent (reduced) endpoints; throws if not adjacent.
  int primal_edge_between(QPoint s1, QPoint s2) const;
  int dual_edge_between(QPoint d1, QPoint d2) const;
  std::pair<QPoint, Axis> primal_edge_at(int idx) const;
  std::pair<QPoint, Axis> dual_edge_at(int idx) const;

  // Crossing bijection between a primal edge and the dual edge it crosses.
  int crossing_dual_edge(int primal_idx) const;
  int crossing_primal_edge(int dual_idx) const;

  cplx position(QPoint p) const;  // embedding into the plane

  // Walk helpers: the four corner neighbours of a corner.
  std::array<QPoint, 4> corner_neighbours(QPoint c) const;

 private:
  static int mod4(int v) { return ((v % 4) + 4) % 4; }
  TorusSpec spec_;
  int cover_scale_;
  // Hermite normal form of the quarter-period lattice: rows (e11, 0), (e21, e22).
  long long e11_ = 0, e21_ = 0, e22_ = 0;
  int n_sites_ = 0;
  int sites_x_ = 0, sites_y_ = 0;  // e11/4, e22/4
};

}  // namespace ising

#endif
