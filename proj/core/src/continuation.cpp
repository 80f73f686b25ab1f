#include "ising/continuation.hpp"

#include <cmath>
#include <deque>

namespace ising {

namespace {

constexpr double kPi = 3.14159265358979323846;

int mod4(int v) { return ((v % 4) + 4) % 4; }

// Unreduced site/dual of a corner at possibly out-of-window coordinates.
QPoint site_u(QPoint c) {
  return {mod4(c.x) == 1 ? c.x - 1 : c.x + 1, mod4(c.y) == 1 ? c.y - 1 : c.y + 1};
}
QPoint dual_u(QPoint c) {
  return {mod4(c.x) == 1 ? c.x + 1 : c.x - 1, mod4(c.y) == 1 ? c.y + 1 : c.y - 1};
}
int dir_u(QPoint c) {
  QPoint d = dual_u(c) - site_u(c);
  return TorusGeometry::corner_dir_offset(d);
}

// Canonical (base point, axis) of the lattice edge [p, p+2*dir], dir in
// {(+-2,0),(0,+-2)}; p is a site or dual site.
std::pair<QPoint, Axis> edge_from_halfstep(QPoint p, QPoint dirv) {
  if (dirv == QPoint{2, 0}) return {p, Axis::U1};
  if (dirv == QPoint{-2, 0}) return {p - QPoint{4, 0}, Axis::U1};
  if (dirv == QPoint{0, 2}) return {p, Axis::U2};
  if (dirv == QPoint{0, -2}) return {p - QPoint{0, 4}, Axis::U2};
  throw std::logic_error("edge_from_halfstep: bad direction");
}

}  // namespace

cplx eta_of_branch(int k) {
  k = ((k % 8) + 8) % 8;
  double a = kPi / 4.0 - static_cast<double>(k) * kPi / 4.0;
  return {std::cos(a), std::sin(a)};
}

cplx eta_phase(const TorusGeometry& g, QPoint corner) {
  return eta_of_branch(g.corner_dir(corner));
}

ContinuationState continue_step(const MarkedTorus& mt, QPoint from, QPoint step,
                                const ContinuationState& st) {
  const TorusGeometry& hat = mt.hat();
  const TorusGeometry& base = mt.base();
  if (!(step == QPoint{2, 0} || step == QPoint{-2, 0} || step == QPoint{0, 2} ||
        step == QPoint{0, -2}))
    throw std::invalid_argument("continue_step: corners not adjacent");
  from = hat.reduce(from);
  const QPoint to = from + step;

  ContinuationState out = st;

  const QPoint s1 = site_u(from), s2 = site_u(to);
  const QPoint d1 = dual_u(from), d2 = dual_u(to);
  if (s1 == s2) {
    // Primal endpoint shared: gamma gains the hopped dual edge; the step hops
    // one primal edge at the shared site (ramification cuts live there).
    QPoint mid{(d1.x + d2.x) / 2, (d1.y + d2.y) / 2};
    auto [dp, da] = edge_from_halfstep(d1, {(d2.x - d1.x) / 2, (d2.y - d1.y) / 2});
    out.gamma.flip(base.dual_edge_index(base.reduce(dp), da));
    auto [pp, pa] = edge_from_halfstep(s1, mid - s1);
    if (mt.cut_edge(hat.primal_edge_index(hat.reduce(pp), pa))) out.sheet = -out.sheet;
  } else if (d1 == d2) {
    // Dual endpoint shared: sign flips iff the primal jump crosses gamma.
    QPoint mid{(s1.x + s2.x) / 2, (s1.y + s2.y) / 2};
    auto [dp, da] = edge_from_halfstep(d1, mid - d1);
    int e = base.dual_edge_index(base.reduce(dp), da);
    if (out.gamma.test(e)) out.sign = -out.sign;
    out.crossed.flip(e);
  } else {
    throw std::logic_error("continue_step: step shares no endpoint");
  }

  int delta = ((dir_u(to) - dir_u(from)) % 4 + 4) % 4;
  if (delta == 1)
    out.branch = (out.branch + 1) % 8;
  else if (delta == 3)
    out.branch = (out.branch + 7) % 8;
  else
    throw std::logic_error("continue_step: inconsistent direction change");
  return out;
}

int split_side(const TorusGeometry& g, QPoint corner, QPoint neighbour_offset) {
  corner = g.reduce(corner);
  QPoint ray = dual_u(corner) - site_u(corner);  // (+-2,+-2)
  int cross = ray.x * neighbour_offset.y - ray.y * neighbour_offset.x;
  return cross > 0 ? 1 : -1;
}

namespace {

// Canonical corner path on the base torus from a corner to the base corner b,
// avoiding dual-edge hops on either marking loop, as a list of quarter steps.
// The fundamental window is bounded by gamma10 (dual row y=2) and gamma01
// (dual column x=2, jogging east by the shear above row 6).
std::vector<QPoint> plan_path_to_base(const MarkedTorus& mt, QPoint c, bool alt_route) {
  const int A = mt.spec().period1[0];
  const int B = mt.spec().period2[1];
  const int a2 = mt.spec().period2[0];
  c = mt.base().reduce(c);
  int yw = (c.y < 3) ? c.y + 4 * B : c.y;
  bool north = yw >= 7;
  int shift = (north && a2 > 0) ? 4 * a2 : 0;
  int xw = c.x;
  while (xw <= 2 + shift) xw += 4 * A;

  int xcol = 3 + 4 * a2;  // column safe for crossing the shear row
  if (alt_route && 3 + 4 * a2 + 4 <= 4 * A - 1) xcol = 3 + 4 * a2 + 4;
  int xb = 3 + ((a2 > 0) ? 4 * A : 0);  // window representative of b's column

  std::vector<QPoint> steps;
  auto xleg = [&steps](int from, int to) {
    int s = (to > from) ? 2 : -2;
    for (int x = from; x != to; x += s) steps.push_back({s, 0});
  };
  auto yleg = [&steps](int from, int to) {
    int s = (to > from) ? 2 : -2;
    for (int y = from; y != to; y += s) steps.push_back({0, s});
  };
  xleg(xw, xcol);
  yleg(yw, 4 * B + 1);
  xleg(xcol, xb);
  return steps;
}

// Corner circuit following gamma10 just south of it, starting and ending at
// the base corner: 2A eastward steps along row y = 4B+1.
std::vector<QPoint> gamma10_circuit(const MarkedTorus& mt) {
  std::vector<QPoint> steps(2 * static_cast<size_t>(mt.spec().period1[0]), QPoint{2, 0});
  return steps;
}

// Corner circuit following gamma01 on its east side (rectangular case):
// 2B upward steps along column 3, displacement +omega2.  It crosses gamma10
// once, as the loops do.
std::vector<QPoint> gamma01_circuit(const MarkedTorus& mt) {
  std::vector<QPoint> steps(2 * static_cast<size_t>(mt.spec().period2[1]), QPoint{0, 2});
  return steps;
}

}  // namespace

CoverCorner translate_pq(const MarkedTorus& mt, CoverCorner z, int k, int l, bool alt_route) {
  k &= 1;
  l &= 1;
  const TorusGeometry& hat = mt.hat();
  QPoint pos = hat.reduce(z.hat_pos);
  int sheet = z.sheet;

  auto run = [&](const std::vector<QPoint>& steps, int direction) {
    if (direction > 0) {
      for (QPoint s : steps) {
        QPoint p = site_u(pos), pn = site_u(pos + s);
        if (p == pn) {
          QPoint mid{(dual_u(pos).x + dual_u(pos + s).x) / 2,
                     (dual_u(pos).y + dual_u(pos + s).y) / 2};
          auto [pp, pa] = edge_from_halfstep(p, mid - p);
          if (mt.cut_edge(hat.primal_edge_index(hat.reduce(pp), pa))) sheet = -sheet;
        }
        pos = hat.reduce(pos + s);
      }
    } else {
      for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        QPoint s{-it->x, -it->y};
        QPoint p = site_u(pos), pn = site_u(pos + s);
        if (p == pn) {
          QPoint mid{(dual_u(pos).x + dual_u(pos + s).x) / 2,
                     (dual_u(pos).y + dual_u(pos + s).y) / 2};
          auto [pp, pa] = edge_from_halfstep(p, mid - p);
          if (mt.cut_edge(hat.primal_edge_index(hat.reduce(pp), pa))) sheet = -sheet;
        }
        pos = hat.reduce(pos + s);
      }
    }
  };

  auto to_b = plan_path_to_base(mt, mt.base().reduce(pos), alt_route);
  run(to_b, +1);
  if (k) run(gamma10_circuit(mt), +1);
  if (l) {
    if (mt.spec().period2[0] != 0)
      throw std::invalid_argument("translate_pq: gamma01 conjugation requires a2 = 0 (rectangular second period)");
    run(gamma01_circuit(mt), +1);
  }
  run(to_b, -1);
  return {pos, sheet};
}

bool SplitCover::blocked_position(QPoint p) const {
  p = mt_->hat().reduce(p);
  for (const QPoint& b : blocked_)
    if (b == p) return true;
  return false;
}

int SplitCover::node_of(QPoint hat_corner, int sheet) const {
  return 2 * mt_->hat().corner_index(hat_corner) + (sheet < 0 ? 1 : 0);
}

SplitCover::SplitCover(const MarkedTorus& mt, QPoint w_hat) : mt_(&mt) {
  const TorusGeometry& hat = mt.hat();
  w_hat_ = hat.reduce(w_hat);
  if (!hat.is_corner(w_hat_)) throw std::invalid_argument("SplitCover: w is not a corner");
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) blocked_[2 * k + l] = mt.deck(w_hat_, k, l);

  const int n = 2 * hat.n_corners();
  visited_.assign(n, 0);
  ContinuationState init;
  init.gamma = Chain(mt.base().n_dual_edges());
  init.crossed = Chain(mt.base().n_dual_edges());
  init.branch = hat.corner_dir(w_hat_);
  states_.assign(n, init);

  const std::array<QPoint, 4> steps{QPoint{2, 0}, QPoint{0, 2}, QPoint{-2, 0}, QPoint{0, -2}};
  std::deque<std::pair<QPoint, int>> queue;  // (position, sheet)

  auto try_visit = [&](QPoint from_pos, const ContinuationState& from_st, QPoint step) {
    ContinuationState st = continue_step(mt, from_pos, step, from_st);
    QPoint to = hat.reduce(from_pos + step);
    if (blocked_position(to)) {
      // Arrival at a split lift: classify the lift index and side.
      int kk = -1, ll = -1;
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          if (blocked_[2 * k + l] == to) kk = k, ll = l;
      int side = split_side(hat, to, QPoint{-step.x, -step.y}) > 0 ? 0 : 1;
      Arrival& a = arrivals_[kk][ll][st.sheet < 0][side];
      if (!a.seen) {
        a.seen = true;
        a.st = st;
      }
      return;
    }
    int node = node_of(to, st.sheet);
    if (!visited_[node]) {
      visited_[node] = 1;
      states_[node] = st;
      queue.emplace_back(to, st.sheet);
    }
  };

  // Seed the two neighbours on the w+ side.
  for (QPoint s : steps)
    if (split_side(hat, w_hat_, s) > 0) try_visit(w_hat_, init, s);

  while (!queue.empty()) {
    auto [pos, sheet] = queue.front();
    queue.pop_front();
    const ContinuationState& st = states_[node_of(pos, sheet)];
    for (QPoint s : steps) try_visit(pos, st, s);
  }
}

}  // namespace ising
