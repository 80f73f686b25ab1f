#include "ising/geometry.hpp"

#include <numeric>

namespace ising {

cplx TorusSpec::omega1() const {
  return delta * cplx(period1[0] - period1[1], period1[0] + period1[1]);
}
cplx TorusSpec::omega2() const {
  return delta * cplx(period2[0] - period2[1], period2[0] + period2[1]);
}

void TorusSpec::validate() const {
  if (!(delta > 0.0)) throw std::invalid_argument("TorusSpec: delta must be positive");
  if ((period1[0] == 0 && period1[1] == 0) || (period2[0] == 0 && period2[1] == 0))
    throw std::invalid_argument("TorusSpec: zero period");
  if (det() == 0) throw std::invalid_argument("TorusSpec: collinear periods");
  if (det() < 0)
    throw std::invalid_argument("TorusSpec: orientation (a1*b2 - a2*b1 must be > 0)");
}

namespace {

// Extended gcd: returns g, sets (s,t) with s*a + t*b = g.
long long xgcd(long long a, long long b, long long& s, long long& t) {
  if (b == 0) {
    s = (a >= 0) ? 1 : -1;
    t = 0;
    return std::abs(a);
  }
  long long s1, t1;
  long long g = xgcd(b, a % b, s1, t1);
  s = t1;
  t = s1 - (a / b) * t1;
  return g;
}

}  // namespace

TorusGeometry::TorusGeometry(const TorusSpec& spec, int cover_scale)
    : spec_(spec), cover_scale_(cover_scale) {
  spec_.validate();
  const long long q = 4LL * cover_scale;
  // Quarter-period lattice rows.
  long long r1x = q * spec.period1[0], r1y = q * spec.period1[1];
  long long r2x = q * spec.period2[0], r2y = q * spec.period2[1];
  // Row-style HNF: basis {(e11,0), (e21,e22)} of the same lattice.
  if (r1y == 0 && r2y == 0) throw std::invalid_argument("degenerate period lattice");
  long long s, t;
  long long g = xgcd(r1y, r2y, s, t);
  long long vx = s * r1x + t * r2x;  // (vx, g)
  long long ux = (r1y / g) * r2x - (r2y / g) * r1x;
  if (ux < 0) ux = -ux;
  if (ux == 0) throw std::invalid_argument("degenerate period lattice");
  e11_ = ux;
  e22_ = g;
  e21_ = ((vx % ux) + ux) % ux;
  sites_x_ = static_cast<int>(e11_ / 4);
  sites_y_ = static_cast<int>(e22_ / 4);
  if (sites_x_ < 2 * cover_scale || sites_y_ < 2 * cover_scale)
    throw std::invalid_argument("TorusSpec: lattice extent < 2 in some direction");
  n_sites_ = sites_x_ * sites_y_;
}

QPoint TorusGeometry::reduce(QPoint p) const {
  long long x = p.x, y = p.y;
  long long n = y / e22_;
  if (y % e22_ < 0) --n;
  x -= n * e21_;
  y -= n * e22_;
  x %= e11_;
  if (x < 0) x += e11_;
  return {static_cast<int>(x), static_cast<int>(y)};
}

int TorusGeometry::site_index(QPoint p) const {
  p = reduce(p);
  if (!is_site(p)) throw std::logic_error("site_index: not a site");
  return (p.x / 4) + sites_x_ * (p.y / 4);
}
int TorusGeometry::dual_index(QPoint p) const {
  p = reduce(p);
  if (!is_dual(p)) throw std::logic_error("dual_index: not a dual site");
  return ((p.x - 2) / 4) + sites_x_ * ((p.y - 2) / 4);
}
int TorusGeometry::corner_index(QPoint p) const {
  p = reduce(p);
  if (!is_corner(p)) throw std::logic_error("corner_index: not a corner");
  return ((p.x - 1) / 2) + 2 * sites_x_ * ((p.y - 1) / 2);
}
QPoint TorusGeometry::site_at(int i) const {
  return {4 * (i % sites_x_), 4 * (i / sites_x_)};
}
QPoint TorusGeometry::dual_at(int i) const {
  return {4 * (i % sites_x_) + 2, 4 * (i / sites_x_) + 2};
}
QPoint TorusGeometry::corner_at(int i) const {
  int w = 2 * sites_x_;
  return {2 * (i % w) + 1, 2 * (i / w) + 1};
}

int TorusGeometry::corner_dir_offset(QPoint d) {
  if (d == QPoint{2, -2}) return 0;
  if (d == QPoint{2, 2}) return 1;
  if (d == QPoint{-2, 2}) return 2;
  if (d == QPoint{-2, -2}) return 3;
  throw std::logic_error("corner_dir_offset: bad offset");
}

QPoint TorusGeometry::corner_site(QPoint c) const {
  c = reduce(c);
  // Round each odd coordinate to the nearest multiple of 4.
  int sx = (mod4(c.x) == 1) ? c.x - 1 : c.x + 1;
  int sy = (mod4(c.y) == 1) ? c.y - 1 : c.y + 1;
  return reduce({sx, sy});
}
QPoint TorusGeometry::corner_dual(QPoint c) const {
  c = reduce(c);
  int dx = (mod4(c.x) == 1) ? c.x + 1 : c.x - 1;
  int dy = (mod4(c.y) == 1) ? c.y + 1 : c.y - 1;
  return reduce({dx, dy});
}
int TorusGeometry::corner_dir(QPoint c) const {
  c = reduce(c);
  int dx = (mod4(c.x) == 1) ? 2 : -2;
  int dy = (mod4(c.y) == 1) ? 2 : -2;
  return corner_dir_offset({dx, dy});
}

int TorusGeometry::primal_edge_index(QPoint site, Axis a) const {
  return 2 * site_index(site) + static_cast<int>(a);
}
int TorusGeometry::dual_edge_index(QPoint dual, Axis a) const {
  return 2 * dual_index(dual) + static_cast<int>(a);
}
std::pair<QPoint, Axis> TorusGeometry::primal_edge_at(int idx) const {
  return {site_at(idx / 2), static_cast<Axis>(idx % 2)};
}
std::pair<QPoint, Axis> TorusGeometry::dual_edge_at(int idx) const {
  return {dual_at(idx / 2), static_cast<Axis>(idx % 2)};
}

int TorusGeometry::primal_edge_between(QPoint s1, QPoint s2) const {
  s1 = reduce(s1);
  s2 = reduce(s2);
  for (auto a : {Axis::U1, Axis::U2}) {
    QPoint step = (a == Axis::U1) ? QPoint{4, 0} : QPoint{0, 4};
    if (reduce(s1 + step) == s2) return primal_edge_index(s1, a);
    if (reduce(s2 + step) == s1) return primal_edge_index(s2, a);
  }
  throw std::logic_error("primal_edge_between: sites not adjacent");
}
int TorusGeometry::dual_edge_between(QPoint d1, QPoint d2) const {
  d1 = reduce(d1);
  d2 = reduce(d2);
  for (auto a : {Axis::U1, Axis::U2}) {
    QPoint step = (a == Axis::U1) ? QPoint{4, 0} : QPoint{0, 4};
    if (reduce(d1 + step) == d2) return dual_edge_index(d1, a);
    if (reduce(d2 + step) == d1) return dual_edge_index(d2, a);
  }
  throw std::logic_error("dual_edge_between: dual sites not adjacent");
}

// Primal (s,U1) crosses dual edge based at s+(2,-2) along U2; primal (s,U2)
// crosses dual based at s+(-2,2) along U1.  And conversely.
int TorusGeometry::crossing_dual_edge(int primal_idx) const {
  auto [s, a] = primal_edge_at(primal_idx);
  if (a == Axis::U1) return dual_edge_index(reduce(s + QPoint{2, -2}), Axis::U2);
  return dual_edge_index(reduce(s + QPoint{-2, 2}), Axis::U1);
}
int TorusGeometry::crossing_primal_edge(int dual_idx) const {
  auto [d, a] = dual_edge_at(dual_idx);
  if (a == Axis::U1) return primal_edge_index(reduce(d + QPoint{2, -2}), Axis::U2);
  return primal_edge_index(reduce(d + QPoint{-2, 2}), Axis::U1);
}

cplx TorusGeometry::position(QPoint p) const {
  const double d = spec_.delta;
  const cplx u1(d, d), u2(-d, d);
  return spec_.offset + (static_cast<double>(p.x) * u1 + static_cast<double>(p.y) * u2) / 4.0;
}

std::array<QPoint, 4> TorusGeometry::corner_neighbours(QPoint c) const {
  c = reduce(c);
  return {reduce(c + QPoint{2, 0}), reduce(c + QPoint{0, 2}), reduce(c + QPoint{-2, 0}),
          reduce(c + QPoint{0, -2})};
}

}  // namespace ising
