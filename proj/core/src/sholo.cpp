#include "ising/sholo.hpp"

#include <Eigen/SVD>
#include <Eigen/SparseCholesky>

#include <deque>
#include <limits>

namespace ising {

namespace {

double dot2(cplx a, cplx b) { return a.real() * b.real() + a.imag() * b.imag(); }

struct EdgeGroup {
  // Flanking corners of a hat dual edge: two at the base endpoint (+1 gauge),
  // two at the far endpoint (sign -1 iff the crossing primal edge is a cut).
  std::array<QPoint, 4> corner;  // {a1, a2, b1, b2}
  std::array<int, 4> eps;
};

EdgeGroup edge_group(const MarkedTorus& mt, int dual_edge) {
  const TorusGeometry& hat = mt.hat();
  auto [d, axis] = hat.dual_edge_at(dual_edge);
  EdgeGroup g;
  if (axis == Axis::U1) {
    g.corner = {hat.reduce(d + QPoint{1, 1}), hat.reduce(d + QPoint{1, -1}),
                hat.reduce(d + QPoint{3, 1}), hat.reduce(d + QPoint{3, -1})};
  } else {
    g.corner = {hat.reduce(d + QPoint{1, 1}), hat.reduce(d + QPoint{-1, 1}),
                hat.reduce(d + QPoint{1, 3}), hat.reduce(d + QPoint{-1, 3})};
  }
  int far = mt.cut_edge(hat.crossing_primal_edge(dual_edge)) ? -1 : 1;
  g.eps = {1, 1, far, far};
  return g;
}

// Row coefficients of the two consistency equations for one edge group:
// reconstruct F(e) from the near pair, project on each far unit.
struct EdgeRows {
  // each row: three (corner, coefficient) terms
  std::array<std::array<std::pair<QPoint, double>, 3>, 2> rows;
};

EdgeRows edge_rows(const MarkedTorus& mt, const EdgeGroup& g) {
  const TorusGeometry& hat = mt.hat();
  cplx a = eta_phase(hat, g.corner[0]);
  cplx b = eta_phase(hat, g.corner[1]);
  // Dual basis: p, q with <p,a> = 1, <p,b> = 0, <q,a> = 0, <q,b> = 1.
  double gab = dot2(a, b);
  double det = 1.0 - gab * gab;
  cplx p = (a - gab * b) / det;
  cplx q = (b - gab * a) / det;
  EdgeRows r;
  for (int k = 0; k < 2; ++k) {
    cplx u = eta_phase(hat, g.corner[2 + k]);
    r.rows[k] = {{{g.corner[0], g.eps[0] * dot2(p, u)},
                  {g.corner[1], g.eps[1] * dot2(q, u)},
                  {g.corner[2 + k], -static_cast<double>(g.eps[2 + k])}}};
  }
  return r;
}

}  // namespace

Eigen::SparseMatrix<double> assemble_system(const MarkedTorus& mt) {
  const TorusGeometry& hat = mt.hat();
  std::vector<Eigen::Triplet<double>> trip;
  for (int e = 0; e < hat.n_dual_edges(); ++e) {
    EdgeGroup g = edge_group(mt, e);
    EdgeRows r = edge_rows(mt, g);
    for (int k = 0; k < 2; ++k)
      for (const auto& [c, coef] : r.rows[k])
        trip.emplace_back(2 * e + k, hat.corner_index(c), coef);
  }
  Eigen::SparseMatrix<double> A(2 * hat.n_dual_edges(), hat.n_corners());
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

Eigen::VectorXd kernel_singular_values(const MarkedTorus& mt) {
  if (mt.hat().n_corners() > 4096)
    throw std::invalid_argument("kernel_singular_values: dense SVD limited to <= 16x16 tori");
  Eigen::MatrixXd A = Eigen::MatrixXd(assemble_system(mt));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
  return svd.singularValues();
}

int kernel_dimension(const MarkedTorus& mt, double rel_tol) {
  Eigen::VectorXd s = kernel_singular_values(mt);
  double top = s(0);
  int dim = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) < rel_tol * top) ++dim;
  return dim;
}

ObservableField solve_observable(const MarkedTorus& mt, Sector sector, QPoint w_hat) {
  if (mt.n_marked() == 0 && sector.p == 0 && sector.q == 0)
    throw std::invalid_argument(
        "solve_observable: n=0 in sector (0,0) is degenerate (kernel of dimension 2)");
  const TorusGeometry& hat = mt.hat();
  w_hat = hat.reduce(w_hat);
  const cplx eta_w = eta_phase(hat, w_hat);

  // Pinned values at the four lifts: x = +-(-1)^{pk+ql} tau_kl per side.
  struct Pin {
    double side_value[2];  // [side 0:+, 1:-]
  };
  std::vector<int> pin_of(hat.n_corners(), -1);
  std::vector<Pin> pins;
  std::vector<QPoint> pin_pos;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      CoverCorner t = translate_pq(mt, {w_hat, 1}, k, l);
      double v = static_cast<double>(t.sheet);
      if ((sector.p * k + sector.q * l) & 1) v = -v;
      QPoint pos = t.hat_pos;
      int ci = hat.corner_index(pos);
      if (pin_of[ci] < 0) {
        pin_of[ci] = static_cast<int>(pins.size());
        pins.push_back({{v, -v}});
        pin_pos.push_back(pos);
      }
    }

  // Free-column compression.
  std::vector<int> col(hat.n_corners(), -1);
  int nfree = 0;
  for (int c = 0; c < hat.n_corners(); ++c)
    if (pin_of[c] < 0) col[c] = nfree++;

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * hat.n_dual_edges());
  for (int e = 0; e < hat.n_dual_edges(); ++e) {
    EdgeGroup g = edge_group(mt, e);
    EdgeRows r = edge_rows(mt, g);
    for (int k = 0; k < 2; ++k) {
      for (const auto& [cpos, coef] : r.rows[k]) {
        int ci = hat.corner_index(cpos);
        if (pin_of[ci] < 0) {
          trip.emplace_back(2 * e + k, col[ci], coef);
        } else {
          // Which side of the split this edge group sees: the partner corner
          // sharing the dual endpoint tells the side.
          const Pin& pin = pins[pin_of[ci]];
          QPoint partner{0, 0};
          bool found = false;
          for (int m = 0; m < 4; ++m) {
            if (g.corner[m] == cpos) continue;
            // partner shares the dual site
            QPoint dc = hat.reduce(cpos);
            QPoint dm = g.corner[m];
            if (hat.corner_dual(dm) == hat.corner_dual(dc)) {
              partner = dm;
              found = true;
            }
          }
          if (!found) throw std::logic_error("solve_observable: split partner not found");
          // offset from the pinned corner to the partner (shortest wrap)
          QPoint off = partner - hat.reduce(cpos);
          // reduce offset to a single step mod the torus
          for (QPoint s : {QPoint{2, 0}, QPoint{0, 2}, QPoint{-2, 0}, QPoint{0, -2}})
            if (hat.reduce(hat.reduce(cpos) + s) == partner) off = s;
          int side = split_side(hat, cpos, off) > 0 ? 0 : 1;
          rhs(2 * e + k) -= coef * pin.side_value[side];
        }
      }
    }
  }
  Eigen::SparseMatrix<double> A(2 * hat.n_dual_edges(), nfree);
  A.setFromTriplets(trip.begin(), trip.end());

  Eigen::SparseMatrix<double> AtA = Eigen::SparseMatrix<double>(A.transpose()) * A;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(AtA);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("solve_observable: factorization failed (kernel not trivial?)");
  Eigen::VectorXd Atb = A.transpose() * rhs;
  Eigen::VectorXd xf = ldlt.solve(Atb);
  for (int it = 0; it < 2; ++it) {
    Eigen::VectorXd r = Atb - AtA * xf;
    xf += ldlt.solve(r);
  }

  ObservableField f;
  f.mt = &mt;
  f.sector = sector;
  f.w_hat = w_hat;
  f.eta_w = eta_w;
  f.residual = (A * xf - rhs).norm() / std::max(rhs.norm(), 1e-300);
  f.x.resize(hat.n_corners());
  for (int c = 0; c < hat.n_corners(); ++c)
    f.x(c) = (pin_of[c] < 0) ? xf(col[c]) : 0.0;  // pinned corners are split-valued
  return f;
}

cplx ObservableField::G(QPoint hat_corner, int sheet) const {
  const TorusGeometry& hat = mt->hat();
  cplx v = x(hat.corner_index(hat_corner)) * eta_phase(hat, hat_corner);
  return sheet < 0 ? -v : v;
}

cplx ObservableField::Fhat(QPoint hat_corner, int sheet) const {
  return eta_w * G(hat_corner, sheet);
}

double sholo_residual(const MarkedTorus& mt, const std::vector<char>& has_value,
                      const std::vector<cplx>& value) {
  const TorusGeometry& hat = mt.hat();
  double worst = 0, scale = 0;
  for (int e = 0; e < hat.n_dual_edges(); ++e) {
    EdgeGroup g = edge_group(mt, e);
    cplx v[4];
    bool ok = true;
    for (int m = 0; m < 4; ++m) {
      int node = 2 * hat.corner_index(g.corner[m]);
      if (!has_value[node]) {
        ok = false;
        break;
      }
      v[m] = value[node] * static_cast<double>(g.eps[m]);
      scale = std::max(scale, std::abs(v[m]));
    }
    if (!ok) continue;
    // Reconstruct F(e) from the near pair and test the far projections.
    cplx a = eta_phase(hat, g.corner[0]), b = eta_phase(hat, g.corner[1]);
    double gab = dot2(a, b);
    double det = 1.0 - gab * gab;
    cplx p = (a - gab * b) / det, q = (b - gab * a) / det;
    // corner values are y * eta; coefficients y = <v, eta>
    cplx fe = dot2(v[0], a) * p + dot2(v[1], b) * q;
    for (int m = 2; m < 4; ++m) {
      cplx u = eta_phase(hat, g.corner[m]);
      worst = std::max(worst, std::abs(dot2(fe, u) * u - v[m]));
    }
  }
  return scale > 0 ? worst / scale : 0.0;
}

HeightFunction integrate_fsq(const ObservableField& f) {
  const MarkedTorus& mt = *f.mt;
  const TorusGeometry& base = mt.base();
  const TorusGeometry& hat = mt.hat();
  const double delta = mt.spec().delta;

  // |F| is sheet- and lift-independent; use the canonical lift.
  std::vector<double> inc(base.n_corners());  // G(dual) - G(site) across each corner
  double scale = 0;
  for (int c = 0; c < base.n_corners(); ++c) {
    QPoint pos = base.corner_at(c);
    cplx val = f.G(mt.lift(pos), 1);
    inc[c] = 2.0 * delta * std::norm(val);
    scale = std::max(scale, std::abs(val));
  }

  HeightFunction h;
  h.field_scale = scale;
  h.site_value.assign(base.n_sites(), 0.0);
  h.dual_value.assign(base.n_duals(), 0.0);
  // Spanning-tree integration over the site+dual incidence graph.
  std::vector<char> seen_s(base.n_sites(), 0), seen_d(base.n_duals(), 0);
  std::deque<std::pair<int, int>> queue;  // (kind 0=site 1=dual, index)
  seen_s[0] = 1;
  queue.push_back({0, 0});
  while (!queue.empty()) {
    auto [kind, idx] = queue.front();
    queue.pop_front();
    if (kind == 0) {
      QPoint s = base.site_at(idx);
      for (QPoint off : {QPoint{2, 2}, QPoint{2, -2}, QPoint{-2, 2}, QPoint{-2, -2}}) {
        QPoint d = base.reduce(s + off);
        int di = base.dual_index(d);
        if (seen_d[di]) continue;
        seen_d[di] = 1;
        h.dual_value[di] = h.site_value[idx] +
                           inc[base.corner_index(base.reduce({s.x + off.x / 2, s.y + off.y / 2}))];
        queue.push_back({1, di});
      }
    } else {
      QPoint d = base.dual_at(idx);
      for (QPoint off : {QPoint{2, 2}, QPoint{2, -2}, QPoint{-2, 2}, QPoint{-2, -2}}) {
        QPoint s = base.reduce(d + off);
        int si = base.site_index(s);
        if (seen_s[si]) continue;
        seen_s[si] = 1;
        h.site_value[si] = h.dual_value[idx] -
                           inc[base.corner_index(base.reduce({d.x + off.x / 2, d.y + off.y / 2}))];
        queue.push_back({0, si});
      }
    }
  }

  // Closedness: around each primal edge, site -> dual -> site' -> dual' -> site.
  double defect = 0;
  for (int e = 0; e < base.n_primal_edges(); ++e) {
    auto [s, axis] = base.primal_edge_at(e);
    QPoint step = (axis == Axis::U1) ? QPoint{4, 0} : QPoint{0, 4};
    QPoint s2 = s + step;
    int de = base.crossing_dual_edge(e);
    (void)de;
    // Quad around the edge midpoint: s -> da -> s2 -> db -> s.
    QPoint mid{(s.x + s2.x) / 2, (s.y + s2.y) / 2};
    QPoint da = mid + ((axis == Axis::U1) ? QPoint{0, 2} : QPoint{2, 0});
    QPoint db = mid - ((axis == Axis::U1) ? QPoint{0, 2} : QPoint{2, 0});
    double cyc = inc[base.corner_index(base.reduce({(s.x + da.x) / 2, (s.y + da.y) / 2}))] -
                 inc[base.corner_index(base.reduce({(s2.x + da.x) / 2, (s2.y + da.y) / 2}))] +
                 inc[base.corner_index(base.reduce({(s2.x + db.x) / 2, (s2.y + db.y) / 2}))] -
                 inc[base.corner_index(base.reduce({(s.x + db.x) / 2, (s.y + db.y) / 2}))];
    defect = std::max(defect, std::abs(cyc));
  }
  h.closedness_defect = defect;
  return h;
}

double subharmonicity_min(const ObservableField& f) {
  const MarkedTorus& mt = *f.mt;
  const TorusGeometry& base = mt.base();
  const double delta = mt.spec().delta;
  QPoint wdual_hat = mt.hat().corner_dual(f.w_hat);
  QPoint wdual_base = base.reduce(wdual_hat);

  auto inc = [&](QPoint site, QPoint dual_unred) {
    QPoint c = base.reduce({(site.x + dual_unred.x) / 2, (site.y + dual_unred.y) / 2});
    return 2.0 * delta * std::norm(f.G(mt.lift(c), 1));
  };
  double worst = std::numeric_limits<double>::infinity();
  for (int di = 0; di < base.n_duals(); ++di) {
    QPoint d = base.dual_at(di);
    if (d == wdual_base) continue;  // the discrete pole of the split lives here
    double lap = 0;
    for (QPoint doff : {QPoint{4, 0}, QPoint{0, 4}, QPoint{-4, 0}, QPoint{0, -4}}) {
      QPoint d2 = d + doff;
      // a site adjacent to both d and d2
      QPoint s = d + ((doff.x != 0) ? QPoint{doff.x / 2, 2} : QPoint{2, doff.y / 2});
      lap += inc(s, d2) - inc(s, d);
    }
    worst = std::min(worst, lap);
  }
  return worst;
}

RatioStep discrete_ratio_step(const TorusSpec& spec, const std::vector<QPoint>& marked,
                              QPoint v1_new, Sector sector) {
  MarkedTorus mt = MarkedTorus::create(spec, marked);
  const TorusGeometry& base = mt.base();
  QPoint v1 = base.reduce(marked.at(0));
  QPoint v1n = base.reduce(v1_new);
  QPoint d{0, 0};
  bool adjacent = false;
  for (QPoint step : {QPoint{4, 0}, QPoint{0, 4}, QPoint{-4, 0}, QPoint{0, -4}})
    if (base.reduce(v1 + step) == v1n) {
      d = step;
      adjacent = true;
      break;
    }
  if (!adjacent) throw std::invalid_argument("discrete_ratio_step: sites not adjacent");
  // The moved edge must not cross the disorder lines of mu^{(p,q)}.
  int crossing = base.crossing_dual_edge(base.primal_edge_between(v1, v1 + d));
  if (mt.loop10().test(crossing) || mt.loop01().test(crossing))
    throw std::invalid_argument(
        "discrete_ratio_step: move crosses a marking loop; route around it");

  // Shared dual vertex and the corner pair (w at v1, z at v1_new).
  QPoint half{d.x / 2, d.y / 2};
  QPoint perp{-half.y, half.x};
  QPoint u = v1 + half + perp;  // dual adjacent to both
  QPoint w{(v1.x + u.x) / 2, (v1.y + u.y) / 2};
  QPoint z{(v1.x + d.x + u.x) / 2, (v1.y + d.y + u.y) / 2};

  ObservableField f = solve_observable(mt, sector, mt.lift(w));
  // The lift of z adjacent to the pinned anchor lift of w.
  QPoint w_lift_unred = mt.lift(w);
  QPoint z_lift = mt.hat().reduce(w_lift_unred + (z - w));
  RatioStep out;
  out.ratio = f.x(mt.hat().corner_index(z_lift));
  out.residual = f.residual;
  return out;
}

double discrete_ratio_path(const TorusSpec& spec, const std::vector<QPoint>& marked,
                           const std::vector<QPoint>& v1_path, Sector sector,
                           double* worst_residual) {
  std::vector<QPoint> m = marked;
  double prod = 1.0, worst = 0.0;
  for (QPoint nxt : v1_path) {
    RatioStep s = discrete_ratio_step(spec, m, nxt, sector);
    prod *= s.ratio;
    worst = std::max(worst, s.residual);
    m[0] = nxt;
  }
  if (worst_residual) *worst_residual = worst;
  return prod;
}

}  // namespace ising
