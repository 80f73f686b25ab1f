#include "ising/marked_torus.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

namespace ising {

MarkedTorus MarkedTorus::create(const TorusSpec& spec, const std::vector<QPoint>& marked_sites) {
  spec.validate();
  if (spec.period1[1] != 0)
    throw std::invalid_argument("MarkedTorus: first period must be (a1, 0) (shear goes in the second period)");
  if (spec.period2[0] < 0 || spec.period2[0] >= spec.period1[0])
    throw std::invalid_argument("MarkedTorus: shear must satisfy 0 <= a2 < a1");
  if (marked_sites.size() % 2 != 0)
    throw std::invalid_argument("MarkedTorus: number of marked sites must be even");
  TorusGeometry base(spec, 1);
  std::vector<QPoint> canon;
  std::set<std::pair<int, int>> seen;
  for (QPoint v : marked_sites) {
    QPoint r = base.reduce(v);
    if (!base.is_site(r)) throw std::invalid_argument("MarkedTorus: marked point is not a site");
    if (!seen.insert({r.x, r.y}).second)
      throw std::invalid_argument("MarkedTorus: marked sites must be distinct");
    canon.push_back(r);
  }
  return MarkedTorus(spec, std::move(canon));
}

MarkedTorus::MarkedTorus(const TorusSpec& spec, std::vector<QPoint> marked)
    : spec_(spec), base_(spec, 1), hat_(spec, 2), marked_(std::move(marked)) {
  build_loops();
  build_cuts();
}

void MarkedTorus::build_loops() {
  loop10_ = Chain(base_.n_dual_edges());
  loop01_ = Chain(base_.n_dual_edges());
  const int a1 = spec_.period1[0];
  const int a2 = spec_.period2[0], b2 = spec_.period2[1];
  // gamma10: dual path from b* = (2,2) with displacement (4*a1, 0).
  for (int m = 0; m < a1; ++m)
    loop10_.flip(base_.dual_edge_index(base_.reduce({2 + 4 * m, 2}), Axis::U1));
  // gamma01: up one step, sideways by the shear, then up the rest;
  // displacement (4*a2, 4*b2).  Crosses gamma10 only at b*.
  loop01_.flip(base_.dual_edge_index({2, 2}, Axis::U2));
  for (int j = 0; j < std::abs(a2); ++j) {
    int x = (a2 > 0) ? 2 + 4 * j : 2 - 4 * (j + 1);
    loop01_.flip(base_.dual_edge_index(base_.reduce({x, 6}), Axis::U1));
  }
  for (int n = 1; n < b2; ++n)
    loop01_.flip(base_.dual_edge_index(base_.reduce({2 + 4 * a2, 2 + 4 * n}), Axis::U2));

  flips10_ = Chain(base_.n_primal_edges());
  flips01_ = Chain(base_.n_primal_edges());
  for (int e = 0; e < base_.n_dual_edges(); ++e) {
    if (loop10_.test(e)) flips10_.flip(base_.crossing_primal_edge(e));
    if (loop01_.test(e)) flips01_.flip(base_.crossing_primal_edge(e));
  }
}

Chain MarkedTorus::sector_flips(int i, int j) const {
  Chain f(base_.n_primal_edges());
  if (i) f ^= flips10_;
  if (j) f ^= flips01_;
  return f;
}

void MarkedTorus::build_cuts() {
  cuts_ = Chain(hat_.n_primal_edges());
  const QPoint per1{4 * spec_.period1[0], 4 * spec_.period1[1]};
  const QPoint per2{4 * spec_.period2[0], 4 * spec_.period2[1]};
  std::set<std::pair<int, int>> blocked;  // all marked lifts
  for (QPoint v : marked_) {
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) {
        QPoint p = hat_.reduce(v + k * per1 + l * per2);
        blocked.insert({p.x, p.y});
      }
  }
  auto is_blocked = [&](QPoint p) {
    p = hat_.reduce(p);
    return blocked.count({p.x, p.y}) > 0;
  };
  // One cut joins lift L to lift L + per1 by a1 steps of +u1 (period1 = (a1,0)).
  auto lay_cut = [&](QPoint from) {
    QPoint at = hat_.reduce(from);
    const QPoint target = hat_.reduce(from + per1);
    int guard = 0;
    while (at != target) {
      if (++guard > 16 * hat_.n_sites()) throw std::runtime_error("cut routing failed");
      QPoint nxt = hat_.reduce(at + QPoint{4, 0});
      int e = hat_.primal_edge_index(at, Axis::U1);
      if ((is_blocked(nxt) && nxt != target) || cuts_.test(e)) {
        // Detour up-over-down around the obstruction.
        QPoint up = hat_.reduce(at + QPoint{0, 4});
        int e1 = hat_.primal_edge_index(at, Axis::U2);
        int e2 = hat_.primal_edge_index(up, Axis::U1);
        int e3 = hat_.primal_edge_index(nxt, Axis::U2);
        if (is_blocked(up) || cuts_.test(e1) || cuts_.test(e2) || cuts_.test(e3))
          throw std::runtime_error("cut routing blocked; choose different marked sites");
        cuts_.flip(e1);
        cuts_.flip(e2);
        cuts_.flip(e3);
      } else {
        cuts_.flip(e);
      }
      at = nxt;
    }
  };
  for (QPoint v : marked_) {
    lay_cut(hat_.reduce(v));          // (0,0)-lift -> (1,0)-lift
    lay_cut(hat_.reduce(v + per2));   // (0,1)-lift -> (1,1)-lift
  }
}

QPoint MarkedTorus::deck(QPoint hat_point, int k, int l) const {
  const QPoint per1{4 * spec_.period1[0], 4 * spec_.period1[1]};
  const QPoint per2{4 * spec_.period2[0], 4 * spec_.period2[1]};
  return hat_.reduce(hat_point + k * per1 + l * per2);
}

bool MarkedTorus::is_marked_base_site(QPoint p) const {
  QPoint r = base_.reduce(p);
  return std::find(marked_.begin(), marked_.end(), r) != marked_.end();
}

std::string MarkedTorus::to_json() const {
  nlohmann::json j;
  j["delta"] = spec_.delta;
  j["period1"] = spec_.period1;
  j["period2"] = spec_.period2;
  nlohmann::json sites = nlohmann::json::array();
  for (QPoint v : marked_) sites.push_back({v.x, v.y});
  j["marked_sites"] = sites;
  return j.dump(2);
}

MarkedTorus MarkedTorus::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  TorusSpec spec;
  spec.delta = j.at("delta").get<double>();
  spec.period1 = j.at("period1").get<std::array<int, 2>>();
  spec.period2 = j.at("period2").get<std::array<int, 2>>();
  std::vector<QPoint> sites;
  for (const auto& s : j.at("marked_sites")) sites.push_back({s.at(0).get<int>(), s.at(1).get<int>()});
  return create(spec, sites);
}

}  // namespace ising
