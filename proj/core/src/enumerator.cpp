#include "ising/enumerator.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace ising {

double beta_critical() { return 0.5 * std::log(std::sqrt(2.0) + 1.0); }

CouplingField CouplingField::critical(const TorusGeometry& base) {
  CouplingField f;
  f.beta = beta_critical();
  f.sign.assign(base.n_primal_edges(), 1);
  return f;
}

CouplingField CouplingField::flipped(const Chain& primal_flips) const {
  CouplingField f = *this;
  for (int e = 0; e < static_cast<int>(f.sign.size()); ++e)
    if (primal_flips.test(e)) f.sign[e] = -f.sign[e];
  return f;
}

namespace {

struct SiteEdges {
  // 4 incident primal edges of each site: (edge index, neighbour site index)
  std::array<std::pair<int, int>, 4> at;
};

std::vector<SiteEdges> incidence(const TorusGeometry& g) {
  std::vector<SiteEdges> inc(g.n_sites());
  for (int s = 0; s < g.n_sites(); ++s) {
    QPoint p = g.site_at(s);
    int k = 0;
    for (Axis a : {Axis::U1, Axis::U2}) {
      QPoint step = (a == Axis::U1) ? QPoint{4, 0} : QPoint{0, 4};
      inc[s].at[k++] = {g.primal_edge_index(p, a), g.site_index(p + step)};
      QPoint back = g.reduce(p - step);
      inc[s].at[k++] = {g.primal_edge_index(back, a), g.site_index(back)};
    }
  }
  return inc;
}

struct SweepOut {
  long double z = 0.0L;
  long double obs = 0.0L;
};

// Exact Gray-code sweep over all 2^N configurations with uniform coupling
// magnitude beta and per-edge signs.  Observable: product of sigma over
// `spin_mask` times prod_i (sqrt(2) sigma sigma - 1) over `eps_pairs`.
SweepOut gray_sweep(const TorusGeometry& g, double beta, const std::vector<int8_t>& sign,
                    uint32_t spin_mask, const std::vector<std::pair<int, int>>& eps_pairs) {
  const int n = g.n_sites();
  if (n > 24) throw std::invalid_argument("enumerator: more than 24 sites; use the transfer engine");
  const int ne = g.n_primal_edges();
  const auto inc = incidence(g);

  // Energy as an exact integer: k = sum_e sign_e * sigma sigma.
  std::vector<long double> table(2 * ne + 1);
  for (int k = -ne; k <= ne; ++k) table[k + ne] = expl(static_cast<long double>(beta) * k);

  // Edge list for the integer energy of the all-up start configuration.
  std::vector<std::array<int, 3>> edges(ne);  // (site a, site b, sign)
  for (int e = 0; e < ne; ++e) {
    auto [p, a] = g.primal_edge_at(e);
    QPoint step = (a == Axis::U1) ? QPoint{4, 0} : QPoint{0, 4};
    edges[e] = {g.site_index(p), g.site_index(p + step), static_cast<int>(sign[e])};
  }

  uint32_t conf = 0xFFFFFFFFu >> (32 - n);  // all sigma = +1
  int k = 0;
  for (const auto& e : edges) k += e[2];

  const uint64_t total = 1ull << n;
  long double zsum = 0.0L, zc = 0.0L, osum = 0.0L, oc = 0.0L;
  auto sigma = [&conf](int s) { return (conf >> s) & 1u ? 1 : -1; };
  const long double r2 = std::sqrt(2.0L);

  for (uint64_t it = 0;; ++it) {
    long double w = table[k + ne];
    {  // Kahan-compensated accumulation
      long double y = w - zc;
      long double t = zsum + y;
      zc = (t - zsum) - y;
      zsum = t;
    }
    if (spin_mask || !eps_pairs.empty()) {
      long double o = (std::popcount(spin_mask & ~conf) & 1) ? -w : w;
      for (const auto& [sa, sb] : eps_pairs) o *= r2 * sigma(sa) * sigma(sb) - 1.0L;
      long double y = o - oc;
      long double t = osum + y;
      oc = (t - osum) - y;
      osum = t;
    }
    if (it + 1 == total) break;
    int f = std::countr_zero(it + 1);
    // Flip site f: k -= 2 * sigma_f * sum_nb sign * sigma_nb (before flip).
    int acc = 0;
    for (const auto& [e, nb] : inc[f].at) acc += edges[e][2] * sigma(nb);
    k -= 2 * sigma(f) * acc;
    conf ^= (1u << f);
  }
  return {zsum, osum};
}

uint32_t spin_parity_mask(const TorusGeometry& g, const std::vector<QPoint>& spins) {
  uint32_t m = 0;
  for (QPoint v : spins) m ^= (1u << g.site_index(v));
  return m;
}

Chain dual_chain_to_flips(const TorusGeometry& g, const Chain& gamma) {
  Chain f(g.n_primal_edges());
  for (int e = 0; e < g.n_dual_edges(); ++e)
    if (gamma.test(e)) f.flip(g.crossing_primal_edge(e));
  return f;
}

std::vector<int8_t> signs_with(const CouplingField& J, const Chain& primal_flips) {
  std::vector<int8_t> s = J.sign;
  for (int e = 0; e < static_cast<int>(s.size()); ++e)
    if (primal_flips.test(e)) s[e] = -s[e];
  return s;
}

int sector_form(Sector pq, int i, int j) { return (1 - pq.p) * i + (1 - pq.q) * j + i * j; }

// (1/4) sum_ij (-1)^{q_pq(i,j)} <obs with gamma + gamma_ij flips> / Z.
double sector_average(const MarkedTorus& mt, const CouplingField& J, const Chain& extra_flips,
                      uint32_t spin_mask, const std::vector<std::pair<int, int>>& eps_pairs,
                      Sector pq) {
  const TorusGeometry& g = mt.base();
  long double z = gray_sweep(g, J.beta, J.sign, 0, {}).z;
  long double acc = 0.0L;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Chain flips = extra_flips ^ mt.sector_flips(i, j);
      auto out = gray_sweep(g, J.beta, signs_with(J, flips), spin_mask, eps_pairs);
      long double term = (spin_mask || !eps_pairs.empty()) ? out.obs : out.z;
      acc += (sector_form(pq, i, j) & 1) ? -term : term;
    }
  return static_cast<double>(acc / (4.0L * z));
}

}  // namespace

long double partition_function(const MarkedTorus& mt, const CouplingField& J) {
  return gray_sweep(mt.base(), J.beta, J.sign, 0, {}).z;
}

double expectation(const MarkedTorus& mt, const InsertionSet& ins, const CouplingField& J) {
  const TorusGeometry& g = mt.base();
  Chain flips = ins.disorder.size() ? dual_chain_to_flips(g, ins.disorder)
                                    : Chain(g.n_primal_edges());
  uint32_t mask = spin_parity_mask(g, ins.spins);
  long double z = gray_sweep(g, J.beta, J.sign, 0, {}).z;
  if (!mask) {
    if (flips.empty()) return 1.0;
    return static_cast<double>(gray_sweep(g, J.beta, signs_with(J, flips), 0, {}).z / z);
  }
  return static_cast<double>(gray_sweep(g, J.beta, signs_with(J, flips), mask, {}).obs / z);
}

double mu_sector_expectation(const MarkedTorus& mt, const std::vector<QPoint>& spins,
                             Sector sector) {
  if (spins.size() % 2 != 0)
    throw std::invalid_argument("mu_sector_expectation: odd number of spins");
  CouplingField J = CouplingField::critical(mt.base());
  return sector_average(mt, J, Chain(mt.base().n_primal_edges()),
                        spin_parity_mask(mt.base(), spins), {}, sector);
}

double energy_expectation(const MarkedTorus& mt, const std::vector<int>& primal_edges,
                          const std::vector<QPoint>& spins, Sector sector) {
  const TorusGeometry& g = mt.base();
  std::vector<std::pair<int, int>> eps;
  for (int e : primal_edges) {
    auto [p, a] = g.primal_edge_at(e);
    QPoint step = (a == Axis::U1) ? QPoint{4, 0} : QPoint{0, 4};
    int sa = g.site_index(p), sb = g.site_index(p + step);
    for (QPoint v : spins)
      if (g.site_index(v) == sa || g.site_index(v) == sb)
        throw std::invalid_argument("energy_expectation: edge touches a marked spin site");
    eps.emplace_back(sa, sb);
  }
  CouplingField J = CouplingField::critical(mt.base());
  return sector_average(mt, J, Chain(g.n_primal_edges()), spin_parity_mask(g, spins), eps,
                        sector);
}

int FermionFieldEnum::node(QPoint hat_corner, int sheet) const {
  return 2 * mt->hat().corner_index(hat_corner) + (sheet < 0 ? 1 : 0);
}

namespace {

// E[sigma_a sigma_b prod sigma_marked mu_gamma mu^{(p,q)}] for a continuation state.
double state_expectation(const MarkedTorus& mt, const ContinuationState& st, QPoint z_site,
                         QPoint w_site, Sector sector) {
  const TorusGeometry& g = mt.base();
  CouplingField J = CouplingField::critical(g);
  uint32_t mask = spin_parity_mask(g, mt.marked_sites());
  mask ^= 1u << g.site_index(g.reduce(z_site));
  mask ^= 1u << g.site_index(g.reduce(w_site));
  Chain flips = dual_chain_to_flips(g, st.gamma);
  return sector_average(mt, J, flips, mask, {}, sector);
}

}  // namespace

FermionFieldEnum fermion_observable_enum(const MarkedTorus& mt, Sector sector, QPoint w_hat) {
  if (mt.base().n_sites() > 20)
    throw std::invalid_argument("fermion_observable_enum: more than 20 sites");
  w_hat = mt.hat().reduce(w_hat);
  SplitCover sc(mt, w_hat);

  FermionFieldEnum f;
  f.mt = &mt;
  f.w_hat = w_hat;
  f.sector = sector;
  f.eta_w = eta_phase(mt.hat(), w_hat);
  f.denom = mu_sector_expectation(mt, mt.marked_sites(), sector);
  f.has_value.assign(sc.n_nodes(), 0);
  f.value.assign(sc.n_nodes(), cplx(0, 0));
  std::memset(f.w_side_seen, 0, sizeof(f.w_side_seen));

  const QPoint w_site = mt.hat().corner_site(w_hat);
  for (int node = 0; node < sc.n_nodes(); ++node) {
    if (!sc.visited(node)) continue;
    QPoint c = mt.hat().corner_at(node / 2);
    const ContinuationState& st = sc.state(node);
    double e = state_expectation(mt, st, mt.hat().corner_site(c), w_site, sector);
    f.value[node] = st.phase() * f.eta_w * e;
    f.has_value[node] = 1;
  }
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      for (int sh = 0; sh < 2; ++sh)
        for (int side = 0; side < 2; ++side) {
          const auto& a = sc.arrival(k, l, sh ? -1 : 1, side);
          if (!a.seen) continue;
          double e = state_expectation(mt, a.st, w_site, w_site, sector);
          f.w_side_value[k][l][sh][side] = a.st.phase() * f.eta_w * e;
          f.w_side_seen[k][l][sh][side] = 1;
        }
  return f;
}

cplx multi_fermion(const MarkedTorus& mt, Sector sector, const std::vector<CoverCorner>& corners) {
  if (corners.size() % 2 != 0)
    throw std::invalid_argument("multi_fermion: odd number of psi insertions");
  const TorusGeometry& g = mt.base();
  const int k2 = static_cast<int>(corners.size());
  if (k2 == 0) return mu_sector_expectation(mt, mt.marked_sites(), sector);
  if (k2 > 4) throw std::invalid_argument("multi_fermion: only up to 4 insertions supported");
  if (g.n_sites() > 20) throw std::invalid_argument("multi_fermion: more than 20 sites");

  // Pair states, each anchored at the even-position corner of the pair.
  struct PairState {
    ContinuationState st;
    cplx anchor_eta;
  };
  std::vector<PairState> pairs;
  for (int r = 0; r + 1 < k2; r += 2) {
    SplitCover sc(mt, corners[r + 1].hat_pos);
    int node = sc.node_of(mt.hat().reduce(corners[r].hat_pos), corners[r].sheet);
    if (!sc.visited(node)) throw std::invalid_argument("multi_fermion: corner not reachable");
    pairs.push_back({sc.state(node), eta_phase(mt.hat(), corners[r + 1].hat_pos)});
  }

  cplx phase(1.0, 0.0);
  Chain gamma_tot(g.n_dual_edges());
  uint32_t mask = spin_parity_mask(g, mt.marked_sites());
  for (size_t r = 0; r < pairs.size(); ++r) {
    phase *= pairs[r].st.phase() * pairs[r].anchor_eta;
    gamma_tot ^= pairs[r].st.gamma;
    // Linking sign: the moving corner of pair r jumped across the (static)
    // chains of all later pairs.
    for (size_t q = r + 1; q < pairs.size(); ++q)
      if (pairs[r].st.crossed.intersection_count(pairs[q].st.gamma) & 1) phase = -phase;
  }
  for (const CoverCorner& c : corners)
    mask ^= 1u << g.site_index(mt.hat().corner_site(mt.hat().reduce(c.hat_pos)));

  CouplingField J = CouplingField::critical(g);
  double e = sector_average(mt, J, dual_chain_to_flips(g, gamma_tot), mask, {}, sector);
  return phase * e;
}

}  // namespace ising
