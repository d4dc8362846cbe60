/*
 * sysdyn.cpp
 *
 * The operator computations follow the vertex-arithmetic reductions: every
 * operator is expressed through convex hulls of vertex combinations, an
 * H-representation extraction, and a back-projection through A or B.
 */

#include "sgsynth/sysdyn.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

namespace sgsynth {

namespace {

/* hull{ base(v_p) + offset } over vertex tuples; handles rectangular B by
 * never materializing intermediate lower-dimensional polytopes */
Polytope vertex_sum_hull(int dim, const std::vector<Vec>& a,
                         const std::vector<Vec>& b) {
  std::vector<Vec> pts;
  pts.reserve(a.size() * b.size());
  for (const Vec& va : a)
    for (const Vec& vb : b) pts.push_back(va + vb);
  return Polytope::from_points(dim, pts);
}

std::vector<Vec> mapped_vertices(const Mat& m, const Polytope& p) {
  std::vector<Vec> out;
  out.reserve(p.vertices().size());
  for (const Vec& v : p.vertices()) out.push_back(m * v);
  return out;
}

/* intersect xp with {x | H A x <= K} given the halfspaces (H,K) of a
 * y-space polytope; rows whose pulled-back normal vanishes are either
 * trivial or infeasible */
Polytope backproject_through(const Mat& m, const Polytope& xp,
                             const std::vector<Halfspace>& hs) {
  const int dim = static_cast<int>(m.cols());
  std::vector<Halfspace> out = xp.halfspaces();
  for (const auto& h : hs) {
    Vec n = m.transpose() * h.normal;
    if (n.norm() <= tol::eps_geo) {
      if (h.offset < -tol::eps_geo) return Polytope::empty(dim);
      continue;
    }
    out.push_back({n, h.offset});
  }
  return Polytope::from_halfspaces(dim, out);
}

bool bbox_overlaps(const Polytope& a, const Polytope& b, double slack) {
  Vec alo, ahi, blo, bhi;
  a.bounding_box(alo, ahi);
  b.bounding_box(blo, bhi);
  for (int i = 0; i < a.dim(); ++i)
    if (alo[i] > bhi[i] + slack || blo[i] > ahi[i] + slack) return false;
  return true;
}

Polytope negated(const Polytope& p) {
  std::vector<Vec> pts;
  for (const Vec& v : p.vertices()) pts.push_back(-v);
  return Polytope::from_points(p.dim(), pts);
}

/* A*Xp + B*Ul for each part of up; parts disjointified so downstream
 * difference/intersection results remain proper regions */
Region forward_zsets(const LinearStochasticSystem& sys, const Polytope& xp,
                     const Region& up) {
  Region z(sys.state_dim());
  for (const auto& ul : up.parts()) {
    Polytope zl = vertex_sum_hull(sys.state_dim(), mapped_vertices(sys.A, xp),
                                  mapped_vertices(sys.B, ul));
    add_disjoint(z, zl);
  }
  return z;
}

std::vector<Polytope> backproject_zparts_raw(const LinearStochasticSystem& sys,
                                             const Polytope& xp,
                                             const Region& up,
                                             const Region& zgood) {
  std::vector<Polytope> out;
  for (const auto& ul : up.parts()) {
    std::vector<Vec> bu = mapped_vertices(-sys.B, ul);
    for (const auto& zp : zgood.parts()) {
      Polytope y = vertex_sum_hull(sys.state_dim(), zp.vertices(), bu);
      if (y.is_empty()) continue;
      Polytope piece = backproject_through(sys.A, xp, y.halfspaces());
      if (!piece.is_empty()) out.push_back(std::move(piece));
    }
  }
  return out;
}

Region backproject_zparts(const LinearStochasticSystem& sys,
                          const Polytope& xp, const Region& up,
                          const Region& zgood) {
  Region out(sys.state_dim());
  for (auto& piece : backproject_zparts_raw(sys, xp, up, zgood))
    add_disjoint(out, piece);
  return out;
}

IdSet all_other_ids(const Partition& part, const IdSet& ids) {
  IdSet out;
  for (CellId id = 0; id < part.num_states(); ++id)
    if (!std::binary_search(ids.begin(), ids.end(), id)) out.push_back(id);
  return out;
}

std::vector<Polytope> polys_of(const Partition& part, const IdSet& ids) {
  std::vector<Polytope> out;
  out.reserve(ids.size());
  for (CellId id : ids) out.push_back(part.poly(id));
  return out;
}

}  // namespace

void LinearStochasticSystem::validate() const {
  const int n = state_dim();
  const int m = control_dim();
  if (A.rows() != n || A.cols() != n)
    throw std::invalid_argument("system: A must be square N x N");
  if (B.rows() != n)
    throw std::invalid_argument("system: B row count must match A");
  if (X.dim() != n || W.dim() != n || U.dim() != m)
    throw std::invalid_argument("system: polytope dimensions inconsistent");
  if (X.is_empty() || U.is_empty() || W.is_empty())
    throw std::invalid_argument("system: X, U, W must be full-dimensional");
}

Letter eval_letter(const PredicateSet& preds, const Vec& x) {
  Letter l = 0;
  for (std::size_t k = 0; k < preds.size(); ++k)
    if (preds[k].c.dot(x) <= preds[k].d + tol::eps_geo)
      l |= (Letter{1} << k);
  return l;
}

/* --- Partition ----------------------------------------------------------- */

Partition::Partition(const Polytope& state_space, PredicateSet preds,
                     std::vector<Polytope> interior, std::vector<Polytope> out)
    : state_space_(state_space), preds_(std::move(preds)) {
  CellId id = 0;
  for (auto& p : interior) {
    if (p.is_empty()) continue;
    Cell c;
    c.id = id++;
    c.label = eval_letter(preds_, p.centroid());
    c.poly = std::move(p);
    cells_.push_back(std::move(c));
  }
  for (auto& p : out) {
    if (p.is_empty()) continue;
    Cell c;
    c.id = id++;
    c.label = eval_letter(preds_, p.centroid());
    c.poly = std::move(p);
    out_parts_.push_back(std::move(c));
  }
}

Partition Partition::initial(const LinearStochasticSystem& sys,
                             const PredicateSet& preds) {
  sys.validate();
  if (preds.size() > 20)
    throw std::invalid_argument("partition: more than 20 predicates");
  std::vector<Polytope> pieces{sys.X};
  for (const auto& pred : preds) {
    std::vector<Polytope> next;
    for (const auto& p : pieces) {
      Polytope t = p.cut({pred.c, pred.d});
      Polytope f = p.cut({-pred.c, -pred.d});
      if (!t.is_empty()) next.push_back(t);
      if (!f.is_empty()) next.push_back(f);
    }
    pieces = std::move(next);
  }
  Region out = out_region(sys);
  std::vector<Polytope> outp(out.parts().begin(), out.parts().end());
  return Partition(sys.X, preds, std::move(pieces), std::move(outp));
}

const Polytope& Partition::poly(CellId id) const {
  if (id < num_cells()) return cells_[id].poly;
  return out_parts_[id - num_cells()].poly;
}

Letter Partition::label(CellId id) const {
  if (id < num_cells()) return cells_[id].label;
  return out_parts_[id - num_cells()].label;
}

std::optional<CellId> Partition::locate(const Vec& x) const {
  for (const auto& c : cells_)
    if (c.poly.contains(x)) return c.id;
  for (const auto& c : out_parts_)
    if (c.poly.contains(x)) return c.id;
  return std::nullopt;
}

IdSet Partition::cells_matching(const IdSet& pos, const IdSet& neg) const {
  IdSet out;
  for (const auto& c : cells_) {
    bool ok = true;
    for (int k : pos)
      if (!(c.label >> k & 1)) ok = false;
    for (int k : neg)
      if (c.label >> k & 1) ok = false;
    if (ok) out.push_back(c.id);
  }
  return out;
}

double Partition::coverage_volume() const {
  double v = 0.0;
  for (const auto& c : cells_) v += c.poly.volume();
  return v;
}

/* --- operators ------------------------------------------------------------ */

Polytope post(const LinearStochasticSystem& sys, const Polytope& xp,
              const Polytope& up) {
  const int n = sys.state_dim();
  if (xp.is_empty() || up.is_empty()) return Polytope::empty(n);
  std::vector<Vec> pts;
  pts.reserve(xp.vertices().size() * up.vertices().size() *
              sys.W.vertices().size());
  for (const Vec& vx : xp.vertices()) {
    Vec ax = sys.A * vx;
    for (const Vec& vu : up.vertices()) {
      Vec abu = ax + sys.B * vu;
      for (const Vec& vw : sys.W.vertices()) pts.push_back(abu + vw);
    }
  }
  return Polytope::from_points(n, pts);
}

Region out_region(const LinearStochasticSystem& sys) {
  Polytope reach = post(sys, sys.X, sys.U);
  return region_difference(Region::from_polytope(reach),
                           Region::from_polytope(sys.X));
}

Polytope control_to(const LinearStochasticSystem& sys, const Polytope& xi,
                    const Polytope& xp) {
  const int m = sys.control_dim();
  if (xi.is_empty() || xp.is_empty()) return Polytope::empty(m);
  // hull{ v_Xp - (A v_Xi + v_W) }
  std::vector<Vec> pts;
  for (const Vec& vp : xp.vertices()) {
    for (const Vec& vi : xi.vertices()) {
      Vec base = vp - sys.A * vi;
      for (const Vec& vw : sys.W.vertices()) pts.push_back(base - vw);
    }
  }
  Polytope y = Polytope::from_points(sys.state_dim(), pts);
  if (y.is_empty()) return Polytope::empty(m);
  return backproject_through(sys.B, sys.U, y.halfspaces());
}

std::vector<ActionPolytope> action_polytopes(const LinearStochasticSystem& sys,
                                             const Partition& part, CellId i) {
  if (part.is_out(i))
    throw std::invalid_argument("action_polytopes: out-cells have no actions");
  const Polytope& xi = part.poly(i);
  const Polytope reach = post(sys, xi, sys.U);
  const double min_vol = tol::eps_vol_rel * std::max(sys.U.volume(), 1e-30);

  struct Piece {
    Polytope poly;
    IdSet dests;
  };
  std::vector<Piece> pieces{{sys.U, {}}};
  for (CellId j = 0; j < part.num_states(); ++j) {
    const Polytope& xj = part.poly(j);
    if (!bbox_overlaps(reach, xj, tol::eps_geo)) continue;
    Polytope uj = control_to(sys, xi, xj);
    if (uj.is_empty()) continue;
    std::vector<Piece> next;
    next.reserve(pieces.size() * 2);
    for (auto& piece : pieces) {
      Polytope in = intersect(piece.poly, uj);
      Region outp = region_difference(Region::from_polytope(piece.poly),
                                      std::vector<Polytope>{uj});
      if (!in.is_empty() && in.volume() > min_vol) {
        IdSet d = piece.dests;
        d.push_back(j);
        next.push_back({std::move(in), std::move(d)});
      }
      for (const auto& op : outp.parts())
        if (op.volume() > min_vol) next.push_back({op, piece.dests});
    }
    pieces = std::move(next);
  }

  std::map<IdSet, Region> grouped;
  for (auto& piece : pieces) {
    if (piece.dests.empty()) continue;  // boundary sliver, cannot be realized
    auto [it, inserted] =
        grouped.try_emplace(piece.dests, Region(sys.control_dim()));
    it->second.add(piece.poly);
  }
  std::vector<ActionPolytope> out;
  out.reserve(grouped.size());
  for (auto& [dests, region] : grouped)
    out.push_back({i, dests, std::move(region)});
  return out;
}

Region pre(const LinearStochasticSystem& sys, const Polytope& xp,
           const Region& up, const Region& targets) {
  Region out(sys.state_dim());
  if (xp.is_empty()) return out;
  // reachable bounding box of A*Xp + B*Up + W for target prefiltering
  const int n = sys.state_dim();
  Vec rlo = Vec::Constant(n, std::numeric_limits<double>::infinity());
  Vec rhi = -rlo;
  for (const Vec& vx : xp.vertices()) {
    Vec ax = sys.A * vx;
    rlo = rlo.cwiseMin(ax);
    rhi = rhi.cwiseMax(ax);
  }
  Vec blo = Vec::Constant(n, std::numeric_limits<double>::infinity());
  Vec bhi = -blo;
  for (const auto& ul : up.parts())
    for (const Vec& vu : ul.vertices()) {
      Vec bu = sys.B * vu;
      blo = blo.cwiseMin(bu);
      bhi = bhi.cwiseMax(bu);
    }
  Vec wlo, whi;
  sys.W.bounding_box(wlo, whi);
  rlo += blo + wlo;
  rhi += bhi + whi;
  for (const auto& t : targets.parts()) {
    Vec tlo, thi;
    t.bounding_box(tlo, thi);
    bool far = false;
    for (int i = 0; i < n; ++i)
      if (tlo[i] > rhi[i] + tol::eps_geo || rlo[i] > thi[i] + tol::eps_geo)
        far = true;
    if (far) continue;
    for (const auto& ul : up.parts()) {
      // hull{ v_T - (B v_U + v_W) }
      std::vector<Vec> pts;
      for (const Vec& vt : t.vertices()) {
        for (const Vec& vu : ul.vertices()) {
          Vec base = vt - sys.B * vu;
          for (const Vec& vw : sys.W.vertices()) pts.push_back(base - vw);
        }
      }
      Polytope y = Polytope::from_points(sys.state_dim(), pts);
      if (y.is_empty()) continue;
      Polytope piece = backproject_through(sys.A, xp, y.halfspaces());
      add_disjoint(out, piece);
    }
  }
  return out;
}

namespace {

/* PreR with the complement of the target union already computed */
Region preR_with_complement(const LinearStochasticSystem& sys,
                            const Polytope& xp, const Region& up,
                            const std::vector<Polytope>& complement) {
  Region z = forward_zsets(sys, xp, up);
  Polytope negw = negated(sys.W);
  std::vector<Polytope> shifted;
  for (const auto& p : complement) {
    if (p.is_empty()) continue;
    Polytope sp = minkowski_sum(p, negw);
    bool near = false;
    for (const auto& zp : z.parts())
      if (bbox_overlaps(zp, sp, tol::eps_geo)) near = true;
    if (near) shifted.push_back(std::move(sp));
  }
  Region zgood = region_difference(z, shifted);
  return backproject_zparts(sys, xp, up, zgood);
}

/* Attr(T) = Xp \ PreR(universe \ T). PreR of the complement avoids exactly
 * the target parts, so the part list handed to the PreR kernel is T itself. */
Region attr_from_targets(const LinearStochasticSystem& sys, const Polytope& xp,
                         const Region& up,
                         const std::vector<Polytope>& targets) {
  Region pr = preR_with_complement(sys, xp, up, targets);
  return region_difference(Region::from_polytope(xp), pr);
}

Region attrR_with_complement(const LinearStochasticSystem& sys,
                             const Polytope& xp, const Region& up,
                             const std::vector<Polytope>& complement) {
  Region compl_region(sys.state_dim());
  for (const auto& p : complement) compl_region.add(p);
  Region pr = pre(sys, xp, up, compl_region);
  return region_difference(Region::from_polytope(xp), pr);
}

}  // namespace

Region zsets_forward(const LinearStochasticSystem& sys, const Polytope& xp,
                     const Region& up) {
  return forward_zsets(sys, xp, up);
}

Polytope noise_shifted(const LinearStochasticSystem& sys, const Polytope& p) {
  return minkowski_sum(p, negated(sys.W));
}

Region zsets_backproject(const LinearStochasticSystem& sys, const Polytope& xp,
                         const Region& up, const Region& zgood) {
  return backproject_zparts(sys, xp, up, zgood);
}

std::vector<Polytope> zsets_backproject_raw(const LinearStochasticSystem& sys,
                                            const Polytope& xp,
                                            const Region& up,
                                            const Region& zgood) {
  return backproject_zparts_raw(sys, xp, up, zgood);
}

Region preR(const LinearStochasticSystem& sys, const Polytope& xp,
            const Region& up, const Region& targets, const Region& universe) {
  Region complement = region_difference(universe, targets);
  return preR_with_complement(
      sys, xp, up,
      std::vector<Polytope>(complement.parts().begin(),
                            complement.parts().end()));
}

Region preP(const LinearStochasticSystem& sys, const Polytope& xp,
            const Region& up, const std::vector<Polytope>& parts,
            const Region& universe) {
  Region parts_region(sys.state_dim());
  for (const auto& p : parts) parts_region.add(p);
  Region complement = region_difference(universe, parts_region);

  Region z = forward_zsets(sys, xp, up);
  Polytope negw = negated(sys.W);
  std::vector<Polytope> bad;
  for (const auto& p : complement.parts()) bad.push_back(minkowski_sum(p, negw));
  Region zgood = region_difference(z, bad);
  // must additionally touch every part: z in S_j for all j
  for (const auto& p : parts) {
    if (zgood.is_empty()) break;
    zgood = intersect(zgood, minkowski_sum(p, negw));
  }
  return backproject_zparts(sys, xp, up, zgood);
}

Region attr(const LinearStochasticSystem& sys, const Polytope& xp,
            const Region& up, const Region& targets,
            const Region& /*universe*/) {
  // the universe cancels: Post(Xp,Up) never leaves it, so "avoid the
  // complement of the complement" reduces to avoiding the targets
  return attr_from_targets(sys, xp, up, targets.parts());
}

Region attrR(const LinearStochasticSystem& sys, const Polytope& xp,
             const Region& up, const Region& targets, const Region& universe) {
  Region complement = region_difference(universe, targets);
  return attrR_with_complement(
      sys, xp, up,
      std::vector<Polytope>(complement.parts().begin(),
                            complement.parts().end()));
}

Region preR_cells(const LinearStochasticSystem& sys, const Partition& part,
                  const Polytope& xp, const Region& up, const IdSet& ids) {
  return preR_with_complement(sys, xp, up,
                              polys_of(part, all_other_ids(part, ids)));
}

Region attr_cells(const LinearStochasticSystem& sys, const Partition& part,
                  const Polytope& xp, const Region& up, const IdSet& ids) {
  return attr_from_targets(sys, xp, up, polys_of(part, ids));
}

Region attrR_cells(const LinearStochasticSystem& sys, const Partition& part,
                   const Polytope& xp, const Region& up, const IdSet& ids) {
  return attrR_with_complement(sys, xp, up,
                               polys_of(part, all_other_ids(part, ids)));
}

SupportCache make_support_cache(const LinearStochasticSystem& sys,
                                const Partition& part) {
  SupportCache cache;
  Polytope negw = negated(sys.W);
  cache.shifted.reserve(part.num_states());
  for (CellId id = 0; id < part.num_states(); ++id)
    cache.shifted.push_back(minkowski_sum(part.poly(id), negw));
  return cache;
}

std::vector<IdSet> supports(const LinearStochasticSystem& sys,
                            const Partition& part, CellId i,
                            const ActionPolytope& act,
                            const SupportCache& cache) {
  const Polytope& xi = part.poly(i);
  Region z = forward_zsets(sys, xi, act.region);
  const double min_vol = tol::eps_vol_rel * std::max(z.volume(), 1e-30);

  // remove every z whose noise ball can leave the destination union
  std::vector<Polytope> bad;
  for (CellId j = 0; j < part.num_states(); ++j) {
    if (std::binary_search(act.dests.begin(), act.dests.end(), j)) continue;
    bool near = false;
    for (const auto& zp : z.parts())
      if (bbox_overlaps(zp, cache.shifted[j], tol::eps_geo)) near = true;
    if (near) bad.push_back(cache.shifted[j]);
  }
  Region zok = region_difference(z, bad);

  struct Piece {
    Polytope poly;
    IdSet label;
  };
  std::vector<Piece> pieces;
  for (const auto& p : zok.parts()) pieces.push_back({p, {}});
  for (CellId j : act.dests) {
    const Polytope& sj = cache.shifted[j];
    std::vector<Piece> next;
    for (auto& piece : pieces) {
      Polytope in = intersect(piece.poly, sj);
      Region outp = region_difference(Region::from_polytope(piece.poly),
                                      std::vector<Polytope>{sj});
      if (!in.is_empty() && in.volume() > min_vol) {
        IdSet l = piece.label;
        l.push_back(j);
        next.push_back({std::move(in), std::move(l)});
      }
      for (const auto& op : outp.parts())
        if (op.volume() > min_vol) next.push_back({op, piece.label});
    }
    pieces = std::move(next);
  }

  std::vector<IdSet> out;
  for (auto& piece : pieces)
    if (!piece.label.empty()) out.push_back(piece.label);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<IdSet> supports(const LinearStochasticSystem& sys,
                            const Partition& part, CellId i,
                            const ActionPolytope& act) {
  SupportCache cache = make_support_cache(sys, part);
  return supports(sys, part, i, act, cache);
}

Vec sample_uniform(const Polytope& p, std::mt19937_64& rng) {
  if (p.is_empty()) throw std::logic_error("sample_uniform: empty polytope");
  Vec lo, hi;
  p.bounding_box(lo, hi);
  const int dim = p.dim();
  auto unit = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1)
  };
  for (;;) {
    Vec x(dim);
    for (int i = 0; i < dim; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * unit();
    if (p.contains(x)) return x;
  }
}

}  // namespace sgsynth
