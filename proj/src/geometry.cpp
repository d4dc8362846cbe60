/*
 * geometry.cpp
 *
 * Incremental (beneath-beyond) convex hull for the V->H direction and
 * basis-combination vertex enumeration for H->V. Dimension is generic;
 * the toolchain exercises N = 1..3.
 */

#include "sgsynth/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace sgsynth {

namespace {

bool lex_less(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - tol::eps_geo) return true;
    if (a[i] > b[i] + tol::eps_geo) return false;
  }
  return false;
}

void sort_points_lex(std::vector<Vec>& pts) {
  std::sort(pts.begin(), pts.end(), lex_less);
}

std::vector<Vec> dedup_points(const std::vector<Vec>& pts, double eps) {
  std::vector<Vec> out;
  for (const Vec& p : pts) {
    bool dup = false;
    for (const Vec& q : out) {
      if ((p - q).lpNorm<Eigen::Infinity>() <= eps) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(p);
  }
  return out;
}

/* simplicial facet of the incremental hull */
struct Facet {
  std::vector<int> verts;  // N point indices, sorted
  Vec normal;              // outward unit normal
  double offset = 0.0;     // normal.x <= offset inside
};

/* unit normal of the hyperplane through N points; empty optional when the
 * points are affinely dependent */
std::optional<Vec> hyperplane_normal(const std::vector<Vec>& pts,
                                     const std::vector<int>& idx) {
  const int n = static_cast<int>(pts[idx[0]].size());
  Mat m(static_cast<int>(idx.size()) - 1, n);
  for (std::size_t i = 1; i < idx.size(); ++i)
    m.row(static_cast<int>(i) - 1) = (pts[idx[i]] - pts[idx[0]]).transpose();
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  if (n >= 2 && idx.size() >= 2) {
    // affine dependence check: second-smallest singular value of the edge
    // matrix must be bounded away from zero relative to the largest
    const auto& sv = svd.singularValues();
    if (sv.size() >= n - 1) {
      double smax = sv.size() > 0 ? sv[0] : 0.0;
      if (sv.size() == n - 1 && sv[n - 2] <= 1e-10 * std::max(1.0, smax))
        return std::nullopt;
    }
  }
  Vec normal = svd.matrixV().col(n - 1);
  double len = normal.norm();
  if (len < 1e-12) return std::nullopt;
  return Vec(normal / len);
}

/* greedy affinely-independent seed selection; returns indices or empty if
 * the affine rank of the point set is below dim */
std::vector<int> affine_seed(const std::vector<Vec>& pts, int dim,
                             double scale) {
  std::vector<int> seed;
  seed.push_back(0);
  Mat basis(dim, 0);  // orthonormal directions spanned so far
  while (static_cast<int>(seed.size()) < dim + 1) {
    int best = -1;
    double best_res = 0.0;
    Vec best_dir;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      Vec d = pts[i] - pts[seed[0]];
      Vec r = d - basis * (basis.transpose() * d);
      double res = r.norm();
      if (res > best_res) {
        best_res = res;
        best = i;
        best_dir = r / res;
      }
    }
    if (best < 0 || best_res <= 1e-9 * std::max(1.0, scale)) return {};
    seed.push_back(best);
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = best_dir;
  }
  return seed;
}

double point_scale(const std::vector<Vec>& pts) {
  double s = 0.0;
  for (const Vec& p : pts) s = std::max(s, p.lpNorm<Eigen::Infinity>());
  return s;
}

/* full incremental hull; returns simplicial facets (empty when the input
 * is not full-dimensional) */
std::vector<Facet> hull_facets(const std::vector<Vec>& pts, int dim) {
  const double scale = std::max(1.0, point_scale(pts));
  const double eps_vis = 1e-9 * scale;

  if (dim == 1) {
    int lo = 0, hi = 0;
    for (int i = 1; i < static_cast<int>(pts.size()); ++i) {
      if (pts[i][0] < pts[lo][0]) lo = i;
      if (pts[i][0] > pts[hi][0]) hi = i;
    }
    if (pts[hi][0] - pts[lo][0] <= eps_vis) return {};
    Facet f1{{lo}, Vec::Constant(1, -1.0), -pts[lo][0]};
    Facet f2{{hi}, Vec::Constant(1, 1.0), pts[hi][0]};
    return {f1, f2};
  }

  std::vector<int> seed = affine_seed(pts, dim, scale);
  if (seed.empty()) return {};

  Vec interior = Vec::Zero(dim);
  for (int s : seed) interior += pts[s];
  interior /= static_cast<double>(seed.size());

  auto make_facet = [&](std::vector<int> vs) -> std::optional<Facet> {
    std::sort(vs.begin(), vs.end());
    auto n = hyperplane_normal(pts, vs);
    if (!n) return std::nullopt;
    double off = n->dot(pts[vs[0]]);
    if (n->dot(interior) > off) {  // orient outward
      *n = -*n;
      off = -off;
    }
    return Facet{std::move(vs), *n, off};
  };

  std::vector<Facet> facets;
  for (int skip = 0; skip < static_cast<int>(seed.size()); ++skip) {
    std::vector<int> vs;
    for (int i = 0; i < static_cast<int>(seed.size()); ++i)
      if (i != skip) vs.push_back(seed[i]);
    auto f = make_facet(vs);
    if (!f) return {};  // degenerate seed simplex
    facets.push_back(*f);
  }

  for (int p = 0; p < static_cast<int>(pts.size()); ++p) {
    if (std::find(seed.begin(), seed.end(), p) != seed.end()) continue;
    std::vector<int> visible;
    for (int f = 0; f < static_cast<int>(facets.size()); ++f)
      if (facets[f].normal.dot(pts[p]) - facets[f].offset > eps_vis)
        visible.push_back(f);
    if (visible.empty()) continue;

    // horizon ridges: (N-1)-subsets occurring in exactly one visible facet
    std::map<std::vector<int>, int> ridge_count;
    for (int f : visible) {
      const auto& vs = facets[f].verts;
      for (std::size_t skip = 0; skip < vs.size(); ++skip) {
        std::vector<int> ridge;
        for (std::size_t i = 0; i < vs.size(); ++i)
          if (i != skip) ridge.push_back(vs[i]);
        ridge_count[ridge]++;
      }
    }
    std::vector<Facet> next;
    std::vector<char> is_visible(facets.size(), 0);
    for (int f : visible) is_visible[f] = 1;
    for (std::size_t f = 0; f < facets.size(); ++f)
      if (!is_visible[f]) next.push_back(facets[f]);
    for (const auto& [ridge, cnt] : ridge_count) {
      if (cnt != 1) continue;
      std::vector<int> vs = ridge;
      vs.push_back(p);
      auto nf = make_facet(std::move(vs));
      if (nf) next.push_back(*nf);
    }
    facets = std::move(next);
  }
  return facets;
}

bool halfspace_lt(const Halfspace& a, const Halfspace& b) {
  const int n = static_cast<int>(a.normal.size());
  if (n == 2) {
    double aa = std::atan2(a.normal[1], a.normal[0]);
    double ab = std::atan2(b.normal[1], b.normal[0]);
    if (aa < ab - 1e-12) return true;
    if (aa > ab + 1e-12) return false;
    return a.offset < b.offset - tol::eps_geo;
  }
  for (int i = 0; i < n; ++i) {
    if (a.normal[i] < b.normal[i] - tol::eps_geo) return true;
    if (a.normal[i] > b.normal[i] + tol::eps_geo) return false;
  }
  return a.offset < b.offset - tol::eps_geo;
}

std::vector<Halfspace> dedup_halfspaces(std::vector<Halfspace> hs) {
  std::sort(hs.begin(), hs.end(), halfspace_lt);
  std::vector<Halfspace> out;
  for (const auto& h : hs) {
    bool dup = false;
    for (const auto& g : out) {
      if ((h.normal - g.normal).lpNorm<Eigen::Infinity>() <= 1e-8 &&
          std::abs(h.offset - g.offset) <= 1e-8) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(h);
  }
  return out;
}

}  // namespace

void Polytope::finalize_from_vertex_hull(int dim,
                                         const std::vector<Vec>& raw) {
  dim_ = dim;
  empty_ = true;
  volume_ = 0.0;
  vertices_.clear();
  halfspaces_.clear();

  std::vector<Vec> pts = dedup_points(raw, tol::eps_geo);
  if (static_cast<int>(pts.size()) < dim + 1) return;
  sort_points_lex(pts);

  std::vector<Facet> facets = hull_facets(pts, dim);
  if (facets.empty()) return;

  // vertices: points referenced by some facet
  std::vector<char> used(pts.size(), 0);
  for (const auto& f : facets)
    for (int v : f.verts) used[v] = 1;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (used[i]) vertices_.push_back(pts[i]);
  sort_points_lex(vertices_);

  // volume by the simplicial cone decomposition from the vertex centroid
  Vec c = Vec::Zero(dim);
  for (const Vec& v : vertices_) c += v;
  c /= static_cast<double>(vertices_.size());
  double vol = 0.0;
  double fact = 1.0;
  for (int i = 2; i <= dim; ++i) fact *= i;
  for (const auto& f : facets) {
    Mat m(dim, dim);
    for (int i = 0; i < dim; ++i) m.col(i) = pts[f.verts[i]] - c;
    vol += std::abs(m.determinant()) / fact;
  }
  volume_ = vol;

  std::vector<Halfspace> hs;
  hs.reserve(facets.size());
  for (const auto& f : facets) hs.push_back({f.normal, f.offset});
  halfspaces_ = dedup_halfspaces(std::move(hs));
  empty_ = false;
}

Polytope Polytope::from_points(int dim, const std::vector<Vec>& pts) {
  for (const Vec& p : pts)
    if (static_cast<int>(p.size()) != dim)
      throw std::invalid_argument("from_points: mixed dimensions");
  Polytope p;
  p.finalize_from_vertex_hull(dim, pts);
  if (p.empty_) p.dim_ = dim;
  return p;
}

Polytope Polytope::from_halfspaces(int dim, const std::vector<Halfspace>& in) {
  for (const auto& h : in)
    if (static_cast<int>(h.normal.size()) != dim)
      throw std::invalid_argument("from_halfspaces: mixed dimensions");

  // normalize and drop trivial/infeasible zero-normal rows
  std::vector<Halfspace> hs;
  for (const auto& h : in) {
    double len = h.normal.norm();
    if (len <= tol::eps_geo) {
      if (h.offset < -tol::eps_geo) return Polytope::empty(dim);  // 0 <= k < 0
      continue;
    }
    hs.push_back({h.normal / len, h.offset / len});
  }
  hs = dedup_halfspaces(std::move(hs));

  std::vector<Vec> verts;
  const int m = static_cast<int>(hs.size());
  if (m < dim) return Polytope::empty(dim);

  std::vector<int> comb(dim);
  for (int i = 0; i < dim; ++i) comb[i] = i;
  auto advance = [&]() -> bool {
    int i = dim - 1;
    while (i >= 0 && comb[i] == m - dim + i) --i;
    if (i < 0) return false;
    ++comb[i];
    for (int j = i + 1; j < dim; ++j) comb[j] = comb[j - 1] + 1;
    return true;
  };
  do {
    Mat a(dim, dim);
    Vec b(dim);
    for (int i = 0; i < dim; ++i) {
      a.row(i) = hs[comb[i]].normal.transpose();
      b[i] = hs[comb[i]].offset;
    }
    Eigen::FullPivLU<Mat> lu(a);
    if (lu.rank() < dim) continue;
    Vec x = lu.solve(b);
    bool feas = true;
    for (const auto& h : hs) {
      if (h.normal.dot(x) > h.offset + tol::eps_feas) {
        feas = false;
        break;
      }
    }
    if (feas) verts.push_back(x);
  } while (advance());

  Polytope p;
  p.finalize_from_vertex_hull(dim, verts);
  if (p.empty_) p.dim_ = dim;
  return p;
}

Polytope Polytope::box(const Vec& lo, const Vec& hi) {
  const int dim = static_cast<int>(lo.size());
  std::vector<Vec> pts;
  const int corners = 1 << dim;
  for (int mask = 0; mask < corners; ++mask) {
    Vec p(dim);
    for (int i = 0; i < dim; ++i) p[i] = (mask >> i & 1) ? hi[i] : lo[i];
    pts.push_back(p);
  }
  return from_points(dim, pts);
}

Polytope Polytope::empty(int dim) {
  Polytope p;
  p.dim_ = dim;
  return p;
}

bool Polytope::contains(const Vec& x, double eps) const {
  if (empty_) return false;
  for (const auto& h : halfspaces_)
    if (h.normal.dot(x) > h.offset + eps) return false;
  return true;
}

double Polytope::support(const Vec& d) const {
  if (empty_) return -std::numeric_limits<double>::infinity();
  double s = -std::numeric_limits<double>::infinity();
  for (const Vec& v : vertices_) s = std::max(s, d.dot(v));
  return s;
}

Vec Polytope::centroid() const {
  Vec c = Vec::Zero(dim_);
  if (vertices_.empty()) return c;
  for (const Vec& v : vertices_) c += v;
  return c / static_cast<double>(vertices_.size());
}

void Polytope::bounding_box(Vec& lo, Vec& hi) const {
  lo = Vec::Constant(dim_, std::numeric_limits<double>::infinity());
  hi = Vec::Constant(dim_, -std::numeric_limits<double>::infinity());
  for (const Vec& v : vertices_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
}

/* The Chebyshev problem max{r : n_i.x + r <= k_i, r >= 0} is itself a
 * bounded polytope in (x, r) space; its max-r vertex is a center of the
 * largest inscribed ball. Reuses the vertex enumeration machinery instead
 * of a dedicated LP. */
Vec Polytope::chebyshev_center() const {
  if (empty_) throw std::logic_error("chebyshev_center of empty polytope");
  std::vector<Halfspace> lifted;
  for (const auto& h : halfspaces_) {
    Vec n(dim_ + 1);
    n.head(dim_) = h.normal;
    n[dim_] = 1.0;
    lifted.push_back({n, h.offset});
  }
  Vec rn = Vec::Zero(dim_ + 1);
  rn[dim_] = -1.0;
  lifted.push_back({rn, 0.0});
  Polytope l = Polytope::from_halfspaces(dim_ + 1, lifted);
  const std::vector<Vec>* cand = &l.vertices_;
  std::vector<Vec> fallback;
  if (l.is_empty()) {
    // numerically thin lift; fall back to the centroid
    fallback.push_back((Vec(dim_ + 1) << centroid(), 0.0).finished());
    cand = &fallback;
  }
  Vec best = (*cand)[0];
  for (const Vec& v : *cand) {
    if (v[dim_] > best[dim_] + tol::eps_geo ||
        (v[dim_] > best[dim_] - tol::eps_geo &&
         lex_less(v.head(dim_), best.head(dim_))))
      best = v;
  }
  return best.head(dim_);
}

double Polytope::chebyshev_radius() const {
  if (empty_) return 0.0;
  Vec c = chebyshev_center();
  double r = std::numeric_limits<double>::infinity();
  for (const auto& h : halfspaces_) r = std::min(r, h.offset - h.normal.dot(c));
  return std::max(0.0, r);
}

Polytope Polytope::cut(const Halfspace& h) const {
  if (empty_) return *this;
  // quick accept/reject against the vertex set
  double mx = -std::numeric_limits<double>::infinity();
  double mn = std::numeric_limits<double>::infinity();
  for (const Vec& v : vertices_) {
    double d = h.normal.dot(v) - h.offset;
    mx = std::max(mx, d);
    mn = std::min(mn, d);
  }
  double len = h.normal.norm();
  if (mx <= tol::eps_geo * std::max(1.0, len)) return *this;
  if (mn >= -tol::eps_geo * std::max(1.0, len)) return Polytope::empty(dim_);
  std::vector<Halfspace> hs = halfspaces_;
  hs.push_back(h);
  return from_halfspaces(dim_, hs);
}

/* --- Region ------------------------------------------------------------ */

Region::Region(int dim, std::vector<Polytope> parts) : dim_(dim) {
  for (auto& p : parts)
    if (!p.is_empty()) parts_.push_back(std::move(p));
}

Region Region::from_polytope(const Polytope& p) {
  Region r(p.dim());
  r.add(p);
  return r;
}

double Region::volume() const {
  double v = 0.0;
  for (const auto& p : parts_) v += p.volume();
  return v;
}

bool Region::contains(const Vec& x, double eps) const {
  for (const auto& p : parts_)
    if (p.contains(x, eps)) return true;
  return false;
}

void Region::add(const Polytope& p) {
  if (p.is_empty()) return;
  if (parts_.empty()) dim_ = p.dim();
  parts_.push_back(p);
}

/* --- free operations ---------------------------------------------------- */

Polytope hull(const std::vector<Vec>& points) {
  if (points.empty()) throw std::invalid_argument("hull: no points");
  return Polytope::from_points(static_cast<int>(points[0].size()), points);
}

std::vector<Halfspace> to_hrep(const Polytope& p) { return p.halfspaces(); }
std::vector<Vec> to_vrep(const Polytope& p) { return p.vertices(); }

Polytope intersect(const Polytope& p, const Polytope& q) {
  if (p.dim() != q.dim())
    throw std::invalid_argument("intersect: dimension mismatch");
  if (p.is_empty() || q.is_empty()) return Polytope::empty(p.dim());
  // bounding-box prefilter
  Vec plo, phi, qlo, qhi;
  p.bounding_box(plo, phi);
  q.bounding_box(qlo, qhi);
  for (int i = 0; i < p.dim(); ++i)
    if (plo[i] > qhi[i] + tol::eps_geo || qlo[i] > phi[i] + tol::eps_geo)
      return Polytope::empty(p.dim());
  std::vector<Halfspace> hs = p.halfspaces();
  const auto& qh = q.halfspaces();
  hs.insert(hs.end(), qh.begin(), qh.end());
  return Polytope::from_halfspaces(p.dim(), hs);
}

Polytope minkowski_sum(const Polytope& p, const Polytope& q) {
  if (p.dim() != q.dim())
    throw std::invalid_argument("minkowski_sum: dimension mismatch");
  if (p.is_empty() || q.is_empty()) return Polytope::empty(p.dim());
  std::vector<Vec> sums;
  sums.reserve(p.vertices().size() * q.vertices().size());
  for (const Vec& a : p.vertices())
    for (const Vec& b : q.vertices()) sums.push_back(a + b);
  return Polytope::from_points(p.dim(), sums);
}

Polytope linear_image(const Mat& m, const Polytope& p) {
  if (p.is_empty()) return Polytope::empty(static_cast<int>(m.rows()));
  std::vector<Vec> pts;
  pts.reserve(p.vertices().size());
  for (const Vec& v : p.vertices()) pts.push_back(m * v);
  return Polytope::from_points(static_cast<int>(m.rows()), pts);
}

namespace {

/* split one convex piece against one subtrahend polytope: emits the pieces
 * of `piece \ q` (kept) and discards piece & q */
void subtract_polytope(const Polytope& piece, const Polytope& q,
                       std::vector<Polytope>& out) {
  // disjoint bounding boxes: nothing removed
  Vec plo, phi, qlo, qhi;
  piece.bounding_box(plo, phi);
  q.bounding_box(qlo, qhi);
  bool disjoint = false;
  for (int i = 0; i < piece.dim() && !disjoint; ++i)
    if (plo[i] > qhi[i] - tol::eps_geo || qlo[i] > phi[i] - tol::eps_geo)
      disjoint = true;
  if (disjoint) {
    out.push_back(piece);
    return;
  }
  Polytope inside = piece;
  const double vol_floor = tol::eps_vol_rel * std::max(piece.volume(), 1e-30);
  for (const auto& h : q.halfspaces()) {
    if (inside.is_empty()) break;
    Halfspace flipped{-h.normal, -h.offset};
    Polytope outside = inside.cut(flipped);
    if (!outside.is_empty() && outside.volume() > vol_floor)
      out.push_back(outside);
    inside = inside.cut(h);
    if (!inside.is_empty() && inside.volume() <= vol_floor)
      inside = Polytope::empty(piece.dim());
  }
  // whatever remains lies inside q and is dropped
}

}  // namespace

Region region_difference(const Region& r1, const std::vector<Polytope>& sub) {
  Region out(r1.dim());
  for (const auto& part : r1.parts()) {
    std::vector<Polytope> pieces{part};
    for (const auto& q : sub) {
      if (q.is_empty()) continue;
      std::vector<Polytope> next;
      for (const auto& piece : pieces) subtract_polytope(piece, q, next);
      pieces = std::move(next);
      if (pieces.empty()) break;
    }
    for (auto& piece : pieces) out.add(piece);
  }
  return out;
}

Region region_difference(const Region& r1, const Region& r2) {
  if (!r1.is_empty() && !r2.is_empty() && r1.dim() != r2.dim())
    throw std::invalid_argument("region_difference: dimension mismatch");
  return region_difference(r1, r2.parts());
}

Region region_difference(const Polytope& p, const Region& r2) {
  return region_difference(Region::from_polytope(p), r2);
}

void add_disjoint(Region& acc, const Polytope& p) {
  if (p.is_empty()) return;
  Region extra = region_difference(Region::from_polytope(p), acc.parts());
  for (const auto& part : extra.parts()) acc.add(part);
}

double volume(const Polytope& p) { return p.volume(); }
bool contains(const Polytope& p, const Vec& x) { return p.contains(x); }

Region intersect(const Region& r, const Polytope& p) {
  Region out(r.dim());
  for (const auto& part : r.parts()) out.add(intersect(part, p));
  return out;
}

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

}  // namespace sgsynth
