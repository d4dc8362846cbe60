/*
 * geometry.hpp
 *
 * Convex polytopes in dual V/H representation and finite unions of
 * polytopes (regions). All set computations of the toolchain reduce to
 * the operations declared here.
 */

#ifndef SGSYNTH_GEOMETRY_HPP_
#define SGSYNTH_GEOMETRY_HPP_

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace sgsynth {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/* A single tolerance governs halfspace satisfaction, vertex dedup and
 * emptiness decisions; every comparison in this module routes through it. */
namespace tol {
inline constexpr double eps_geo = 1e-9;
/* feasibility slack for vertex enumeration (absorbs conditioning of the
 * N x N solves; results are re-canonicalized through the hull afterwards) */
inline constexpr double eps_feas = 1e-7;
/* relative volume threshold under which split pieces are discarded */
inline constexpr double eps_vol_rel = 1e-9;
}  // namespace tol

/* Closed halfspace normal.x <= offset with a unit normal. */
struct Halfspace {
  Vec normal;
  double offset = 0.0;
};

/*
 * A convex polytope. Nonempty means full-dimensional: a polytope whose
 * vertex set has affine rank < N is represented as empty. Both
 * representations are computed at construction and immutable afterwards,
 * so values are freely shareable across threads.
 *
 * Canonical ordering: vertices sorted lexicographically; halfspaces sorted
 * by normal angle in 2-D (ascending atan2) and lexicographically in other
 * dimensions. Downstream set decompositions depend on this order being
 * stable.
 */
class Polytope {
 public:
  Polytope() = default;

  static Polytope from_points(int dim, const std::vector<Vec>& pts);
  static Polytope from_halfspaces(int dim, const std::vector<Halfspace>& hs);
  static Polytope box(const Vec& lo, const Vec& hi);
  static Polytope empty(int dim);

  int dim() const { return dim_; }
  bool is_empty() const { return empty_; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  double volume() const { return volume_; }

  bool contains(const Vec& x, double eps = tol::eps_geo) const;
  /* support function h_P(d) = max_{v in V} d.v; empty -> -inf */
  double support(const Vec& d) const;
  /* mean of the vertex set; interior for nonempty polytopes */
  Vec centroid() const;
  /* center of the largest inscribed ball, ties broken lexicographically */
  Vec chebyshev_center() const;
  double chebyshev_radius() const;
  void bounding_box(Vec& lo, Vec& hi) const;

  /* this intersected with one closed halfspace */
  Polytope cut(const Halfspace& h) const;

 private:
  int dim_ = 0;
  bool empty_ = true;
  double volume_ = 0.0;
  std::vector<Vec> vertices_;
  std::vector<Halfspace> halfspaces_;

  void finalize_from_vertex_hull(int dim, const std::vector<Vec>& pts);
};

/* Finite union of pairwise interior-disjoint polytopes of equal dimension.
 * An empty part list encodes the empty region. */
class Region {
 public:
  Region() = default;
  explicit Region(int dim) : dim_(dim) {}
  Region(int dim, std::vector<Polytope> parts);
  static Region from_polytope(const Polytope& p);

  int dim() const { return dim_; }
  bool is_empty() const { return parts_.empty(); }
  const std::vector<Polytope>& parts() const { return parts_; }
  std::size_t size() const { return parts_.size(); }
  double volume() const;
  bool contains(const Vec& x, double eps = tol::eps_geo) const;
  void add(const Polytope& p);

 private:
  int dim_ = 0;
  std::vector<Polytope> parts_;
};

/* --- operations ------------------------------------------------------- */

/* Convex hull with a minimal vertex set; empty if the points are affinely
 * dependent. Throws std::invalid_argument on mixed dimensions. */
Polytope hull(const std::vector<Vec>& points);

std::vector<Halfspace> to_hrep(const Polytope& p);
std::vector<Vec> to_vrep(const Polytope& p);

Polytope intersect(const Polytope& p, const Polytope& q);
Polytope minkowski_sum(const Polytope& p, const Polytope& q);
/* image under a square matrix; empty when the image collapses dimension */
Polytope linear_image(const Mat& m, const Polytope& p);

/* cl(r1 \ r2) as a region of pairwise interior-disjoint parts, computed by
 * recursive halfspace splitting against the subtrahend parts in canonical
 * (stored) order. */
Region region_difference(const Region& r1, const Region& r2);
Region region_difference(const Polytope& p, const Region& r2);
/* subtrahend given as a plain part list; the parts may overlap */
Region region_difference(const Region& r1, const std::vector<Polytope>& parts);

/* r1 followed by the pieces of p not already covered; keeps parts pairwise
 * interior-disjoint */
void add_disjoint(Region& acc, const Polytope& p);

double volume(const Polytope& p);
bool contains(const Polytope& p, const Vec& x);

Region intersect(const Region& r, const Polytope& p);

/* convenience constructors used across fixtures */
Vec vec2(double a, double b);
Vec vec3(double a, double b, double c);

}  // namespace sgsynth

#endif  // SGSYNTH_GEOMETRY_HPP_
