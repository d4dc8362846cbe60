/*
 * sysdyn.hpp
 *
 * Discrete-time linear stochastic system x' = Ax + Bu + w with polytopic
 * state/control/noise sets, the posterior/predecessor/attractor operator
 * family, predicate partitions, control-input action polytopes and
 * distribution supports.
 */

#ifndef SGSYNTH_SYSDYN_HPP_
#define SGSYNTH_SYSDYN_HPP_

#include <cstdint>
#include <optional>
#include <random>

#include "sgsynth/geometry.hpp"

namespace sgsynth {

struct LinearStochasticSystem {
  Mat A;        // N x N
  Mat B;        // N x M
  Polytope X;   // state space, subset of R^N
  Polytope U;   // control space, subset of R^M
  Polytope W;   // noise support, subset of R^N

  int state_dim() const { return static_cast<int>(A.rows()); }
  int control_dim() const { return static_cast<int>(B.cols()); }
  /* throws std::invalid_argument on inconsistent dimensions or empty sets */
  void validate() const;
};

/* linear predicate c.x <= d */
struct Predicate {
  Vec c;
  double d = 0.0;
};
using PredicateSet = std::vector<Predicate>;

using CellId = int;
using IdSet = std::vector<CellId>;  // always kept sorted ascending
using Letter = std::uint32_t;       // bit k set <=> predicate k true

/* Indexed polytopic partition of the state space X plus the polytopic
 * decomposition of the one-step outer reachable set X_out. State ids:
 * interior cells first (0..n-1), out parts after (n..n+m-1). */
class Partition {
 public:
  struct Cell {
    CellId id = 0;
    Polytope poly;
    Letter label = 0;
  };

  Partition() = default;
  Partition(const Polytope& state_space, PredicateSet preds,
            std::vector<Polytope> interior, std::vector<Polytope> out);

  /* initial partition induced by the predicate hyperplanes, with the
   * canonical decomposition of Post(X,U) \ X as out parts */
  static Partition initial(const LinearStochasticSystem& sys,
                           const PredicateSet& preds);

  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Cell>& out_parts() const { return out_parts_; }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_states() const {
    return static_cast<int>(cells_.size() + out_parts_.size());
  }
  bool is_out(CellId id) const { return id >= num_cells(); }
  const Polytope& poly(CellId id) const;
  Letter label(CellId id) const;
  const PredicateSet& predicates() const { return preds_; }
  const Polytope& state_space() const { return state_space_; }

  /* first state (interior before out, ascending id) containing x */
  std::optional<CellId> locate(const Vec& x) const;

  /* all ids whose label matches the given positive/negative literals */
  IdSet cells_matching(const IdSet& pos, const IdSet& neg) const;

  double coverage_volume() const;  // sum of interior cell volumes

 private:
  Polytope state_space_;
  PredicateSet preds_;
  std::vector<Cell> cells_;
  std::vector<Cell> out_parts_;
};

/* Equivalence class of control inputs: applying any u in `region` from
 * cell `source` can reach exactly the cells listed in `dests`. */
struct ActionPolytope {
  CellId source = 0;
  IdSet dests;    // J
  Region region;  // U_i^J, a finite union of polytopes in U
};

Letter eval_letter(const PredicateSet& preds, const Vec& x);

/* --- polytopic operators ------------------------------------------------ */

/* Post(X',U') = A X' + B U' + W */
Polytope post(const LinearStochasticSystem& sys, const Polytope& xp,
              const Polytope& up);

/* Post(X,U) \ X under the canonical splitting order */
Region out_region(const LinearStochasticSystem& sys);

/* U^{Xi->Xp}: control inputs that reach Xp from Xi with positive
 * probability */
Polytope control_to(const LinearStochasticSystem& sys, const Polytope& xi,
                    const Polytope& xp);

/* all nonempty U_i^J of a cell, found by arrangement splitting of U
 * against the U^{Xi->Xj} boundaries (never a blind subset enumeration) */
std::vector<ActionPolytope> action_polytopes(const LinearStochasticSystem& sys,
                                             const Partition& part, CellId i);

/* Pre: exists u such that Post(x,u) intersects the target union */
Region pre(const LinearStochasticSystem& sys, const Polytope& xp,
           const Region& up, const Region& targets);

/* PreR: exists u with Post(x,u) inside the target union; complement taken
 * against `universe` (normally X together with X_out) */
Region preR(const LinearStochasticSystem& sys, const Polytope& xp,
            const Region& up, const Region& targets, const Region& universe);

/* PreP: exists u with Post(x,u) inside the part union and touching every
 * part */
Region preP(const LinearStochasticSystem& sys, const Polytope& xp,
            const Region& up, const std::vector<Polytope>& parts,
            const Region& universe);

/* Attr: every u hits the target union with positive probability */
Region attr(const LinearStochasticSystem& sys, const Polytope& xp,
            const Region& up, const Region& targets, const Region& universe);

/* AttrR: every u keeps Post(x,u) inside the target union */
Region attrR(const LinearStochasticSystem& sys, const Polytope& xp,
             const Region& up, const Region& targets, const Region& universe);

/* Player-2 supports: all J' subsets of the action's destination set with a
 * nonempty precise predecessor, enumerated through the Z-set arrangement */
std::vector<IdSet> supports(const LinearStochasticSystem& sys,
                            const Partition& part, CellId i,
                            const ActionPolytope& act);

/* shifted cells S_j = X_j + (-W), shared across supports() calls */
struct SupportCache {
  std::vector<Polytope> shifted;  // indexed by state id
};
SupportCache make_support_cache(const LinearStochasticSystem& sys,
                                const Partition& part);
std::vector<IdSet> supports(const LinearStochasticSystem& sys,
                            const Partition& part, CellId i,
                            const ActionPolytope& act,
                            const SupportCache& cache);

/* Z-set kernel pieces (shared by the robust operators and the incremental
 * baseline fixed points): the forward set A*Xp + B*Ul per control part, the
 * noise-shifted polytope P + (-W), and the back-projection
 * {x in Xp | exists u in Ul: Ax + Bu in Zl} over all (l, Z-part) pairs. */
Region zsets_forward(const LinearStochasticSystem& sys, const Polytope& xp,
                     const Region& up);
Polytope noise_shifted(const LinearStochasticSystem& sys, const Polytope& p);
Region zsets_backproject(const LinearStochasticSystem& sys, const Polytope& xp,
                         const Region& up, const Region& zgood);
/* the same pieces without disjointification (they may overlap) */
std::vector<Polytope> zsets_backproject_raw(const LinearStochasticSystem& sys,
                                            const Polytope& xp,
                                            const Region& up,
                                            const Region& zgood);

/* partition-aware variants: targets given as state ids, complement taken
 * over the remaining states (exact for a partition, no set difference) */
Region preR_cells(const LinearStochasticSystem& sys, const Partition& part,
                  const Polytope& xp, const Region& up, const IdSet& ids);
Region attr_cells(const LinearStochasticSystem& sys, const Partition& part,
                  const Polytope& xp, const Region& up, const IdSet& ids);
Region attrR_cells(const LinearStochasticSystem& sys, const Partition& part,
                   const Polytope& xp, const Region& up, const IdSet& ids);

/* uniform sample on a polytope by rejection from its bounding box */
Vec sample_uniform(const Polytope& p, std::mt19937_64& rng);

}  // namespace sgsynth

#endif  // SGSYNTH_SYSDYN_HPP_
