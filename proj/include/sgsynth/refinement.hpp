/*
 * refinement.hpp
 *
 * Positive and negative partition refinement driven by the undecided
 * product states: robust-predecessor splits towards the winning region,
 * robust-attractor splits along a gridded action region, and attractor
 * splits towards the losing region.
 */

#ifndef SGSYNTH_REFINEMENT_HPP_
#define SGSYNTH_REFINEMENT_HPP_

#include "sgsynth/abstraction.hpp"

namespace sgsynth {

enum class SplitKind {
  robust_predecessor,
  attr_robust_case1,
  attr_robust_case2,
  attr_robust_case3,
  negative_attractor,
};

const char* split_kind_name(SplitKind kind);

struct SplitDirective {
  CellId cell = 0;
  SplitKind kind = SplitKind::robust_predecessor;
  Region splitter;
  int q = 0;           // product context that generated the split
  int action = -1;     // selected action index (attractor splits)
  IdSet support;       // selected Player-2 support (attractor splits)
  IdSet target_ids;    // partition states targeted by the operator
};

struct RefinementPlan {
  std::vector<SplitDirective> splits;  // ordered per cell, then by q
  bool empty() const { return splits.empty(); }
};

/* replace each part by its intersection with and difference against the
 * splitter; a part whose inside or outside piece is negligibly thin stays
 * unsplit (the sliver merges back into its cut sibling) */
std::vector<Polytope> refine_cell(const std::vector<Polytope>& parts,
                                  const Region& splitter);

RefinementPlan positive_refine(const ProductGame& product,
                               const Classification& cls,
                               const LinearStochasticSystem& sys,
                               const Partition& part, const Nts& nts,
                               const OmegaAutomaton& aut);

RefinementPlan negative_refine(const ProductGame& product,
                               const Classification& cls,
                               const LinearStochasticSystem& sys,
                               const Partition& part, const Nts& nts,
                               const OmegaAutomaton& aut);

/* new partition after all splits; every new cell lies inside exactly one
 * old cell, out parts are carried over unchanged */
Partition apply_plan(const Partition& part, const RefinementPlan& plan);

}  // namespace sgsynth

#endif  // SGSYNTH_REFINEMENT_HPP_
