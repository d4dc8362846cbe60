/*
 * baselines.hpp
 *
 * Reachability baselines used for cross-validation: the two-phase
 * polytopic fixed-point computation operating directly on the system, and
 * its NTS-guided variant that refines the partition while iterating.
 * Both return the set of states from which the targets are reachable
 * almost-surely; neither produces a strategy.
 */

#ifndef SGSYNTH_BASELINES_HPP_
#define SGSYNTH_BASELINES_HPP_

#include "sgsynth/abstraction.hpp"

namespace sgsynth {

struct ReachResult {
  Region x_init;             // states reaching the targets with probability 1
  Region positive;           // phase-1 fixed point (positive probability)
  Region zero_attractor;     // phase-2 fixed point
  int phase1_iterations = 0; // growth steps until the fixed point
  int phase2_iterations = 0;
  std::vector<std::pair<int, int>> nts_sizes;  // per phase-1 pass (alg3)
  Partition partition;       // final partition (alg3)
  double wall_ms = 0.0;
};

/* two fixed points on the raw system: grow the positive-probability set
 * through Pre, then grow the zero-probability attractor from its
 * complement and the outer region; the result is the complement */
ReachResult alg1_reach(const LinearStochasticSystem& sys,
                       const Region& targets);

/* the same two phases driven by an NTS abstraction: cells not yet covered
 * by the positive set are split along their predecessors, cells whose
 * every action can leak are split along the attractor */
ReachResult alg3_nts_reach(const LinearStochasticSystem& sys,
                           const Partition& part, const IdSet& target_cells);

}  // namespace sgsynth

#endif  // SGSYNTH_BASELINES_HPP_
