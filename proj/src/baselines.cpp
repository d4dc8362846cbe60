#include "sgsynth/baselines.hpp"

#include <algorithm>
#include <chrono>

#include "sgsynth/refinement.hpp"

namespace sgsynth {

namespace {

/* region equality for nested iterates: volume stabilization plus a sampled
 * membership confirmation */
bool region_fixed(const Region& old_r, const Region& new_r, double fp_tol) {
  if (new_r.volume() - old_r.volume() > fp_tol) return false;
  std::mt19937_64 rng(1234);
  for (const auto& part : new_r.parts()) {
    for (int k = 0; k < 4; ++k) {
      Vec x = sample_uniform(part, rng);
      if (!old_r.contains(x, 1e-7)) return false;
    }
  }
  return true;
}

void absorb(Region& acc, const Region& extra) {
  for (const auto& p : extra.parts()) add_disjoint(acc, p);
}

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

bool cell_covered(const Polytope& cell, const Region& covered, double tol_vol) {
  return region_difference(cell, covered).volume() <= tol_vol;
}

}  // namespace

ReachResult alg1_reach(const LinearStochasticSystem& sys,
                       const Region& targets) {
  double t0 = now_ms();
  ReachResult res;
  const double fp_tol = 1e-9 * sys.X.volume();
  Region full_u = Region::from_polytope(sys.U);
  Region outs = out_region(sys);

  // phase 1: positive-probability backward closure. Pre distributes over
  // target unions, so each pass only expands from the previous frontier;
  // iterations count executed passes including the detecting one.
  Region positive = targets;
  Region frontier = targets;
  for (;;) {
    ++res.phase1_iterations;
    Region grown = pre(sys, sys.X, full_u, frontier);
    Region fresh = region_difference(grown, positive);
    if (fresh.volume() <= fp_tol) break;
    for (const auto& p : fresh.parts()) positive.add(p);
    frontier = std::move(fresh);
  }

  // phase 2: attractor closure of the zero-probability set. The forward
  // Z-set is fixed; newly absorbed parts only shrink its safe remainder.
  Region zero = outs;
  absorb(zero, region_difference(Region::from_polytope(sys.X), positive));
  Region zrem = zsets_forward(sys, sys.X, full_u);
  {
    std::vector<Polytope> shifted;
    shifted.reserve(zero.size());
    for (const auto& p : zero.parts()) shifted.push_back(noise_shifted(sys, p));
    zrem = region_difference(zrem, shifted);
  }
  for (;;) {
    ++res.phase2_iterations;
    // states with some control whose whole noise ball avoids `zero`
    std::vector<Polytope> safe = zsets_backproject_raw(sys, sys.X, full_u, zrem);
    Region att = region_difference(Region::from_polytope(sys.X), safe);
    Region fresh = region_difference(att, zero);
    if (fresh.volume() <= fp_tol) break;
    std::vector<Polytope> shifted;
    shifted.reserve(fresh.size());
    for (const auto& p : fresh.parts()) {
      zero.add(p);
      shifted.push_back(noise_shifted(sys, p));
    }
    zrem = region_difference(zrem, shifted);
  }

  res.x_init = region_difference(Region::from_polytope(sys.X), zero);
  res.positive = std::move(positive);
  res.zero_attractor = std::move(zero);
  res.wall_ms = now_ms() - t0;
  return res;
}

ReachResult alg3_nts_reach(const LinearStochasticSystem& sys,
                           const Partition& part, const IdSet& target_cells) {
  double t0 = now_ms();
  ReachResult res;
  const double fp_tol = 1e-9 * sys.X.volume();
  Region full_u = Region::from_polytope(sys.U);

  Partition cur = part;
  Region positive(sys.state_dim());
  for (CellId id : target_cells) add_disjoint(positive, part.poly(id));

  // phase 1: cover cells by predecessors, refining as needed; the NTS is
  // rebuilt each pass (supports are irrelevant here)
  for (;;) {
    Region before = positive;
    Nts nts = build_nts(sys, cur, Exec::parallel, false);
    res.nts_sizes.emplace_back(nts.num_states, nts.total_actions());
    ++res.phase1_iterations;

    std::vector<Polytope> interior;
    for (const auto& cell : cur.cells()) {
      double cover_tol = tol::eps_vol_rel * std::max(cell.poly.volume(), 1e-30);
      if (cell_covered(cell.poly, before, cover_tol)) {
        interior.push_back(cell.poly);
        continue;
      }
      Region p = pre(sys, cell.poly, full_u, before);
      absorb(positive, p);
      auto pieces = refine_cell({cell.poly}, p);
      for (auto& piece : pieces) interior.push_back(std::move(piece));
    }
    std::vector<Polytope> outp;
    for (const auto& c : cur.out_parts()) outp.push_back(c.poly);
    cur = Partition(cur.state_space(), cur.predicates(), std::move(interior),
                    std::move(outp));
    if (region_fixed(before, positive, fp_tol)) break;
  }

  // phase 2: grow the zero-probability attractor, refining cells whose
  // every action can lead into it
  Region outs_region(sys.state_dim());
  for (const auto& c : cur.out_parts()) outs_region.add(c.poly);
  Region zero = outs_region;
  absorb(zero, region_difference(Region::from_polytope(sys.X), positive));
  for (;;) {
    Region before = zero;
    Nts nts = build_nts(sys, cur, Exec::parallel, false);
    ++res.phase2_iterations;

    // per-state leakiness of the current partition against `zero`
    std::vector<char> leaky(cur.num_states(), 0);
    for (CellId j = 0; j < cur.num_states(); ++j) {
      Region overlap = intersect(before, cur.poly(j));
      leaky[j] = overlap.volume() >
                         tol::eps_vol_rel * std::max(cur.poly(j).volume(), 1e-30)
                     ? 1
                     : 0;
    }

    std::vector<Polytope> interior;
    for (const auto& cell : cur.cells()) {
      bool all_leak = !nts.actions[cell.id].empty();
      for (const auto& act : nts.actions[cell.id]) {
        bool leaks = false;
        for (CellId j : act.poly.dests) leaks = leaks || leaky[j];
        all_leak = all_leak && leaks;
        if (!all_leak) break;
      }
      if (!all_leak) {
        interior.push_back(cell.poly);
        continue;
      }
      Region a = attr(sys, cell.poly, full_u, before, Region(sys.state_dim()));
      absorb(zero, a);
      auto pieces = refine_cell({cell.poly}, a);
      for (auto& piece : pieces) interior.push_back(std::move(piece));
    }
    std::vector<Polytope> outp;
    for (const auto& c : cur.out_parts()) outp.push_back(c.poly);
    cur = Partition(cur.state_space(), cur.predicates(), std::move(interior),
                    std::move(outp));
    if (region_fixed(before, zero, fp_tol)) break;
  }

  res.x_init = region_difference(Region::from_polytope(sys.X), zero);
  res.positive = std::move(positive);
  res.zero_attractor = std::move(zero);
  res.partition = std::move(cur);
  res.wall_ms = now_ms() - t0;
  return res;
}

}  // namespace sgsynth
