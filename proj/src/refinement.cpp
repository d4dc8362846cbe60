#include "sgsynth/refinement.hpp"

#include <algorithm>
#include <stdexcept>

namespace sgsynth {

namespace {

IdSet ids_of(const std::map<int, IdSet>& m, int q) {
  auto it = m.find(q);
  return it == m.end() ? IdSet{} : it->second;
}

bool subset(const IdSet& a, const IdSet& b) {
  for (int x : a)
    if (!std::binary_search(b.begin(), b.end(), x)) return false;
  return true;
}

int intersection_size(const IdSet& a, const IdSet& b) {
  int n = 0;
  for (int x : a)
    if (std::binary_search(b.begin(), b.end(), x)) ++n;
  return n;
}

IdSet set_union(const IdSet& a, const IdSet& b) {
  IdSet out = a;
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

IdSet set_intersection(const IdSet& a, const IdSet& b) {
  IdSet out;
  for (int x : a)
    if (std::binary_search(b.begin(), b.end(), x)) out.push_back(x);
  return out;
}

/* undecided interior (cell, q) pairs in (cell, q) order */
std::vector<std::pair<CellId, int>> undecided_pairs(const ProductGame& product,
                                                    const Classification& cls,
                                                    const Partition& part) {
  std::vector<std::pair<CellId, int>> out;
  for (int pid = 0; pid < product.game.num_states(); ++pid) {
    if (!product.game.is_p1(pid) || product.action_of[pid] >= 0) continue;
    CellId cell = product.cell_of[pid];
    if (cell < 0 || part.is_out(cell)) continue;
    if (cls.product_undecided[pid]) out.emplace_back(cell, product.q_of[pid]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/* equal axis-box grid of 2^M boxes over each part's bounding box */
std::vector<Polytope> grid_parts(const Region& region) {
  std::vector<Polytope> out;
  for (const auto& part : region.parts()) {
    const int m = part.dim();
    Vec lo, hi;
    part.bounding_box(lo, hi);
    Vec mid = 0.5 * (lo + hi);
    for (int mask = 0; mask < (1 << m); ++mask) {
      Vec blo(m), bhi(m);
      for (int i = 0; i < m; ++i) {
        blo[i] = (mask >> i & 1) ? mid[i] : lo[i];
        bhi[i] = (mask >> i & 1) ? hi[i] : mid[i];
      }
      Polytope piece = intersect(part, Polytope::box(blo, bhi));
      if (!piece.is_empty()) out.push_back(std::move(piece));
    }
  }
  return out;
}

}  // namespace

const char* split_kind_name(SplitKind kind) {
  switch (kind) {
    case SplitKind::robust_predecessor:
      return "robust-predecessor";
    case SplitKind::attr_robust_case1:
      return "robust-attractor-case-1";
    case SplitKind::attr_robust_case2:
      return "robust-attractor-case-2";
    case SplitKind::attr_robust_case3:
      return "robust-attractor-case-3";
    case SplitKind::negative_attractor:
      return "negative-attractor";
  }
  return "?";
}

std::vector<Polytope> refine_cell(const std::vector<Polytope>& parts,
                                  const Region& splitter) {
  std::vector<Polytope> out;
  for (const auto& part : parts) {
    const double thin = tol::eps_vol_rel * std::max(part.volume(), 1e-30);
    std::vector<Polytope> inside;
    double vol_in = 0.0;
    for (const auto& b : splitter.parts()) {
      Polytope piece = intersect(part, b);
      if (!piece.is_empty()) {
        vol_in += piece.volume();
        inside.push_back(std::move(piece));
      }
    }
    Region outside = region_difference(part, splitter);
    // a negligible piece on either side merges back into its sibling
    if (vol_in <= thin || outside.volume() <= thin) {
      out.push_back(part);
      continue;
    }
    for (auto& piece : inside)
      if (piece.volume() > thin) out.push_back(std::move(piece));
    for (const auto& piece : outside.parts())
      if (piece.volume() > thin) out.push_back(piece);
  }
  return out;
}

RefinementPlan positive_refine(const ProductGame& product,
                               const Classification& cls,
                               const LinearStochasticSystem& sys,
                               const Partition& part, const Nts& nts,
                               const OmegaAutomaton& aut) {
  RefinementPlan plan;
  Region full_u = Region::from_polytope(sys.U);

  for (auto [cell, q] : undecided_pairs(product, cls, part)) {
    int qp = aut.step(q, part.label(cell));
    IdSet j_yes = ids_of(cls.j_yes, qp);
    IdSet j_und = ids_of(cls.j_undecided, qp);
    IdSet j_no = ids_of(cls.j_no, qp);

    // step 1: split along the robust predecessor of the winning states
    if (!j_yes.empty()) {
      Region pr = preR_cells(sys, part, part.poly(cell), full_u, j_yes);
      if (!pr.is_empty()) {
        SplitDirective d;
        d.cell = cell;
        d.kind = SplitKind::robust_predecessor;
        d.splitter = std::move(pr);
        d.q = q;
        d.target_ids = j_yes;
        plan.splits.push_back(std::move(d));
      }
    }

    // step 2: pick the (action, support) pair per the two-step analysis
    struct Pick {
      int action = -1;
      IdSet support;
    };
    Pick case1, case3;
    Pick case2;
    double best_p = 0.0;
    for (std::size_t k = 0; k < nts.actions[cell].size(); ++k) {
      for (const IdSet& supp : nts.actions[cell][k].supports) {
        if (intersection_size(supp, j_no) > 0) continue;
        int in_yes = intersection_size(supp, j_yes);
        if (in_yes == static_cast<int>(supp.size())) {
          if (case1.action < 0) case1 = {static_cast<int>(k), supp};
        } else if (in_yes > 0) {
          double p = static_cast<double>(in_yes) /
                     static_cast<double>(supp.size());
          if (p > best_p + 1e-12) {
            best_p = p;
            case2 = {static_cast<int>(k), supp};
          }
        } else if (subset(supp, j_und)) {
          if (case3.action < 0) case3 = {static_cast<int>(k), supp};
        }
      }
    }

    SplitKind kind;
    Pick pick;
    IdSet targets;
    if (case1.action >= 0) {
      kind = SplitKind::attr_robust_case1;
      pick = case1;
      targets = j_yes;
    } else if (case2.action >= 0) {
      kind = SplitKind::attr_robust_case2;
      pick = case2;
      targets = set_union(j_yes, set_intersection(case2.support, j_und));
    } else if (case3.action >= 0) {
      kind = SplitKind::attr_robust_case3;
      pick = case3;
      targets = j_und;
    } else {
      // an undecided state is cooperatively winnable, so some support must
      // avoid the losing states entirely
      throw std::logic_error(
          "positive_refine: no qualifying action/support pair for an "
          "undecided product state");
    }

    const Region& region = nts.actions[cell][pick.action].poly.region;
    for (const Polytope& uy : grid_parts(region)) {
      Region ar = attrR_cells(sys, part, part.poly(cell),
                              Region::from_polytope(uy), targets);
      if (ar.is_empty()) continue;
      SplitDirective d;
      d.cell = cell;
      d.kind = kind;
      d.splitter = std::move(ar);
      d.q = q;
      d.action = pick.action;
      d.support = pick.support;
      d.target_ids = targets;
      plan.splits.push_back(std::move(d));
    }
  }
  return plan;
}

RefinementPlan negative_refine(const ProductGame& product,
                               const Classification& cls,
                               const LinearStochasticSystem& sys,
                               const Partition& part, const Nts& nts,
                               const OmegaAutomaton& aut) {
  RefinementPlan plan;
  Region full_u = Region::from_polytope(sys.U);
  for (auto [cell, q] : undecided_pairs(product, cls, part)) {
    int qp = aut.step(q, part.label(cell));
    IdSet j_no = ids_of(cls.j_no, qp);
    if (j_no.empty()) continue;
    // trigger: every action admits a support leaking into the losing set
    bool trigger = true;
    for (const auto& act : nts.actions[cell]) {
      bool leaky = false;
      for (const IdSet& supp : act.supports)
        leaky = leaky || intersection_size(supp, j_no) > 0;
      trigger = trigger && leaky;
      if (!trigger) break;
    }
    if (!trigger) continue;
    Region at = attr_cells(sys, part, part.poly(cell), full_u, j_no);
    if (at.is_empty()) continue;
    SplitDirective d;
    d.cell = cell;
    d.kind = SplitKind::negative_attractor;
    d.splitter = std::move(at);
    d.q = q;
    d.target_ids = j_no;
    plan.splits.push_back(std::move(d));
  }
  return plan;
}

Partition apply_plan(const Partition& part, const RefinementPlan& plan) {
  std::vector<Polytope> interior;
  for (const auto& cell : part.cells()) {
    std::vector<Polytope> pieces{cell.poly};
    for (const auto& split : plan.splits)
      if (split.cell == cell.id) pieces = refine_cell(pieces, split.splitter);
    for (auto& p : pieces) interior.push_back(std::move(p));
  }
  std::vector<Polytope> out;
  out.reserve(part.out_parts().size());
  for (const auto& cell : part.out_parts()) out.push_back(cell.poly);
  return Partition(part.state_space(), part.predicates(), std::move(interior),
                   std::move(out));
}

}  // namespace sgsynth
