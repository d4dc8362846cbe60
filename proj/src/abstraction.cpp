#include "sgsynth/abstraction.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sgsynth {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::vector<NtsAction> build_cell_actions(const LinearStochasticSystem& sys,
                                          const Partition& part, CellId i,
                                          const SupportCache* cache) {
  std::vector<NtsAction> out;
  for (auto& ap : action_polytopes(sys, part, i)) {
    NtsAction a;
    if (cache) {
      a.supports = supports(sys, part, i, ap, *cache);
      if (a.supports.empty()) continue;  // numerically unrealizable action
    }
    a.poly = std::move(ap);
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace

int Nts::total_actions() const {
  int n = 0;
  for (const auto& acts : actions) n += static_cast<int>(acts.size());
  return n;
}

Nts build_nts(const LinearStochasticSystem& sys, const Partition& part,
              Exec exec, bool with_supports) {
  Nts nts;
  nts.num_states = part.num_states();
  nts.num_cells = part.num_cells();
  nts.actions.resize(part.num_cells());
  SupportCache cache;
  if (with_supports) cache = make_support_cache(sys, part);
  const SupportCache* cache_ptr = with_supports ? &cache : nullptr;

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < part.num_cells(); ++i)
      nts.actions[i] = build_cell_actions(sys, part, i, cache_ptr);
  } else {
    for (int i = 0; i < part.num_cells(); ++i)
      nts.actions[i] = build_cell_actions(sys, part, i, cache_ptr);
  }
  return nts;
}

GameLayout build_game(const Nts& nts, const Partition& part) {
  GameLayout layout;
  layout.base_states = part.num_states();
  for (int s = 0; s < part.num_states(); ++s) layout.game.add_state(true);

  layout.p2_offset.assign(nts.num_cells, 0);
  int offset = 0;
  for (CellId i = 0; i < nts.num_cells; ++i) {
    layout.p2_offset[i] = offset;
    for (std::size_t k = 0; k < nts.actions[i].size(); ++k) {
      int p2 = layout.game.add_state(false);
      (void)p2;
      layout.p2_info.emplace_back(i, static_cast<int>(k));
      ++offset;
    }
  }
  for (CellId i = 0; i < nts.num_cells; ++i) {
    for (std::size_t k = 0; k < nts.actions[i].size(); ++k) {
      int p2 = layout.p2_id(i, static_cast<int>(k));
      layout.game.add_action(i, {p2});  // deterministic P1 move
      for (const IdSet& supp : nts.actions[i][k].supports)
        layout.game.add_action(p2, supp);  // uniform weights over J'
    }
  }
  layout.game.validate();
  return layout;
}

ProductGame build_product(const GameLayout& layout, const OmegaAutomaton& aut,
                          const Partition& part) {
  ProductGame prod;
  prod.q0 = aut.initial();
  const Game& g = layout.game;

  std::map<std::pair<int, int>, int> index;  // (game state, q) -> product id
  std::vector<std::pair<int, int>> origin;
  std::queue<int> todo;
  auto intern = [&](int gs, int q) {
    auto [it, inserted] = index.try_emplace({gs, q},
                                            static_cast<int>(origin.size()));
    if (inserted) {
      origin.emplace_back(gs, q);
      prod.game.add_state(g.is_p1(gs));
      todo.push(it->second);
    }
    return it->second;
  };

  // roots: every partition state paired with the initial automaton state
  for (int s = 0; s < layout.base_states; ++s) intern(s, aut.initial());

  // Out-states are terminal. When the memory state already accepts every
  // continuation, the play counts as satisfying: such states move to one
  // absorbing accepting sink so the solver sees them as winning. All other
  // out-states stay action-less and lose even cooperatively.
  int accept_sink = -1;
  auto accepted = [&]() {
    if (accept_sink < 0) {
      accept_sink = static_cast<int>(origin.size());
      origin.emplace_back(-1, -1);
      prod.game.add_state(true);
      prod.game.add_action(accept_sink, {accept_sink});
    }
    return accept_sink;
  };

  while (!todo.empty()) {
    int pid = todo.front();
    todo.pop();
    auto [gs, q] = origin[pid];
    if (g.is_p1(gs)) {
      if (part.is_out(gs)) {
        if (aut.universally_accepting(q)) prod.game.add_action(pid, {accepted()});
        continue;
      }
      Letter letter = part.label(gs);
      int q2 = aut.step(q, letter);
      for (const auto& act : g.actions(gs)) {
        // P1 actions have the single successor (cell, action)
        int succ = intern(act.succ[0], q2);
        prod.game.add_action(pid, {succ});
      }
    } else {
      for (const auto& act : g.actions(gs)) {
        std::vector<int> succ;
        succ.reserve(act.succ.size());
        for (int t : act.succ) succ.push_back(intern(t, q));
        prod.game.add_action(pid, std::move(succ));
      }
    }
  }

  const int n = static_cast<int>(origin.size());
  prod.e.assign(n, 0);
  prod.f.assign(n, 0);
  prod.cell_of.assign(n, -1);
  prod.action_of.assign(n, -1);
  prod.q_of.assign(n, -1);
  prod.q_universal.assign(n, 0);
  for (int pid = 0; pid < n; ++pid) {
    auto [gs, q] = origin[pid];
    if (gs < 0) {  // the accepting sink
      prod.f[pid] = 1;
      prod.q_universal[pid] = 1;
      continue;
    }
    prod.e[pid] = aut.in_e(q) ? 1 : 0;
    prod.f[pid] = aut.in_f(q) ? 1 : 0;
    prod.q_of[pid] = q;
    prod.q_universal[pid] = aut.universally_accepting(q) ? 1 : 0;
    if (gs < layout.base_states) {
      prod.cell_of[pid] = gs;
      prod.p1_index.emplace(std::make_pair(gs, q), pid);
    } else {
      auto [cell, action] = layout.p2_info[gs - layout.base_states];
      prod.cell_of[pid] = cell;
      prod.action_of[pid] = action;
    }
  }
  prod.game.validate();
  return prod;
}

Classification classify(const ProductGame& product, const Partition& part) {
  Classification cls;
  const int n = product.game.num_states();

  AlmostResult adv = almost_streett(product.game, product.e, product.f);
  StateSet coop = almost_streett_coop(product.game, product.e, product.f);

  cls.product_yes = adv.winning;
  cls.product_no.assign(n, 0);
  cls.product_undecided.assign(n, 0);
  cls.strategy = std::move(adv.strategy);
  for (int pid = 0; pid < n; ++pid) {
    cls.product_no[pid] = coop[pid] ? 0 : 1;
    if (!cls.product_yes[pid] && !cls.product_no[pid])
      cls.product_undecided[pid] = 1;
  }

  for (int pid = 0; pid < n; ++pid) {
    if (!product.game.is_p1(pid) || product.action_of[pid] >= 0) continue;
    CellId cell = product.cell_of[pid];
    if (cell < 0) continue;  // the accepting sink
    int q = product.q_of[pid];
    if (cls.product_yes[pid]) cls.j_yes[q].push_back(cell);
    else if (cls.product_no[pid]) cls.j_no[q].push_back(cell);
    else cls.j_undecided[q].push_back(cell);
  }
  for (auto* m : {&cls.j_yes, &cls.j_no, &cls.j_undecided})
    for (auto& [q, ids] : *m) std::sort(ids.begin(), ids.end());

  // cell-level classification by projection at the initial automaton state
  for (CellId i = 0; i < part.num_cells(); ++i) {
    int pid = product.find_p1(i, product.q0);
    if (pid < 0) {
      cls.undecided.push_back(i);
      continue;
    }
    if (cls.product_yes[pid]) cls.yes.push_back(i);
    else if (cls.product_no[pid]) cls.no.push_back(i);
    else cls.undecided.push_back(i);
  }
  return cls;
}

Controller lift_strategy(const ProductGame& product,
                         const Classification& cls, const Nts& nts,
                         const Partition& part, const OmegaAutomaton& aut) {
  Controller ctrl;
  ctrl.memory = aut;
  ctrl.domain = cls.yes;
  const int n = product.game.num_states();
  for (int pid = 0; pid < n; ++pid) {
    if (!product.game.is_p1(pid) || product.action_of[pid] >= 0) continue;
    if (!cls.product_yes[pid]) continue;
    CellId cell = product.cell_of[pid];
    if (cell < 0 || part.is_out(cell)) continue;
    auto it = cls.strategy.choice.find(pid);
    if (it == cls.strategy.choice.end()) continue;
    int action = it->second;  // P1 action index == NTS action index
    const Region& region = nts.actions[cell][action].poly.region;
    const Polytope* largest = nullptr;
    for (const auto& p : region.parts())
      if (!largest || p.volume() > largest->volume()) largest = &p;
    Controller::Entry entry;
    entry.action = action;
    entry.input = largest->chebyshev_center();
    ctrl.policy.emplace(std::make_pair(cell, product.q_of[pid]),
                        std::move(entry));
  }
  return ctrl;
}

Trace simulate(const LinearStochasticSystem& sys, const Partition& part,
               const Controller& ctrl, const Vec& x0, int horizon,
               std::uint64_t seed, std::uint64_t trace_index) {
  Trace tr;
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(trace_index + 1)));
  Vec x = x0;
  int q = ctrl.memory.initial();
  tr.end = Trace::End::horizon;
  for (int t = 0; t <= horizon; ++t) {
    auto cell = part.locate(x);
    tr.states.push_back(x);
    if (!cell) {
      tr.end = Trace::End::escaped;
      break;
    }
    tr.cells.push_back(*cell);
    tr.memories.push_back(q);
    tr.letters.push_back(part.label(*cell));
    if (ctrl.memory.universally_accepting(q)) tr.satisfied = true;
    if (part.is_out(*cell)) {
      tr.end = Trace::End::out;
      break;
    }
    if (t == horizon) break;
    int q2 = ctrl.memory.step(q, part.label(*cell));
    auto it = ctrl.policy.find({*cell, q});
    if (it == ctrl.policy.end()) {
      tr.end = Trace::End::no_policy;
      break;
    }
    Vec u = it->second.input;
    Vec w = sample_uniform(sys.W, rng);
    x = sys.A * x + sys.B * u + w;
    tr.inputs.push_back(u);
    q = q2;
  }
  return tr;
}

}  // namespace sgsynth
