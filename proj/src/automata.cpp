#include "sgsynth/automata.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace sgsynth {

OmegaAutomaton::OmegaAutomaton(int num_states, int num_preds, int initial,
                               std::vector<int> delta, std::vector<char> in_e,
                               std::vector<char> in_f)
    : num_states_(num_states),
      num_preds_(num_preds),
      initial_(initial),
      delta_(std::move(delta)),
      in_e_(std::move(in_e)),
      in_f_(std::move(in_f)) {
  if (num_states_ <= 0) throw std::invalid_argument("automaton: no states");
  if (num_preds_ < 0 || num_preds_ > 16)
    throw std::invalid_argument("automaton: predicate count out of range");
  if (initial_ < 0 || initial_ >= num_states_)
    throw std::invalid_argument("automaton: bad initial state");
  const std::size_t expect =
      static_cast<std::size_t>(num_states_) << num_preds_;
  if (delta_.size() != expect ||
      in_e_.size() != static_cast<std::size_t>(num_states_) ||
      in_f_.size() != static_cast<std::size_t>(num_states_))
    throw std::invalid_argument("automaton: table sizes inconsistent");
  for (int t : delta_)
    if (t < 0 || t >= num_states_)
      throw std::invalid_argument("automaton: transition out of range");
  compute_universal();
}

bool OmegaAutomaton::is_buchi() const {
  return std::all_of(in_e_.begin(), in_e_.end(),
                     [](char c) { return c != 0; });
}

void OmegaAutomaton::compute_universal() {
  const int n = num_states_;
  const int letters = num_letters();

  // states lying on a cycle of the F-free subgraph
  // iterative detection: repeatedly drop states without an F-free successor
  // that is itself still alive is not enough for cycles; use SCC instead
  std::vector<int> index(n, -1), low(n, 0), stack_of;
  std::vector<char> on_stack(n, 0), on_cycle(n, 0);
  int counter = 0;
  // Tarjan over the subgraph without F states
  std::vector<std::vector<int>> succ(n);
  for (int q = 0; q < n; ++q) {
    if (in_f_[q]) continue;
    std::set<int> s;
    for (int l = 0; l < letters; ++l) {
      int t = step(q, static_cast<Letter>(l));
      if (!in_f_[t]) s.insert(t);
    }
    succ[q].assign(s.begin(), s.end());
  }
  struct Frame {
    int q;
    std::size_t next;
  };
  for (int root = 0; root < n; ++root) {
    if (in_f_[root] || index[root] >= 0) continue;
    std::vector<Frame> stack{{root, 0}};
    index[root] = low[root] = counter++;
    stack_of.push_back(root);
    on_stack[root] = 1;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < succ[f.q].size()) {
        int t = succ[f.q][f.next++];
        if (index[t] < 0) {
          index[t] = low[t] = counter++;
          stack_of.push_back(t);
          on_stack[t] = 1;
          stack.push_back({t, 0});
        } else if (on_stack[t]) {
          low[f.q] = std::min(low[f.q], index[t]);
        }
      } else {
        int q = f.q;
        stack.pop_back();
        if (!stack.empty())
          low[stack.back().q] = std::min(low[stack.back().q], low[q]);
        if (low[q] == index[q]) {
          std::vector<int> scc;
          for (;;) {
            int t = stack_of.back();
            stack_of.pop_back();
            on_stack[t] = 0;
            scc.push_back(t);
            if (t == q) break;
          }
          bool cyclic = scc.size() > 1;
          if (!cyclic)
            for (int t : succ[q])
              if (t == q) cyclic = true;
          if (cyclic)
            for (int t : scc) on_cycle[t] = 1;
        }
      }
    }
  }

  // bad seeds: E-states on an F-free cycle; universal_from q <=> no bad
  // state reachable from q in the full graph
  std::vector<std::vector<int>> rsucc(n);  // reversed edges
  for (int q = 0; q < n; ++q) {
    std::set<int> s;
    for (int l = 0; l < letters; ++l) s.insert(step(q, static_cast<Letter>(l)));
    for (int t : s) rsucc[t].push_back(q);
  }
  std::vector<char> reaches_bad(n, 0);
  std::vector<int> queue;
  for (int q = 0; q < n; ++q)
    if (in_e_[q] && on_cycle[q]) {
      reaches_bad[q] = 1;
      queue.push_back(q);
    }
  while (!queue.empty()) {
    int q = queue.back();
    queue.pop_back();
    for (int p : rsucc[q])
      if (!reaches_bad[p]) {
        reaches_bad[p] = 1;
        queue.push_back(p);
      }
  }
  universal_.assign(n, 0);
  for (int q = 0; q < n; ++q) universal_[q] = reaches_bad[q] ? 0 : 1;
}

bool OmegaAutomaton::universally_accepting(int q) const {
  return universal_[q] != 0;
}

int step(const OmegaAutomaton& a, int q, Letter letter) {
  return a.step(q, letter);
}

bool accepts(const OmegaAutomaton& a, const Lasso& lasso) {
  if (lasso.cycle.empty())
    throw std::invalid_argument("accepts: empty lasso cycle");
  int q = a.initial();
  for (Letter l : lasso.prefix) q = a.step(q, l);
  // pump the cycle until the state at its start recurs
  std::vector<char> seen(a.num_states(), 0);
  while (!seen[q]) {
    seen[q] = 1;
    for (Letter l : lasso.cycle) q = a.step(q, l);
  }
  // q now starts the recurring loop; collect the states visited infinitely
  bool hits_e = false, hits_f = false;
  int q2 = q;
  do {
    for (Letter l : lasso.cycle) {
      q2 = a.step(q2, l);
      hits_e = hits_e || a.in_e(q2);
      hits_f = hits_f || a.in_f(q2);
    }
  } while (q2 != q);
  return !hits_e || hits_f;
}

OmegaAutomaton buchi_product(int num_preds,
                             const std::vector<OmegaAutomaton>& components) {
  const int letters = 1 << num_preds;
  if (components.empty()) {
    return OmegaAutomaton(1, num_preds, 0, std::vector<int>(letters, 0), {1},
                          {1});
  }
  for (const auto& c : components) {
    if (c.num_preds() != num_preds)
      throw std::invalid_argument("buchi_product: alphabet mismatch");
    if (!c.is_buchi())
      throw std::invalid_argument("buchi_product: component not Buchi");
  }
  const int k = static_cast<int>(components.size());

  // product state: component states + sweep counter; the counter advances
  // when its component is currently accepting, and a full sweep marks F
  struct Key {
    std::vector<int> qs;
    int counter;
    bool operator<(const Key& o) const {
      if (counter != o.counter) return counter < o.counter;
      return qs < o.qs;
    }
  };
  Key init;
  init.counter = 0;
  for (const auto& c : components) init.qs.push_back(c.initial());

  std::map<Key, int> ids;
  std::vector<Key> order;
  auto intern = [&](const Key& key) {
    auto [it, inserted] = ids.try_emplace(key, static_cast<int>(order.size()));
    if (inserted) order.push_back(key);
    return it->second;
  };
  intern(init);
  std::vector<int> delta;
  for (std::size_t at = 0; at < order.size(); ++at) {
    Key cur = order[at];
    for (int l = 0; l < letters; ++l) {
      Key next;
      next.qs.resize(k);
      for (int i = 0; i < k; ++i)
        next.qs[i] = components[i].step(cur.qs[i], static_cast<Letter>(l));
      next.counter = components[cur.counter].in_f(cur.qs[cur.counter])
                         ? (cur.counter + 1) % k
                         : cur.counter;
      delta.push_back(intern(next));
    }
  }
  const int n = static_cast<int>(order.size());
  std::vector<char> in_e(n, 1), in_f(n, 0);
  for (int i = 0; i < n; ++i)
    in_f[i] = (order[i].counter == 0 && components[0].in_f(order[i].qs[0]))
                  ? 1
                  : 0;
  // delta was built row by row in interning order, so rows match ids
  return OmegaAutomaton(n, num_preds, 0, std::move(delta), std::move(in_e),
                        std::move(in_f));
}

OmegaAutomaton gr1_assemble(const Gr1Spec& spec) {
  if (spec.automaton) return *spec.automaton;
  int num_preds = 0;
  for (const auto& c : spec.assumptions)
    num_preds = std::max(num_preds, c.num_preds());
  for (const auto& c : spec.guarantees)
    num_preds = std::max(num_preds, c.num_preds());
  for (const auto& c : spec.assumptions)
    if (c.num_preds() != num_preds)
      throw std::invalid_argument("gr1_assemble: alphabet mismatch");
  for (const auto& c : spec.guarantees)
    if (c.num_preds() != num_preds)
      throw std::invalid_argument("gr1_assemble: alphabet mismatch");

  OmegaAutomaton asms = buchi_product(num_preds, spec.assumptions);
  OmegaAutomaton guas = buchi_product(num_preds, spec.guarantees);

  const int letters = 1 << num_preds;
  const int n = asms.num_states() * guas.num_states();
  std::vector<int> delta;
  delta.reserve(static_cast<std::size_t>(n) * letters);
  std::vector<char> in_e(n, 0), in_f(n, 0);
  for (int a = 0; a < asms.num_states(); ++a) {
    for (int g = 0; g < guas.num_states(); ++g) {
      int id = a * guas.num_states() + g;
      in_e[id] = asms.in_f(a) ? 1 : 0;
      in_f[id] = guas.in_f(g) ? 1 : 0;
      for (int l = 0; l < letters; ++l) {
        int na = asms.step(a, static_cast<Letter>(l));
        int ng = guas.step(g, static_cast<Letter>(l));
        delta.push_back(na * guas.num_states() + ng);
      }
    }
  }
  int init = asms.initial() * guas.num_states() + guas.initial();
  return OmegaAutomaton(n, num_preds, init, std::move(delta), std::move(in_e),
                        std::move(in_f));
}

namespace {

std::vector<int> two_state_delta(int num_preds, const LetterPred& pred,
                                 int on_match_from0, int on_miss_from0,
                                 int on_match_from1, int on_miss_from1) {
  const int letters = 1 << num_preds;
  std::vector<int> delta(2 * letters);
  for (int l = 0; l < letters; ++l) {
    bool m = pred.matches(static_cast<Letter>(l));
    delta[l] = m ? on_match_from0 : on_miss_from0;
    delta[letters + l] = m ? on_match_from1 : on_miss_from1;
  }
  return delta;
}

}  // namespace

OmegaAutomaton make_reach(int num_preds, const LetterPred& goal) {
  // q0 until the goal letter, then the absorbing q1; (E,F) = ({q0},{q1})
  return OmegaAutomaton(2, num_preds, 0,
                        two_state_delta(num_preds, goal, 1, 0, 1, 1), {1, 0},
                        {0, 1});
}

OmegaAutomaton make_safe(int num_preds, const LetterPred& good) {
  // q1 is the bad sink; Buchi with F = {q0}
  return OmegaAutomaton(2, num_preds, 0,
                        two_state_delta(num_preds, good, 0, 1, 1, 1), {1, 1},
                        {1, 0});
}

OmegaAutomaton make_recur(int num_preds, const LetterPred& goal) {
  // q1 is entered exactly after a goal letter; Buchi with F = {q1}
  return OmegaAutomaton(2, num_preds, 0,
                        two_state_delta(num_preds, goal, 1, 0, 1, 0), {1, 1},
                        {0, 1});
}

OmegaAutomaton as_buchi(const OmegaAutomaton& a) {
  std::vector<int> delta;
  const int letters = a.num_letters();
  delta.reserve(static_cast<std::size_t>(a.num_states()) * letters);
  std::vector<char> in_e(a.num_states(), 1), in_f(a.num_states(), 0);
  for (int q = 0; q < a.num_states(); ++q) {
    in_f[q] = a.in_f(q) ? 1 : 0;
    for (int l = 0; l < letters; ++l)
      delta.push_back(a.step(q, static_cast<Letter>(l)));
  }
  return OmegaAutomaton(a.num_states(), a.num_preds(), a.initial(),
                        std::move(delta), std::move(in_e), std::move(in_f));
}

}  // namespace sgsynth
