#include "sgsynth/games.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sgsynth {

int Game::add_state(bool player1) {
  p1_.push_back(player1 ? 1 : 0);
  actions_.emplace_back();
  return num_states() - 1;
}

void Game::add_action(int state, std::vector<int> succ,
                      std::vector<double> weights) {
  if (succ.empty()) throw std::invalid_argument("action without successors");
  std::sort(succ.begin(), succ.end());
  succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
  if (weights.empty())
    weights.assign(succ.size(), 1.0 / static_cast<double>(succ.size()));
  if (weights.size() != succ.size())
    throw std::invalid_argument("weight count mismatch");
  actions_[state].push_back({std::move(succ), std::move(weights)});
}

void Game::validate() const {
  for (int s = 0; s < num_states(); ++s) {
    for (const auto& a : actions_[s]) {
      double sum = 0.0;
      for (double w : a.weights) {
        if (w <= 0.0) throw std::logic_error("nonpositive transition weight");
        sum += w;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw std::logic_error("weights do not sum to 1");
      for (int t : a.succ)
        if (t < 0 || t >= num_states())
          throw std::logic_error("successor out of range");
    }
  }
}

std::string Game::dump() const {
  std::ostringstream os;
  for (int s = 0; s < num_states(); ++s) {
    os << "s" << s << ' ' << (is_p1(s) ? "P1" : "P2");
    if (actions_[s].empty()) os << " (sink)";
    os << '\n';
    for (std::size_t k = 0; k < actions_[s].size(); ++k) {
      os << "  a" << k << " ->";
      for (int t : actions_[s][k].succ) os << ' ' << t;
      os << '\n';
    }
  }
  return os.str();
}

namespace {

enum class Cond { kC1, kC2, kC3 };

bool subset_of(const std::vector<int>& succ, const StateSet& set) {
  for (int t : succ)
    if (!set[t]) return false;
  return true;
}

bool meets(const std::vector<int>& succ, const StateSet& set) {
  for (int t : succ)
    if (set[t]) return true;
  return false;
}

bool condition_holds(Cond c, const GameAction& a, const StateSet& z,
                     const StateSet& x, const StateSet& y) {
  switch (c) {
    case Cond::kC1:
      return subset_of(a.succ, x);
    case Cond::kC2:
      return subset_of(a.succ, x) && meets(a.succ, y);
    case Cond::kC3:
      return subset_of(a.succ, z) ||
             (subset_of(a.succ, x) && meets(a.succ, y));
  }
  return false;
}

/* predecessor over all states; in cooperative mode Player-2 states also
 * quantify existentially */
StateSet pre_generic(const Game& g, Cond c, const StateSet& z,
                     const StateSet& x, const StateSet& y, bool coop) {
  StateSet out(g.num_states(), 0);
  for (int s = 0; s < g.num_states(); ++s) {
    const auto& acts = g.actions(s);
    bool existential = g.is_p1(s) || coop;
    if (acts.empty()) {
      out[s] = 0;  // deadlocked states never win
      continue;
    }
    bool ok = existential ? false : true;
    for (const auto& a : acts) {
      bool h = condition_holds(c, a, z, x, y);
      if (existential && h) {
        ok = true;
        break;
      }
      if (!existential && !h) {
        ok = false;
        break;
      }
    }
    out[s] = ok ? 1 : 0;
  }
  return out;
}

StateSet set_and_mask(const StateSet& a, const StateSet& b) {
  StateSet out(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] && b[i];
  return out;
}

StateSet set_or3(const StateSet& a, const StateSet& b, const StateSet& c) {
  StateSet out(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] || b[i] || c[i];
  return out;
}

bool is_subset(const StateSet& a, const StateSet& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && !b[i]) return false;
  return true;
}

/* one unfolding of the inner Z fixed point for given (x, y) */
StateSet inner_z_fixpoint(const Game& g, const StateSet& e, const StateSet& f,
                          const StateSet& d, const StateSet& x,
                          const StateSet& y, bool coop) {
  const int n = g.num_states();
  StateSet zbar(n, 1);
  for (;;) {
    StateSet z = zbar;
    StateSet t1 = set_and_mask(f, pre_generic(g, Cond::kC1, z, x, y, coop));
    StateSet t2 = set_and_mask(e, pre_generic(g, Cond::kC2, z, x, y, coop));
    StateSet t3 = set_and_mask(d, pre_generic(g, Cond::kC3, z, x, y, coop));
    zbar = set_or3(t1, t2, t3);
    assert(is_subset(zbar, z));  // inner iterates shrink within one run
    if (zbar == z) return z;
  }
}

StateSet solve_fixpoint(const Game& g, const StateSet& e, const StateSet& f,
                        bool coop) {
  const int n = g.num_states();
  StateSet d(n, 0);
  for (int s = 0; s < n; ++s) d[s] = !e[s] && !f[s];

  StateSet xbar(n, 1);
  for (;;) {
    StateSet x = xbar;
    StateSet ybar(n, 0);
    for (;;) {
      StateSet y = ybar;
      ybar = inner_z_fixpoint(g, e, f, d, x, y, coop);
      assert(is_subset(y, ybar));  // middle iterates grow
      if (ybar == y) break;
    }
    assert(is_subset(ybar, x));  // outer iterates shrink
    xbar = ybar;
    if (xbar == x) return x;
  }
}

}  // namespace

StateSet pre1(const Game& g, const StateSet& x) {
  return pre_generic(g, Cond::kC1, x, x, x, false);
}

StateSet pre2(const Game& g, const StateSet& x, const StateSet& y) {
  return pre_generic(g, Cond::kC2, x, x, y, false);
}

StateSet pre3(const Game& g, const StateSet& z, const StateSet& x,
              const StateSet& y) {
  return pre_generic(g, Cond::kC3, z, x, y, false);
}

AlmostResult almost_streett(const Game& g, const StateSet& e,
                            const StateSet& f) {
  const int n = g.num_states();
  StateSet d(n, 0);
  for (int s = 0; s < n; ++s) d[s] = !e[s] && !f[s];

  AlmostResult res;
  res.winning = solve_fixpoint(g, e, f, false);

  // witness extraction: replay the middle fixed point at X = winning and
  // record, when a Player-1 state first enters a layer, the action meeting
  // the condition that put it there (lowest action index)
  const StateSet& w = res.winning;
  StateSet y(n, 0);
  for (;;) {
    StateSet z = inner_z_fixpoint(g, e, f, d, w, y, false);
    for (int s = 0; s < n; ++s) {
      if (!z[s] || y[s] || !g.is_p1(s)) continue;
      if (res.strategy.choice.count(s)) continue;
      const auto& acts = g.actions(s);
      Cond cond = f[s] ? Cond::kC1 : (e[s] ? Cond::kC2 : Cond::kC3);
      for (std::size_t k = 0; k < acts.size(); ++k) {
        if (condition_holds(cond, acts[k], z, w, y)) {
          res.strategy.choice[s] = static_cast<int>(k);
          break;
        }
      }
      assert(res.strategy.choice.count(s) || acts.empty());
    }
    if (z == y) break;
    y = z;
  }
  return res;
}

StateSet almost_streett_coop(const Game& g, const StateSet& e,
                             const StateSet& f) {
  return solve_fixpoint(g, e, f, true);
}

}  // namespace sgsynth
