#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "game_oracle.hpp"

using namespace sgsynth;
using namespace sgsynth::testing;

namespace {

std::mt19937_64 rng(777);

StateSet mask(int n, std::initializer_list<int> ids) {
  StateSet s(n, 0);
  for (int i : ids) s[i] = 1;
  return s;
}

}  // namespace

TEST_CASE("pre operators on trivial cases") {
  Game g;
  int s0 = g.add_state(true);
  g.add_action(s0, {s0});
  StateSet all(1, 1);
  CHECK(pre1(g, all) == all);
  CHECK(pre2(g, all, mask(1, {0})) == all);

  // a state without actions never appears in any predecessor
  Game g2;
  int a = g2.add_state(true);
  int b = g2.add_state(true);
  g2.add_action(a, {b});
  StateSet all2(2, 1);
  StateSet p = pre1(g2, all2);
  CHECK(p[a]);
  CHECK(!p[b]);
}

TEST_CASE("pre operators agree with direct condition enumeration") {
  for (int trial = 0; trial < 100; ++trial) {
    Game g = random_game(rng, 10, 3);
    const int n = g.num_states();
    StateSet x = random_subset(rng, n);
    StateSet y = random_subset(rng, n);
    StateSet z = random_subset(rng, n);
    // enforce y subseteq z subseteq x as in the algorithm's usage
    for (int s = 0; s < n; ++s) {
      z[s] = z[s] && x[s];
      y[s] = y[s] && z[s];
    }
    auto c1 = [&](const GameAction& a) {
      for (int t : a.succ)
        if (!x[t]) return false;
      return true;
    };
    auto c2 = [&](const GameAction& a) {
      bool hit = false;
      for (int t : a.succ) {
        if (!x[t]) return false;
        hit = hit || y[t];
      }
      return hit;
    };
    auto c3 = [&](const GameAction& a) {
      bool inz = true;
      for (int t : a.succ) inz = inz && z[t];
      return inz || c2(a);
    };
    StateSet p1v = pre1(g, x), p2v = pre2(g, x, y), p3v = pre3(g, z, x, y);
    for (int s = 0; s < n; ++s) {
      auto quantify = [&](auto&& cond) {
        bool ok = g.is_p1(s) ? false : true;
        for (const auto& a : g.actions(s)) {
          if (g.is_p1(s))
            ok = ok || cond(a);
          else
            ok = ok && cond(a);
        }
        return ok;
      };
      CHECK(p1v[s] == quantify(c1));
      CHECK(p2v[s] == quantify(c2));
      CHECK(p3v[s] == quantify(c3));
    }
  }
}

TEST_CASE("almost-sure winning: boundary acceptance conditions") {
  Game g = random_game(rng, 6, 2);
  const int n = g.num_states();

  // F = S: everything wins (all states here have actions)
  auto all_f = almost_streett(g, StateSet(n, 0), StateSet(n, 1));
  CHECK(all_f.winning == StateSet(n, 1));

  // E = S, F = {}: E recurs forever, F never
  auto none = almost_streett(g, StateSet(n, 1), StateSet(n, 0));
  CHECK(none.winning == StateSet(n, 0));
}

TEST_CASE("solver equals the strategy-pair enumeration oracle") {
  for (int trial = 0; trial < 200; ++trial) {
    Game g = random_game(rng, 6, 2);
    const int n = g.num_states();
    StateSet e = random_subset(rng, n);
    StateSet f = random_subset(rng, n);
    OracleResult want = oracle_solve(g, e, f);
    AlmostResult got = almost_streett(g, e, f);
    StateSet got_coop = almost_streett_coop(g, e, f);
    REQUIRE(got.winning == want.adversarial);
    REQUIRE(got_coop == want.coop);
    // more power never shrinks the winning set
    for (int s = 0; s < n; ++s)
      if (got.winning[s]) CHECK(got_coop[s]);
  }
}

TEST_CASE("winning strategies are closed and beat every memoryless adversary") {
  int nontrivial = 0;
  for (int trial = 0; trial < 120; ++trial) {
    Game g = random_game(rng, 6, 2);
    const int n = g.num_states();
    StateSet e = random_subset(rng, n);
    StateSet f = random_subset(rng, n);
    AlmostResult res = almost_streett(g, e, f);

    // closedness: chosen P1 action stays inside the winning set; every
    // action of a winning P2 state stays inside as well
    for (int s = 0; s < n; ++s) {
      if (!res.winning[s]) continue;
      if (g.is_p1(s)) {
        REQUIRE(res.strategy.choice.count(s) == 1);
        const auto& act = g.actions(s)[res.strategy.choice.at(s)];
        for (int t : act.succ) CHECK(res.winning[t]);
      } else {
        for (const auto& act : g.actions(s))
          for (int t : act.succ) CHECK(res.winning[t]);
      }
    }

    // exhaustively pit the strategy against all pure memoryless adversaries
    std::vector<int> p2_states;
    for (int s = 0; s < n; ++s)
      if (!g.is_p1(s)) p2_states.push_back(s);
    std::vector<int> idx(p2_states.size(), 0);
    bool any_winning = false;
    for (int s = 0; s < n; ++s) any_winning = any_winning || res.winning[s];
    if (any_winning) ++nontrivial;
    for (;;) {
      std::vector<int> profile(n, 0);
      for (int s = 0; s < n; ++s)
        if (g.is_p1(s) && res.strategy.choice.count(s))
          profile[s] = res.strategy.choice.at(s);
      for (std::size_t k = 0; k < p2_states.size(); ++k)
        profile[p2_states[k]] = idx[k];
      StateSet good = good_states(induced_chain(g, profile), e, f);
      for (int s = 0; s < n; ++s)
        if (res.winning[s]) CHECK(good[s]);
      std::size_t k = 0;
      while (k < p2_states.size()) {
        if (++idx[k] < static_cast<int>(g.actions(p2_states[k]).size())) break;
        idx[k++] = 0;
      }
      if (k == p2_states.size()) break;
    }
  }
  CHECK(nontrivial > 40);
}

TEST_CASE("player 2 alone picks between the good and the bad cycle") {
  // s0 (P1) -> s1 (P2); s1 routes each round through the F-state s2 or the
  // E-state s3, both of which return to s0
  Game g;
  int s0 = g.add_state(true);
  int s1 = g.add_state(false);
  int s2 = g.add_state(true);
  int s3 = g.add_state(true);
  g.add_action(s0, {s1});
  g.add_action(s1, {s2});  // action 0: towards F
  g.add_action(s1, {s3});  // action 1: towards E
  g.add_action(s2, {s0});
  g.add_action(s3, {s0});
  StateSet e = mask(4, {s3}), f = mask(4, {s2});

  auto adv = almost_streett(g, e, f);
  auto coop = almost_streett_coop(g, e, f);
  CHECK(adv.winning == StateSet(4, 0));
  CHECK(coop == StateSet(4, 1));

  OracleResult want = oracle_solve(g, e, f);
  CHECK(want.adversarial == adv.winning);
  CHECK(want.coop == coop);
}

TEST_CASE("solver ignores exact transition weights") {
  for (int trial = 0; trial < 30; ++trial) {
    Game g = random_game(rng, 6, 2);
    const int n = g.num_states();
    StateSet e = random_subset(rng, n);
    StateSet f = random_subset(rng, n);
    AlmostResult a = almost_streett(g, e, f);

    // rebuild with randomized positive weights on the same supports
    Game g2;
    for (int s = 0; s < n; ++s) g2.add_state(g.is_p1(s));
    for (int s = 0; s < n; ++s) {
      for (const auto& act : g.actions(s)) {
        std::vector<double> w(act.succ.size());
        double sum = 0;
        for (auto& x : w) {
          x = 0.05 + static_cast<double>(rng() % 1000) / 1000.0;
          sum += x;
        }
        for (auto& x : w) x /= sum;
        g2.add_action(s, act.succ, std::move(w));
      }
    }
    g2.validate();
    AlmostResult b = almost_streett(g2, e, f);
    CHECK(a.winning == b.winning);
    CHECK(almost_streett_coop(g, e, f) == almost_streett_coop(g2, e, f));
  }
}

TEST_CASE("game validation catches malformed transitions") {
  Game g;
  int s = g.add_state(true);
  CHECK_THROWS(g.add_action(s, {}));
  g.add_action(s, {0}, {0.5});  // weights not summing to one
  CHECK_THROWS(g.validate());
}

TEST_CASE("dump is stable and mentions every state") {
  Game g;
  g.add_state(true);
  g.add_state(false);
  g.add_action(0, {1});
  g.add_action(1, {0, 1});
  std::string d = g.dump();
  CHECK(d.find("s0 P1") != std::string::npos);
  CHECK(d.find("s1 P2") != std::string::npos);
  CHECK(d == g.dump());
}
