/*
 * abstraction.hpp
 *
 * From a partitioned linear stochastic system to a 2.5-player game: the
 * nondeterministic transition system over action polytopes, the game with
 * Player-2 support actions, the synchronous product with a specification
 * automaton, the yes/no/undecided classification, and the lifting of game
 * strategies to executable controllers.
 */

#ifndef SGSYNTH_ABSTRACTION_HPP_
#define SGSYNTH_ABSTRACTION_HPP_

#include <cstdint>
#include <map>

#include "sgsynth/automata.hpp"
#include "sgsynth/games.hpp"
#include "sgsynth/sysdyn.hpp"

namespace sgsynth {

struct NtsAction {
  ActionPolytope poly;
  std::vector<IdSet> supports;  // Player-2 choices, sorted
};

/* NTS over the partition: out parts carry no actions or transitions */
struct Nts {
  int num_states = 0;                           // cells + out parts
  int num_cells = 0;                            // interior only
  std::vector<std::vector<NtsAction>> actions;  // indexed by interior cell id
  int total_actions() const;
};

enum class Exec { serial, parallel };

/* Per-cell construction is embarrassingly parallel; the serial path is the
 * reference implementation the parallel one is tested against. Supports
 * can be skipped when only the transition structure is needed (the
 * reachability baselines never look at them). */
Nts build_nts(const LinearStochasticSystem& sys, const Partition& part,
              Exec exec = Exec::parallel, bool with_supports = true);

/* game over the NTS: P1 states are partition states, P2 states are
 * (cell, action) pairs with support sets as actions */
struct GameLayout {
  Game game;
  int base_states = 0;             // P1 state count (= partition states)
  std::vector<int> p2_offset;      // per interior cell: first P2 id - base
  std::vector<std::pair<int, int>> p2_info;  // P2 offset -> (cell, action)
  int p2_id(CellId cell, int action) const {
    return base_states + p2_offset[cell] + action;
  }
};
GameLayout build_game(const Nts& nts, const Partition& part);

/* synchronous product restricted to states reachable from some (cell, q0);
 * the automaton consumes the source cell's letter at the P1 step */
struct ProductGame {
  Game game;
  StateSet e, f;                 // lifted acceptance pair, by q membership
  std::vector<CellId> cell_of;   // per product id
  std::vector<int> action_of;    // NTS action index, -1 for P1 states
  std::vector<int> q_of;
  std::vector<char> q_universal;  // automaton accepts all continuations
  int q0 = 0;                     // initial automaton state
  std::map<std::pair<int, int>, int> p1_index;  // (cell, q) -> product id

  int find_p1(CellId cell, int q) const {
    auto it = p1_index.find({cell, q});
    return it == p1_index.end() ? -1 : it->second;
  }
};
ProductGame build_product(const GameLayout& layout, const OmegaAutomaton& aut,
                          const Partition& part);

struct Classification {
  IdSet yes, no, undecided;  // interior cell ids
  StateSet product_yes, product_no, product_undecided;
  /* per automaton state: partition state ids (interior and out) whose
   * product state is classified accordingly */
  std::map<int, IdSet> j_yes, j_no, j_undecided;
  Strategy strategy;  // almost-sure winning product strategy

  bool cell_yes(CellId i) const {
    return std::binary_search(yes.begin(), yes.end(), i);
  }
};
Classification classify(const ProductGame& product, const Partition& part);

/* finite-memory controller: automaton memory plus a designated control
 * input per (cell, memory) pair, defined on the yes-cells */
struct Controller {
  OmegaAutomaton memory;
  struct Entry {
    int action = -1;  // NTS action index of the chosen region
    Vec input;        // Chebyshev center of the region's largest part
  };
  std::map<std::pair<CellId, int>, Entry> policy;
  IdSet domain;  // yes cells

  bool defined_at(CellId cell, int q) const {
    return policy.count({cell, q}) > 0;
  }
};
Controller lift_strategy(const ProductGame& product,
                         const Classification& cls, const Nts& nts,
                         const Partition& part, const OmegaAutomaton& aut);

/* one controlled trajectory with uniform noise on W */
struct Trace {
  enum class End { horizon, out, escaped, no_policy };
  std::vector<Vec> states;     // x_0 .. x_T
  std::vector<Vec> inputs;     // u_0 .. u_{T-1}
  std::vector<CellId> cells;   // cell of x_t
  std::vector<Letter> letters;
  std::vector<int> memories;   // q before consuming the letter of x_t
  End end = End::horizon;
  bool satisfied = false;  // memory reached a universally accepting state
};
Trace simulate(const LinearStochasticSystem& sys, const Partition& part,
               const Controller& ctrl, const Vec& x0, int horizon,
               std::uint64_t seed, std::uint64_t trace_index);

}  // namespace sgsynth

#endif  // SGSYNTH_ABSTRACTION_HPP_
