/*
 * games.hpp
 *
 * Turn-based 2.5-player probabilistic game graphs and the almost-sure
 * winning solver for the Buchi implication condition (E,F). Transition
 * weights are stored but never read by the solver: almost-sure analysis
 * depends on supports only.
 */

#ifndef SGSYNTH_GAMES_HPP_
#define SGSYNTH_GAMES_HPP_

#include <map>
#include <string>
#include <vector>

namespace sgsynth {

struct GameAction {
  std::vector<int> succ;        // sorted successor state ids, nonempty
  std::vector<double> weights;  // positive, sums to 1
};

class Game {
 public:
  int add_state(bool player1);
  /* uniform weights when none are given */
  void add_action(int state, std::vector<int> succ,
                  std::vector<double> weights = {});

  int num_states() const { return static_cast<int>(p1_.size()); }
  bool is_p1(int s) const { return p1_[s] != 0; }
  const std::vector<GameAction>& actions(int s) const { return actions_[s]; }
  void validate() const;

  /* stable adjacency listing for debugging */
  std::string dump() const;

 private:
  std::vector<char> p1_;
  std::vector<std::vector<GameAction>> actions_;
};

using StateSet = std::vector<char>;  // membership mask over state ids

/* pure memoryless Player-1 strategy on the winning states */
struct Strategy {
  std::map<int, int> choice;  // state id -> action index
};

/* App.-A local predecessor operators: Player-1 states quantify
 * existentially over actions, Player-2 states universally */
StateSet pre1(const Game& g, const StateSet& x);
StateSet pre2(const Game& g, const StateSet& x, const StateSet& y);
StateSet pre3(const Game& g, const StateSet& z, const StateSet& x,
              const StateSet& y);

struct AlmostResult {
  StateSet winning;
  Strategy strategy;
};

/* almost-sure winning set and a witnessing pure memoryless strategy for
 * the condition "E infinitely often implies F infinitely often" */
AlmostResult almost_streett(const Game& g, const StateSet& e,
                            const StateSet& f);

/* cooperative (1.5-player) variant: both players existential */
StateSet almost_streett_coop(const Game& g, const StateSet& e,
                             const StateSet& f);

}  // namespace sgsynth

#endif  // SGSYNTH_GAMES_HPP_
