/*
 * automata.hpp
 *
 * Deterministic omega-automata over predicate-truth letters with the
 * one-pair Streett (Buchi implication) acceptance condition (E,F): a run
 * accepts iff visiting E infinitely often implies visiting F infinitely
 * often. Buchi is the special case E = Q.
 */

#ifndef SGSYNTH_AUTOMATA_HPP_
#define SGSYNTH_AUTOMATA_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "sgsynth/sysdyn.hpp"

namespace sgsynth {

class OmegaAutomaton {
 public:
  OmegaAutomaton() = default;
  /* delta is the dense table state * 2^num_preds + letter -> state */
  OmegaAutomaton(int num_states, int num_preds, int initial,
                 std::vector<int> delta, std::vector<char> in_e,
                 std::vector<char> in_f);

  int num_states() const { return num_states_; }
  int num_preds() const { return num_preds_; }
  int num_letters() const { return 1 << num_preds_; }
  int initial() const { return initial_; }
  bool in_e(int q) const { return in_e_[q] != 0; }
  bool in_f(int q) const { return in_f_[q] != 0; }
  bool is_buchi() const;  // E == Q

  int step(int q, Letter letter) const {
    return delta_[static_cast<std::size_t>(q) * (1u << num_preds_) +
                  (letter & ((1u << num_preds_) - 1))];
  }

  /* true iff every infinite continuation from q is accepting, i.e. no
   * E-state reachable from q lies on an F-free cycle */
  bool universally_accepting(int q) const;

 private:
  int num_states_ = 1;
  int num_preds_ = 0;
  int initial_ = 0;
  std::vector<int> delta_{0};
  std::vector<char> in_e_{0};
  std::vector<char> in_f_{1};
  std::vector<char> universal_;  // precomputed per state

  void compute_universal();
};

/* ultimately periodic word: prefix followed by a repeated nonempty cycle */
struct Lasso {
  std::vector<Letter> prefix;
  std::vector<Letter> cycle;
};

/* conjunction of predicate literals over a letter */
struct LetterPred {
  IdSet pos;  // predicate indices that must hold
  IdSet neg;  // predicate indices that must not hold
  bool matches(Letter l) const {
    for (int k : pos)
      if (!(l >> k & 1)) return false;
    for (int k : neg)
      if (l >> k & 1) return false;
    return true;
  }
};

struct Gr1Spec {
  std::vector<OmegaAutomaton> assumptions;  // Buchi components
  std::vector<OmegaAutomaton> guarantees;   // Buchi components
  std::optional<OmegaAutomaton> automaton;  // directly supplied alternative
};

int step(const OmegaAutomaton& a, int q, Letter letter);
bool accepts(const OmegaAutomaton& a, const Lasso& lasso);

/* deterministic Buchi intersection via the counter construction; empty
 * input yields the single-state accept-all automaton */
OmegaAutomaton buchi_product(int num_preds,
                             const std::vector<OmegaAutomaton>& components);

/* (/\ assumptions) => (/\ guarantees) as one Buchi-implication automaton:
 * E marks assumption-product sweeps, F marks guarantee-product sweeps */
OmegaAutomaton gr1_assemble(const Gr1Spec& spec);

/* fragment builders; reach carries the Ex.-2-style pair (E={q0}, F={q1}),
 * safe and recur are Buchi */
OmegaAutomaton make_reach(int num_preds, const LetterPred& goal);
OmegaAutomaton make_safe(int num_preds, const LetterPred& good);
OmegaAutomaton make_recur(int num_preds, const LetterPred& goal);

/* same transitions reinterpreted under Buchi acceptance (E := Q) */
OmegaAutomaton as_buchi(const OmegaAutomaton& a);

}  // namespace sgsynth

#endif  // SGSYNTH_AUTOMATA_HPP_
