#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stratmc/formula.hpp"
#include "stratmc/game.hpp"

namespace stratmc {

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Transition formula. Positive over automaton states; `Lit` leaves only occur
// in symbolic transitions of explicit automata and are resolved per letter.
class PosBool {
 public:
  enum class Kind : std::uint8_t { True, False, Leaf, Lit, And, Or };

  static PosBool top() { return PosBool(Kind::True); }
  static PosBool bottom() { return PosBool(Kind::False); }
  static PosBool leaf(int state) { return PosBool(Kind::Leaf, state); }
  static PosBool lit(int atom, bool positive) { return PosBool(Kind::Lit, atom, positive); }
  static PosBool make_and(std::vector<PosBool> kids);
  static PosBool make_or(std::vector<PosBool> kids);

  Kind kind() const { return kind_; }
  int state() const { return value_; }  // Leaf: state, Lit: atom index
  bool positive() const { return positive_; }
  const std::vector<PosBool>& kids() const { return kids_; }
  bool is_true() const { return kind_ == Kind::True; }
  bool is_false() const { return kind_ == Kind::False; }

  bool operator==(const PosBool& o) const;
  bool operator<(const PosBool& o) const;

  bool eval(const std::function<bool(int)>& holds) const;
  PosBool dual() const;
  PosBool map_leaves(const std::function<PosBool(int)>& fn) const;
  PosBool resolve(const std::function<bool(int)>& atom_value) const;
  void collect_states(std::vector<int>& out) const;
  // Subset-minimal satisfying state sets, sorted. Empty result means false.
  std::vector<std::vector<int>> minimal_models() const;
  std::string to_string(const std::function<std::string(int)>& state_name = nullptr) const;

 private:
  explicit PosBool(Kind k, int v = 0, bool pos = true) : kind_(k), value_(v), positive_(pos) {}
  Kind kind_;
  int value_ = 0;
  bool positive_ = true;
  std::vector<PosBool> kids_;
};

PosBool parse_posbool(const std::string& text);

enum class Mode { Alternating, Nondeterministic, Universal, Deterministic };
const char* mode_name(Mode m);

using Letter = std::vector<int>;  // tuple of states, one per alphabet component

// Min-even parity automaton over letters that are tuples of states. Lazy
// automata intern their states on demand; num_states() reports the states
// discovered so far.
class ParityAutomaton {
 public:
  ParityAutomaton(Mode mode, Alphabet alphabet) : mode_(mode), alphabet_(std::move(alphabet)) {}
  virtual ~ParityAutomaton() = default;

  Mode mode() const { return mode_; }
  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t arity() const { return alphabet_.arity(); }

  virtual int initial() const = 0;
  virtual int color(int q) const = 0;
  virtual int max_color() const = 0;  // upper bound over all states
  virtual PosBool delta(int q, const Letter& letter) const = 0;
  virtual std::size_t num_states() const = 0;
  virtual std::string state_name(int q) const { return std::to_string(q); }

 protected:
  Mode mode_;
  Alphabet alphabet_;
};

using AutPtr = std::shared_ptr<const ParityAutomaton>;

// Proposition `prop` read from alphabet component `component`.
struct AtomRef {
  int component = 0;
  std::string prop;
  int prop_id = -1;  // id inside that component's structure, -1 if absent
  bool operator==(const AtomRef& o) const {
    return component == o.component && prop == o.prop;
  }
};

// Automaton with finitely many states given by symbolic transition formulas.
class ExplicitAutomaton : public ParityAutomaton {
 public:
  ExplicitAutomaton(Mode mode, Alphabet alphabet, std::vector<AtomRef> atoms)
      : ParityAutomaton(mode, std::move(alphabet)), atoms_(std::move(atoms)) {
    bind_atoms();
  }

  int add_state(int color, PosBool guard, std::string name = "");
  void set_guard(int q, PosBool guard) { guards_.at(q) = std::move(guard); }
  void set_initial(int q) { initial_ = q; }
  void set_mode(Mode m) { mode_ = m; }

  int initial() const override { return initial_; }
  int color(int q) const override { return colors_.at(q); }
  int max_color() const override;
  PosBool delta(int q, const Letter& letter) const override;
  std::size_t num_states() const override { return colors_.size(); }
  std::string state_name(int q) const override;

  const PosBool& guard(int q) const { return guards_.at(q); }
  const std::vector<AtomRef>& atoms() const { return atoms_; }
  bool atom_value(int atom, const Letter& letter) const;

 private:
  void bind_atoms();
  std::vector<AtomRef> atoms_;
  std::vector<int> colors_;
  std::vector<PosBool> guards_;
  std::vector<std::string> names_;
  int initial_ = 0;
};

std::string serialize_automaton(const ExplicitAutomaton& a);
std::shared_ptr<ExplicitAutomaton> parse_automaton(const std::string& text, Alphabet alphabet);

// ---- constructions -------------------------------------------------------------

// Body must be quantifier-free NNF over atoms whose variables appear in `vars`;
// variable i reads alphabet component i.
std::shared_ptr<ExplicitAutomaton> ltl_body_to_apa(const FormulaPtr& body,
                                                   const std::vector<std::string>& vars,
                                                   const Alphabet& alphabet);

AutPtr dualize(AutPtr a);
AutPtr parity_to_buchi_alt(AutPtr a);
AutPtr dealternate_mh(AutPtr a, std::size_t budget = 1000000);
AutPtr determinize(AutPtr a, std::size_t budget = 1000000);
// Chain that yields a nondeterministic automaton with colours {0,1}.
AutPtr to_nondeterministic(AutPtr a, std::size_t budget = 1000000);

bool accepts_lasso(const ParityAutomaton& a, const ZippedWord& w);

struct EmptinessResult {
  bool empty = true;
  std::optional<ZippedWord> witness;
};

// All letters of the alphabet (cartesian product of component state sets).
std::vector<Letter> all_letters(const Alphabet& alphabet, std::size_t limit = 1u << 20);

EmptinessResult is_empty(AutPtr a, std::size_t budget = 1000000);

// Forces discovery of every state reachable under the given letters; returns
// the number of states found. Throws BudgetExceeded past `budget`.
std::size_t explore(const ParityAutomaton& a, const std::vector<Letter>& letters,
                    std::size_t budget = 1000000);

}  // namespace stratmc
