#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stratmc/automata.hpp"
#include "stratmc/formula.hpp"
#include "stratmc/game.hpp"

namespace stratmc {

// Structures a formula may quantify over. Quantifiers without a system
// annotation bind to `main`.
struct SystemEnv {
  GamePtr main;
  std::map<std::string, GamePtr> named;

  GamePtr resolve(const std::optional<std::string>& ref) const;
  std::set<std::string> names() const;
};

struct CheckOptions {
  std::size_t automaton_states = 1000000;
  std::size_t game_nodes = 5000000;
  bool witness = false;  // attach the winning strategy (fragment) or lasso (full)
};

struct Stats {
  std::vector<std::size_t> automaton_states;  // one entry per construction stage
  std::size_t game_nodes = 0;
  std::size_t game_edges = 0;
  int colors = 0;
  double seconds = 0;
};

enum class Engine { Auto, Fragment, Full };
const char* engine_name(Engine e);

struct Verdict {
  bool holds = false;
  Engine engine = Engine::Auto;
  Stats stats;
  std::optional<std::string> witness;  // strategy dump or lasso
};

// Reference LTL semantics on a lasso. `vars[i]` reads component i of `w`.
// Accepts any quantifier-free formula (negations anywhere).
bool eval_ltl_lasso(const FormulaPtr& body, const ZippedWord& w, const std::vector<std::string>& vars,
                    const Alphabet& alphabet);

// Automaton over the alphabet of `vars` (component i bound to
// alphabet.components[i]) accepting exactly the zipped path tuples that satisfy
// `f`. `f` must be in NNF.
AutPtr build_equiv_automaton(const FormulaPtr& f, const std::vector<std::string>& vars,
                             const Alphabet& alphabet, const SystemEnv& env,
                             const CheckOptions& opts = {});

Verdict mc_full(const SystemEnv& env, const FormulaPtr& f, const CheckOptions& opts = {});
// Requires fragment_eligible(env, f).
Verdict mc_fragment(const SystemEnv& env, const FormulaPtr& f, const CheckOptions& opts = {});
// Single quantifier, one parallel block, or a prefix of only universal or
// only existential quantifiers; each kind judged against its bound structure.
bool fragment_eligible(const SystemEnv& env, const FormulaPtr& f);
Verdict model_check(const SystemEnv& env, const FormulaPtr& f, Engine engine = Engine::Auto,
                    const CheckOptions& opts = {});

// Largest security simulation; true iff it relates the initial state to itself.
// Requires declared roles.
bool security_simulation_exists(const GameStructure& g);

}  // namespace stratmc
