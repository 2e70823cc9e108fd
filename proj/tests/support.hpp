#pragma once

// Seeded generators shared by the unit and acceptance suites.

#include <memory>
#include <optional>
#include <set>
#include <random>
#include <string>
#include <vector>

#include "stratmc/checker.hpp"
#include "stratmc/formula.hpp"
#include "stratmc/game.hpp"
#include "stratmc/paritygame.hpp"
#include "stratmc/program.hpp"

namespace stratmc::testing {

using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool coin(Rng& rng) { return uniform(rng, 0, 1) == 1; }

struct GameShape {
  int min_states = 2, max_states = 5;
  int max_agents = 3;
  int max_moves = 2;
  int max_stage = 1;
  std::vector<std::string> props{"a", "b"};
};

// Agents are named g0, g1, ... so coalitions can be drawn by name.
inline GameStructure random_game(Rng& rng, const GameShape& shape = {}) {
  GameBuilder b;
  const int agents = uniform(rng, 1, shape.max_agents);
  std::vector<int> arity;
  for (int i = 0; i < agents; ++i) {
    const int moves = uniform(rng, 1, shape.max_moves);
    std::vector<std::string> names;
    for (int m = 0; m < moves; ++m) names.push_back("m" + std::to_string(m));
    b.add_agent("g" + std::to_string(i), uniform(rng, 0, shape.max_stage), names);
    arity.push_back(moves);
  }
  const int states = uniform(rng, shape.min_states, shape.max_states);
  for (int s = 0; s < states; ++s) {
    std::vector<std::string> label;
    for (const auto& p : shape.props)
      if (coin(rng)) label.push_back(p);
    b.add_state("s" + std::to_string(s), label);
  }
  std::size_t joint = 1;
  for (int a : arity) joint *= a;
  for (int s = 0; s < states; ++s) {
    auto table = std::make_shared<std::vector<int>>();
    for (std::size_t j = 0; j < joint; ++j) table->push_back(uniform(rng, 0, states - 1));
    b.set_transitions(s, [table, arity](const std::vector<int>& mv) {
      std::size_t idx = 0;
      for (std::size_t i = 0; i < arity.size(); ++i) idx = idx * arity[i] + mv[i];
      return (*table)[idx];
    });
  }
  b.set_initial(0);
  return b.build();
}

struct BodyShape {
  int max_temporal = 4;
  int max_depth = 4;
  std::vector<std::string> props{"a", "b"};
};

// Random NNF body with at most `max_temporal` temporal operators.
class BodyGen {
 public:
  BodyGen(Rng& rng, std::vector<std::string> vars, BodyShape shape = {})
      : rng_(rng), vars_(std::move(vars)), shape_(std::move(shape)) {}

  FormulaPtr operator()() {
    budget_ = shape_.max_temporal;
    return gen(shape_.max_depth);
  }

 private:
  FormulaPtr literal() {
    auto a = atom(shape_.props[uniform(rng_, 0, static_cast<int>(shape_.props.size()) - 1)],
                  vars_[uniform(rng_, 0, static_cast<int>(vars_.size()) - 1)]);
    switch (uniform(rng_, 0, 5)) {
      case 0: return f_true();
      case 1: return f_false();
      case 2: case 3: return neg(a);
      default: return a;
    }
  }

  FormulaPtr gen(int depth) {
    if (depth == 0) return literal();
    const int pick = uniform(rng_, 0, 9);
    if (pick < 2) return literal();
    if (pick < 4) return conj(gen(depth - 1), gen(depth - 1));
    if (pick < 6) return disj(gen(depth - 1), gen(depth - 1));
    if (budget_ == 0) return literal();
    --budget_;
    switch (pick) {
      case 6: return next(gen(depth - 1));
      case 7: return until(gen(depth - 1), gen(depth - 1));
      case 8: return release(gen(depth - 1), gen(depth - 1));
      default: return weak_until(gen(depth - 1), gen(depth - 1));
    }
  }

  Rng& rng_;
  std::vector<std::string> vars_;
  BodyShape shape_;
  int budget_ = 0;
};

// Lasso over the alphabet's state tuples with prefix + period <= max_len.
inline ZippedWord random_lasso(Rng& rng, const Alphabet& alphabet, int max_len = 8) {
  ZippedWord w;
  const int prefix = uniform(rng, 0, std::min(3, max_len - 1));
  const int period = uniform(rng, 1, max_len - prefix);
  auto letter = [&] {
    std::vector<int> l;
    for (const auto& g : alphabet.components) l.push_back(uniform(rng, 0, static_cast<int>(g->num_states()) - 1));
    return l;
  };
  for (int i = 0; i < prefix; ++i) w.prefix.push_back(letter());
  for (int i = 0; i < period; ++i) w.period.push_back(letter());
  return w;
}

// Random program over o (output), h (high) and l (low): a prologue and a
// `while true` loop whose body mixes reads, assignments and branching.
inline std::string random_program_source(Rng& rng) {
  const char* vars[] = {"o", "h", "l"};
  auto expr = [&](auto&& self, int depth) -> std::string {
    if (depth == 0 || uniform(rng, 0, 2) == 0) {
      switch (uniform(rng, 0, 4)) {
        case 0: return "true";
        case 1: return "false";
        default: return vars[uniform(rng, 0, 2)];
      }
    }
    switch (uniform(rng, 0, 2)) {
      case 0: return "!" + self(self, depth - 1);
      case 1: return "(" + self(self, depth - 1) + " & " + self(self, depth - 1) + ")";
      default: return "(" + self(self, depth - 1) + " | " + self(self, depth - 1) + ")";
    }
  };
  auto stmt = [&](auto&& self, int depth) -> std::string {
    const int pick = depth == 0 ? uniform(rng, 0, 3) : uniform(rng, 0, 6);
    switch (pick) {
      case 0: return "read_h h";
      case 1: return "read_l l";
      case 2: case 3: return std::string(vars[uniform(rng, 0, 2)]) + " := " + expr(expr, 2);
      case 4: return "choose { " + self(self, depth - 1) + " } or { " + self(self, depth - 1) + " }";
      case 5:
        return "if " + expr(expr, 1) + " { " + self(self, depth - 1) + " } else { " + self(self, depth - 1) + " }";
      default: return self(self, depth - 1) + "; " + self(self, depth - 1);
    }
  };
  std::string src = "#vars o h l\n#out o\n";
  if (coin(rng)) src += "o := " + expr(expr, 1) + ";\n";
  src += "while true { " + stmt(stmt, 2) + "; " + stmt(stmt, 2) + " }\n";
  return src;
}

inline ParityGame random_parity_game(Rng& rng, int nodes, int colors, int max_out = 3) {
  ParityGame g;
  for (int v = 0; v < nodes; ++v) g.add_node(coin(rng) ? Player::Exists : Player::Forall, uniform(rng, 0, colors - 1));
  for (int v = 0; v < nodes; ++v) {
    const int out = uniform(rng, 1, std::min(max_out, nodes));
    std::vector<int> pool(nodes);
    for (int i = 0; i < nodes; ++i) pool[i] = i;
    std::shuffle(pool.begin(), pool.end(), rng);
    g.succ[v].assign(pool.begin(), pool.begin() + out);
  }
  return g;
}

// Random progCGS in which high and low set their input bit afresh every step,
// so every input valuation is available from every state. The control part
// (chosen by nondet) may branch on the current inputs and drives the output.
inline GameStructure random_input_total_game(Rng& rng, int max_control = 3) {
  const int control = uniform(rng, 1, max_control);
  const int branching = uniform(rng, 1, 2);
  std::vector<bool> out(control);
  for (int c = 0; c < control; ++c) out[c] = coin(rng);
  // next control for (control, h, l, nondet move)
  std::vector<int> next(control * 4 * branching);
  for (int& n : next) n = uniform(rng, 0, control - 1);

  GameBuilder b;
  const int nondet = b.add_agent("nondet", 0, branching == 1 ? std::vector<std::string>{"0"}
                                                              : std::vector<std::string>{"0", "1"});
  const int high = b.add_agent("high", 0, {"0", "1"});
  const int low = b.add_agent("low", 0, {"0", "1"});
  auto id = [](int c, int h, int l) { return (c * 2 + h) * 2 + l; };
  for (int c = 0; c < control; ++c)
    for (int h = 0; h < 2; ++h)
      for (int l = 0; l < 2; ++l) {
        std::vector<std::string> label;
        if (h) label.push_back("h");
        if (l) label.push_back("l");
        if (out[c]) label.push_back("o");
        b.add_state("c" + std::to_string(c) + "h" + std::to_string(h) + "l" + std::to_string(l), label);
      }
  for (int c = 0; c < control; ++c)
    for (int h = 0; h < 2; ++h)
      for (int l = 0; l < 2; ++l)
        b.set_transitions(id(c, h, l), [=](const std::vector<int>& mv) {
          const int c2 = next[((c * 2 + h) * 2 + l) * branching + mv[nondet]];
          return id(c2, mv[high], mv[low]);
        });
  b.set_initial(0);
  b.set_roles({{"h"}, {"l"}, {"o"}});
  return b.build();
}

// Every state lets `agent` force each valuation of `props` in the successor,
// whatever the other agents do. Brute force over joint moves.
inline bool controls_props(const GameStructure& g, const std::string& agent, const std::vector<std::string>& props) {
  const int who = g.agent_index(agent);
  if (who < 0) return props.empty();
  auto valuation = [&](int s) {
    std::vector<bool> v;
    for (const auto& p : props) v.push_back(g.has_prop(s, g.prop_id(p)));
    return v;
  };
  for (std::size_t s = 0; s < g.num_states(); ++s) {
    std::set<std::vector<bool>> forced;
    for (std::size_t m = 0; m < g.agents[who].moves.size(); ++m) {
      std::optional<std::vector<bool>> common;
      bool fixed = true;
      for (std::size_t j = 0; j < g.num_joint_moves() && fixed; ++j) {
        std::vector<int> mv = g.decode_joint(j);
        if (mv[who] != static_cast<int>(m)) continue;
        auto v = valuation(g.table[s][j]);
        if (common && *common != v) fixed = false;
        common = v;
      }
      if (fixed && common) forced.insert(*common);
    }
    if (forced.size() != (std::size_t{1} << props.size())) return false;
  }
  return true;
}

inline bool input_total(const GameStructure& g) {
  if (!g.roles) return false;
  return controls_props(g, "high", g.roles->high) && controls_props(g, "low", g.roles->low);
}

}  // namespace stratmc::testing
