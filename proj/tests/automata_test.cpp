#include <doctest.h>

#include "stratmc/automata.hpp"
#include "stratmc/checker.hpp"
#include "support.hpp"

using namespace stratmc;
using namespace stratmc::testing;

namespace {

// One component with a state per valuation of {a, b}: n, A, B, AB.
struct Letters {
  Alphabet alphabet;
  int none, a, b, ab;
};

Letters letters() {
  GameBuilder g;
  g.add_agent("g", 0, {"m"});
  Letters l;
  l.none = g.add_state("n");
  l.a = g.add_state("A", {"a"});
  l.b = g.add_state("B", {"b"});
  l.ab = g.add_state("AB", {"a", "b"});
  for (int s = 0; s < 4; ++s) g.add_transition(s, {-1}, s);
  l.alphabet.components.push_back(std::make_shared<const GameStructure>(g.build()));
  return l;
}

ZippedWord word(std::vector<int> prefix, std::vector<int> period) {
  ZippedWord w;
  for (int s : prefix) w.prefix.push_back({s});
  for (int s : period) w.period.push_back({s});
  return w;
}

AutPtr explicit_automaton(const std::string& text, const Alphabet& alphabet) {
  return parse_automaton(text, alphabet);
}

const std::vector<std::string> kVar{"p"};

// Every lasso over `symbols` with prefix + period <= max_len.
std::vector<ZippedWord> all_lassos(const std::vector<int>& symbols, int max_len) {
  std::vector<ZippedWord> out;
  for (int len = 1; len <= max_len; ++len) {
    std::size_t total = 1;
    for (int i = 0; i < len; ++i) total *= symbols.size();
    for (std::size_t code = 0; code < total; ++code) {
      std::vector<int> letters;
      std::size_t rest = code;
      for (int i = 0; i < len; ++i) {
        letters.push_back(symbols[rest % symbols.size()]);
        rest /= symbols.size();
      }
      for (int split = 0; split < len; ++split)
        out.push_back(word({letters.begin(), letters.begin() + split}, {letters.begin() + split, letters.end()}));
    }
  }
  return out;
}

// Structural scan of the transitions reachable under all letters.
bool mode_holds(const ParityAutomaton& a) {
  auto ls = all_letters(a.alphabet());
  explore(a, ls);
  for (std::size_t q = 0; q < a.num_states(); ++q)
    for (const auto& l : ls) {
      PosBool d = a.delta(static_cast<int>(q), l);
      auto models = d.minimal_models();
      switch (a.mode()) {
        case Mode::Deterministic:
          if (models.size() > 1 || (models.size() == 1 && models[0].size() > 1)) return false;
          break;
        case Mode::Nondeterministic:
          for (const auto& m : models)
            if (m.size() > 1) return false;
          break;
        case Mode::Universal:
          if (models.size() > 1) return false;
          break;
        case Mode::Alternating:
          break;
      }
    }
  return true;
}

}  // namespace

TEST_CASE("ltl_body_to_apa: an atom reads the first letter") {
  Letters l = letters();
  auto apa = ltl_body_to_apa(atom("a", "p"), kVar, l.alphabet);
  CHECK(apa->num_states() == 1);
  CHECK(apa->delta(apa->initial(), {l.a}).is_true());
  CHECK(apa->delta(apa->initial(), {l.b}).is_false());
  CHECK(accepts_lasso(*apa, word({l.a}, {l.none})));
  CHECK_FALSE(accepts_lasso(*apa, word({}, {l.b})));
}

TEST_CASE("ltl_body_to_apa: tautology accepts everything") {
  Letters l = letters();
  auto apa = ltl_body_to_apa(to_nnf(disj(atom("a", "p"), neg(atom("a", "p")))), kVar, l.alphabet);
  for (const auto& w : all_lassos({l.none, l.a, l.b, l.ab}, 3)) CHECK(accepts_lasso(*apa, w));
}

TEST_CASE("ltl_body_to_apa: until waits for its right side") {
  Letters l = letters();
  auto apa = ltl_body_to_apa(until(atom("a", "p"), atom("b", "p")), kVar, l.alphabet);
  CHECK(accepts_lasso(*apa, word({l.a, l.a, l.b}, {l.none})));
  CHECK_FALSE(accepts_lasso(*apa, word({}, {l.a})));
}

TEST_CASE("dualize: complements the atom and is an involution") {
  Letters l = letters();
  AutPtr apa = ltl_body_to_apa(atom("a", "p"), kVar, l.alphabet);
  AutPtr dual = dualize(apa);
  CHECK_FALSE(accepts_lasso(*dual, word({l.a}, {l.none})));
  CHECK(dual->max_color() == apa->max_color() + 1);
  AutPtr twice = dualize(dual);
  for (const auto& w : all_lassos({l.none, l.a, l.b}, 3)) CHECK(accepts_lasso(*twice, w) == accepts_lasso(*apa, w));
}

TEST_CASE("dualize: flips membership on a random three-state automaton") {
  Letters l = letters();
  AutPtr a = explicit_automaton(
      "mode alternating\natom 0 0 a\natom 1 0 b\ninitial 0\n"
      "state 0 color 1 : ((s0 & a0) | s1)\n"
      "state 1 color 2 : ((s2 | !a1) & s1)\n"
      "state 2 color 0 : (s0 & (a0 | s2))\n",
      l.alphabet);
  AutPtr d = dualize(a);
  Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    ZippedWord w = random_lasso(rng, l.alphabet);
    CHECK(accepts_lasso(*d, w) != accepts_lasso(*a, w));
  }
}

TEST_CASE("parity_to_buchi_alt: trivial self loops") {
  Letters l = letters();
  AutPtr good = explicit_automaton("mode alternating\ninitial 0\nstate 0 color 0 : s0\n", l.alphabet);
  AutPtr bad = explicit_automaton("mode alternating\ninitial 0\nstate 0 color 1 : s0\n", l.alphabet);
  for (const auto& w : all_lassos({l.none, l.a}, 3)) {
    CHECK(accepts_lasso(*parity_to_buchi_alt(good), w));
    CHECK_FALSE(accepts_lasso(*parity_to_buchi_alt(bad), w));
  }
}

TEST_CASE("dealternate_mh: conjunction of atoms reads both in the first letter") {
  Letters l = letters();
  AutPtr apa = ltl_body_to_apa(conj(atom("a", "p"), atom("b", "p")), kVar, l.alphabet);
  AutPtr npa = dealternate_mh(parity_to_buchi_alt(apa));
  CHECK(mode_holds(*npa));
  for (int first : {l.none, l.a, l.b, l.ab})
    CHECK(accepts_lasso(*npa, word({first}, {l.none})) == (first == l.ab));
}

TEST_CASE("determinize: eventually a, exhaustively over short lassos") {
  Letters l = letters();
  AutPtr dpa = determinize(ltl_body_to_apa(eventually(atom("a", "p")), kVar, l.alphabet));
  CHECK(dpa->mode() == Mode::Deterministic);
  for (const auto& w : all_lassos({l.none, l.a}, 3)) {
    bool seen = false;
    for (std::size_t i = 0; i < w.length(); ++i) seen = seen || w.at(i)[0] == l.a;
    CHECK(accepts_lasso(*dpa, w) == seen);
  }
}

TEST_CASE("determinize: infinitely often a") {
  Letters l = letters();
  FormulaPtr gfa = globally(eventually(atom("a", "p")));
  AutPtr dpa = determinize(ltl_body_to_apa(gfa, kVar, l.alphabet));
  Rng rng(42);
  for (int i = 0; i < 50; ++i) {
    ZippedWord w = random_lasso(rng, l.alphabet);
    CHECK(accepts_lasso(*dpa, w) == eval_ltl_lasso(gfa, w, kVar, l.alphabet));
  }
}

TEST_CASE("determinize: a branch that keeps dying does not accept") {
  // Regression: a Safra node that turns green and is removed in every period
  // must not make the run accepting.
  Letters l = letters();
  FormulaPtr body = parse_formula(
                        "A p. ((((b_p & b_p) | (a_p & a_p)) | ((true | !b_p) & (!a_p & false))) U "
                        "(((true & b_p) U !a_p) R (a_p | (!b_p U a_p))))")
                        ->left;
  AutPtr dpa = determinize(ltl_body_to_apa(body, kVar, l.alphabet));
  ZippedWord w = word({l.b}, {l.b, l.a, l.ab, l.a, l.a});
  CHECK(accepts_lasso(*dpa, w) == eval_ltl_lasso(body, w, kVar, l.alphabet));
}

TEST_CASE("accepts_lasso: a true transition accepts every lasso") {
  Letters l = letters();
  AutPtr top = explicit_automaton("mode alternating\ninitial 0\nstate 0 color 1 : true\n", l.alphabet);
  for (const auto& w : all_lassos({l.none, l.a, l.b}, 3)) CHECK(accepts_lasso(*top, w));
}

TEST_CASE("is_empty: false initial, accepting self loop, tautology") {
  Letters l = letters();
  CHECK(is_empty(explicit_automaton("mode alternating\ninitial 0\nstate 0 color 0 : false\n", l.alphabet)).empty);
  auto loop = is_empty(explicit_automaton("mode alternating\ninitial 0\nstate 0 color 0 : s0\n", l.alphabet));
  REQUIRE_FALSE(loop.empty);
  REQUIRE(loop.witness.has_value());
  CHECK(loop.witness->prefix.empty());
  CHECK(loop.witness->period.size() == 1);

  auto g = std::make_shared<const GameStructure>(parse_game(
      "agent g stage 0 moves x y\nstate s init label o\nstate t\ntrans s g=x -> s\ntrans s g=y -> t\ntrans t -> s\n"));
  SystemEnv env;
  env.main = g;
  FormulaPtr taut = parse_formula("A p. G (o_p <-> o_p)");
  AutPtr a = build_equiv_automaton(to_nnf(taut), {}, Alphabet{}, env);
  CHECK_FALSE(is_empty(a).empty);
}

TEST_CASE("property: every stage of the chain preserves the language of random bodies") {
  Rng rng(43);
  for (int i = 0; i < 150; ++i) {
    Alphabet alphabet;
    std::vector<std::string> vars;
    const int arity = uniform(rng, 1, 2);
    for (int c = 0; c < arity; ++c) {
      GameShape shape;
      shape.max_states = 3;
      alphabet.components.push_back(std::make_shared<const GameStructure>(random_game(rng, shape)));
      vars.push_back("v" + std::to_string(c));
    }
    FormulaPtr body = BodyGen(rng, vars)();
    auto apa = ltl_body_to_apa(body, vars, alphabet);
    CHECK(apa->max_color() <= 1);
    AutPtr aba = parity_to_buchi_alt(apa);
    AutPtr npa = dealternate_mh(aba);
    AutPtr dpa = determinize(npa);
    AutPtr dual = dualize(apa);
    for (int t = 0; t < 10; ++t) {
      ZippedWord w = random_lasso(rng, alphabet);
      const bool truth = eval_ltl_lasso(body, w, vars, alphabet);
      CHECK(accepts_lasso(*apa, w) == truth);
      CHECK(accepts_lasso(*aba, w) == truth);
      CHECK(accepts_lasso(*npa, w) == truth);
      CHECK(accepts_lasso(*dpa, w) == truth);
      CHECK(accepts_lasso(*dual, w) == !truth);
    }
  }
}

TEST_CASE("property: modes hold after each conversion, determinize is deterministic") {
  Rng rng(44);
  for (int i = 0; i < 60; ++i) {
    Alphabet alphabet;
    alphabet.components.push_back(std::make_shared<const GameStructure>(random_game(rng)));
    FormulaPtr body = BodyGen(rng, {"v"})();
    auto apa = ltl_body_to_apa(body, {"v"}, alphabet);
    AutPtr npa = to_nondeterministic(apa);
    AutPtr dpa = determinize(npa);
    CHECK(mode_holds(*apa));
    CHECK(npa->mode() != Mode::Alternating);
    CHECK(mode_holds(*npa));
    CHECK(dpa->mode() == Mode::Deterministic);
    CHECK(mode_holds(*dpa));
  }
}

TEST_CASE("property: emptiness witnesses are accepted") {
  Rng rng(45);
  int nonempty = 0;
  for (int i = 0; i < 80; ++i) {
    Alphabet alphabet;
    alphabet.components.push_back(std::make_shared<const GameStructure>(random_game(rng)));
    auto apa = ltl_body_to_apa(BodyGen(rng, {"v"})(), {"v"}, alphabet);
    auto r = is_empty(apa);
    if (r.empty) continue;
    ++nonempty;
    REQUIRE(r.witness.has_value());
    CHECK(accepts_lasso(*apa, *r.witness));
  }
  CHECK(nonempty > 10);
}

TEST_CASE("serialize/parse round trip of explicit automata") {
  Rng rng(46);
  Alphabet alphabet;
  alphabet.components.push_back(std::make_shared<const GameStructure>(random_game(rng)));
  for (int i = 0; i < 30; ++i) {
    auto apa = ltl_body_to_apa(BodyGen(rng, {"v"})(), {"v"}, alphabet);
    const std::string text = serialize_automaton(*apa);
    CHECK(serialize_automaton(*parse_automaton(text, alphabet)) == text);
  }
}
