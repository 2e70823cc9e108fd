#include <doctest.h>

#include "stratmc/checker.hpp"
#include "stratmc/counter.hpp"
#include "stratmc/program.hpp"
#include "stratmc/tables.hpp"
#include "support.hpp"

using namespace stratmc;
using namespace stratmc::testing;

namespace {

GamePtr program_game(const char* file, bool stutter = false) {
  GameStructure g = compile_to_cgs(load_program(std::string(STRATMC_CORPUS_DIR) + "/programs/" + file));
  return std::make_shared<const GameStructure>(stutter ? stutterize(g) : g);
}

SystemEnv env_for(GamePtr g, int shift_by = 1) {
  SystemEnv env;
  env.main = g;
  env.named["shifted"] = std::make_shared<const GameStructure>(shift(*g, shift_by));
  return env;
}

// Two-state turn-based game: `owner` picks between an a-labeled and an
// unlabeled successor of the start state.
GamePtr choice_game(const std::string& owner) {
  return std::make_shared<const GameStructure>(parse_game(
      "agent me stage 0 moves l r\nagent you stage 0 moves l r\n"
      "state start init\nstate good label a\nstate bad\n"
      "trans start " + owner + "=l -> good\ntrans start " + owner + "=r -> bad\n"
      "trans good -> good\ntrans bad -> bad\n"));
}

}  // namespace

TEST_CASE("eval_ltl_lasso: globally true") {
  Rng rng(61);
  Alphabet alphabet;
  alphabet.components.push_back(std::make_shared<const GameStructure>(random_game(rng)));
  for (int i = 0; i < 10; ++i)
    CHECK(eval_ltl_lasso(globally(f_true()), random_lasso(rng, alphabet), {"p"}, alphabet));
}

TEST_CASE("eval_ltl_lasso: the canonical counter satisfies correct_1, a challenged flip does not") {
  auto g = std::make_shared<const GameStructure>(counter_game());
  Alphabet alphabet;
  alphabet.components.push_back(g);
  const std::vector<std::string> vars{counter_var(1)};
  auto cols = canonical_counter(2, 128);
  CHECK(eval_ltl_lasso(counter_correct(1, 2), counter_lasso(*g, {}, cols), vars, alphabet));
  auto bad = cols;
  bad[26].b = !bad[26].b;
  bad[26].error = true;
  CHECK_FALSE(eval_ltl_lasso(counter_correct(1, 2), counter_lasso(*g, bad, cols), vars, alphabet));
}

TEST_CASE("build_equiv_automaton: atom, tautological system, strategic choice") {
  Rng rng(62);
  GameShape shape;
  auto g = std::make_shared<const GameStructure>(random_game(rng, shape));
  SystemEnv env;
  env.main = g;
  Alphabet alphabet;
  alphabet.components.push_back(g);
  AutPtr atom_aut = build_equiv_automaton(atom("a", "p"), {"p"}, alphabet, env);
  CHECK(atom_aut->num_states() == 1);

  auto loop = std::make_shared<const GameStructure>(
      parse_game("agent g stage 0 moves m\nstate s init label a\ntrans s -> s\n"));
  SystemEnv loop_env;
  loop_env.main = loop;
  CHECK_FALSE(is_empty(build_equiv_automaton(parse_formula("E p. G a_p"), {}, Alphabet{}, loop_env)).empty);

  for (const auto& [owner, expected] : {std::pair{"me", true}, std::pair{"you", false}}) {
    SystemEnv e;
    e.main = choice_game(owner);
    FormulaPtr f = parse_formula("<me> p. X a_p");
    CHECK(is_empty(build_equiv_automaton(to_nnf(f), {}, Alphabet{}, e)).empty == !expected);
    CHECK(mc_fragment(e, f).holds == expected);
    CHECK(mc_full(e, f).holds == expected);
  }
}

TEST_CASE("mc_full: forall true holds everywhere") {
  Rng rng(63);
  for (int i = 0; i < 5; ++i) {
    SystemEnv env;
    env.main = std::make_shared<const GameStructure>(random_game(rng));
    CHECK(mc_full(env, parse_formula("A p. true")).holds);
  }
}

TEST_CASE("mc_full: P3 satisfies GNI and the implication to stratNI is respected") {
  SystemEnv env = env_for(program_game("p3.bw"));
  TemplateParams params = params_for(*env.main);
  const bool gni = mc_full(env, make_template("gni", params)).holds;
  const bool strat = model_check(env, make_template("stratni", params)).holds;
  CHECK(gni);
  CHECK((!strat || gni));
}

TEST_CASE("mc_fragment: reference verdicts") {
  {
    SystemEnv env = env_for(program_game("p2.bw"));
    CHECK_FALSE(mc_fragment(env, make_template("od", params_for(*env.main))).holds);
  }
  {
    SystemEnv env = env_for(program_game("p4.bw"));
    CHECK_FALSE(mc_fragment(env, make_template("simni", params_for(*env.main))).holds);
  }
  {
    SystemEnv env = env_for(program_game("q1.bw", true));
    CHECK(mc_fragment(env, make_template("od_async", params_for(*env.main))).holds);
  }
}

TEST_CASE("mc_fragment: witness strategy is attached on request") {
  SystemEnv env = env_for(program_game("q1.bw", true));
  CheckOptions opts;
  opts.witness = true;
  Verdict v = mc_fragment(env, make_template("od_async", params_for(*env.main)), opts);
  REQUIRE(v.witness.has_value());
  CHECK_FALSE(v.witness->empty());
}

TEST_CASE("mc_fragment: ineligible formulas are refused") {
  SystemEnv env = env_for(program_game("p1.bw"));
  FormulaPtr f = parse_formula("A p. <nondet> q. E r. G (o_p <-> o_r)");
  CHECK_FALSE(fragment_eligible(env, f));
  CHECK_THROWS(mc_fragment(env, f));
}

TEST_CASE("security_simulation_exists: P3, P4, constant output") {
  CHECK(security_simulation_exists(*program_game("p3.bw")));
  CHECK_FALSE(security_simulation_exists(*program_game("p4.bw")));
  GameStructure constant = compile_to_cgs(parse_program("#vars o\n#out o\n"));
  CHECK(constant.num_states() == 1);
  CHECK(security_simulation_exists(constant));
}

TEST_CASE("property: duality of negation on both engines") {
  Rng rng(64);
  int checked = 0;
  for (int i = 0; i < 80; ++i) {
    GameShape shape;
    shape.max_states = 3;
    SystemEnv env;
    env.main = std::make_shared<const GameStructure>(random_game(rng, shape));
    FormulaPtr body = BodyGen(rng, {"x"}, {3, 3, {"a", "b"}})();
    QuantEntry q = coin(rng) ? strat_q({"g0"}, "x") : (coin(rng) ? exists_q("x") : forall_q("x"));
    FormulaPtr f = quant(q, body);
    CheckOptions opts;
    opts.automaton_states = 100000;
    try {
      CHECK(mc_full(env, neg(f), opts).holds == !mc_full(env, f, opts).holds);
      if (fragment_eligible(env, f) && fragment_eligible(env, neg(f)))
        CHECK(mc_fragment(env, neg(f), opts).holds == !mc_fragment(env, f, opts).holds);
      ++checked;
    } catch (const BudgetExceeded&) {
    }
  }
  CHECK(checked >= 60);
}

TEST_CASE("property: quantifier-free levels of the full construction agree with the lasso semantics") {
  Rng rng(65);
  for (int i = 0; i < 20; ++i) {
    Alphabet alphabet;
    std::vector<std::string> vars{"x", "y"};
    SystemEnv env;
    env.main = std::make_shared<const GameStructure>(random_game(rng));
    alphabet.components = {env.main, env.main};
    FormulaPtr body = BodyGen(rng, vars)();
    AutPtr a = build_equiv_automaton(to_nnf(body), vars, alphabet, env);
    for (int t = 0; t < 100; ++t) {
      ZippedWord w = random_lasso(rng, alphabet);
      CHECK(accepts_lasso(*a, w) == eval_ltl_lasso(body, w, vars, alphabet));
    }
  }
}

TEST_CASE("property: engines agree on fragment-eligible formulas over larger games") {
  Rng rng(66);
  int checked = 0;
  for (int i = 0; i < 60; ++i) {
    GameShape shape;
    shape.min_states = 4;
    shape.max_states = 8;
    SystemEnv env;
    env.main = std::make_shared<const GameStructure>(random_game(rng, shape));
    FormulaPtr body = BodyGen(rng, {"x", "y"}, {4, 4, {"a", "b"}})();
    FormulaPtr f = coin(rng) ? block({strat_q({"g0"}, "x"), forall_q("y")}, body)
                             : quant(exists_q("x"), quant(exists_q("y"), body));
    if (!fragment_eligible(env, f)) continue;
    CheckOptions opts;
    opts.automaton_states = 100000;
    try {
      CHECK(mc_full(env, f, opts).holds == mc_fragment(env, f, opts).holds);
      ++checked;
    } catch (const BudgetExceeded&) {
    }
  }
  CHECK(checked >= 40);
}
