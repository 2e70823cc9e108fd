#include <doctest.h>

#include "stratmc/formula.hpp"
#include "support.hpp"

using namespace stratmc;
using namespace stratmc::testing;

namespace {

const std::set<std::string> kProgAgents{"nondet", "high", "low"};

int count_quants(const FormulaPtr& f) {
  if (!f) return 0;
  int n = f->op == Op::Quant ? 1 : f->op == Op::Block ? static_cast<int>(f->quants.size()) : 0;
  return n + count_quants(f->left) + count_quants(f->right);
}

void collect_atoms(const FormulaPtr& f, std::set<std::string>& out) {
  if (!f) return;
  if (f->op == Op::Atom) out.insert(f->prop + "_" + f->var);
  collect_atoms(f->left, out);
  collect_atoms(f->right, out);
}

// Random closed formula: a prefix of mixed quantifiers over x0..x(k-1) and a
// body that may contain negations anywhere.
FormulaPtr random_closed(Rng& rng) {
  const int k = uniform(rng, 1, 3);
  std::vector<std::string> vars;
  for (int i = 0; i < k; ++i) vars.push_back("x" + std::to_string(i));
  FormulaPtr f = BodyGen(rng, vars, {3, 4, {"a", "b"}})();
  if (coin(rng)) f = neg(f);
  if (coin(rng)) f = implies(f, BodyGen(rng, vars, {1, 2, {"a"}})());
  const bool as_block = k > 1 && coin(rng);
  std::vector<QuantEntry> qs;
  for (int i = 0; i < k; ++i) {
    QuantEntry q;
    switch (uniform(rng, 0, 3)) {
      case 0: q = exists_q(vars[i]); break;
      case 1: q = forall_q(vars[i]); break;
      case 2: q = strat_q({"low"}, vars[i]); break;
      default: q = strat_q({"high", "nondet"}, vars[i]); q.dual = true; break;
    }
    qs.push_back(q);
  }
  if (as_block) return block(qs, f);
  for (int i = k; i-- > 0;) f = quant(qs[i], f);
  return f;
}

}  // namespace

TEST_CASE("parse: observational determinism is a two-quantifier linear formula") {
  auto f = parse_formula("A p. A q. G (o_p <-> o_q)");
  REQUIRE(f->op == Op::Quant);
  CHECK(f->left->op == Op::Quant);
  auto c = classify(f, kProgAgents);
  CHECK(c.linear);
  CHECK(c.fragment);
  CHECK(c.complex_count == 0);
  CHECK(c.simple_count == 2);
}

TEST_CASE("parse: single strategic quantifier over a constant body") {
  auto f = parse_formula("<sched> p. true");
  REQUIRE(f->op == Op::Quant);
  CHECK(f->quants[0].agents == AgentSet::of({"sched"}));
  CHECK_FALSE(f->quants[0].dual);
  CHECK(f->left->op == Op::True);
}

TEST_CASE("parse: open formulas are rejected with the unbound variables") {
  try {
    parse_formula("G (o_p <-> o_q)");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("p") != std::string::npos);
    CHECK(msg.find("q") != std::string::npos);
  }
}

TEST_CASE("parse: malformed input reports an offset") {
  CHECK_THROWS_AS(parse_formula("A p. (a_p"), ParseError);
  CHECK_THROWS_AS(parse_formula("A p. a_p &"), ParseError);
  CHECK_THROWS_AS(parse_formula("A . a_p"), ParseError);
}

TEST_CASE("to_nnf: until dualises to release") {
  auto f = to_nnf(neg(until(atom("a", "p"), atom("b", "p"))));
  CHECK(structurally_equal(f, release(neg(atom("a", "p")), neg(atom("b", "p")))));
}

TEST_CASE("to_nnf: negated strategic quantifier becomes its dual") {
  auto f = to_nnf(neg(quant(strat_q({"g"}, "p"), atom("a", "p"))));
  REQUIRE(f->op == Op::Quant);
  CHECK(f->quants[0].dual);
  CHECK(structurally_equal(f->left, neg(atom("a", "p"))));
}

TEST_CASE("to_nnf: double negation") {
  CHECK(structurally_equal(to_nnf(neg(neg(atom("a", "p")))), atom("a", "p")));
}

TEST_CASE("classify: stratNI shape and a quantifier under a temporal operator") {
  TemplateParams p;
  p.low = {"l"};
  p.out = {"o"};
  auto c = classify(make_template("stratni", p), kProgAgents);
  CHECK(c.linear);
  CHECK(c.complex_count == 1);
  CHECK(c.simple_count == 1);

  auto nested = quant(strat_q({"g"}, "p"), globally(quant(strat_q({"g"}, "q"), atom("a", "q"))));
  auto n = classify(nested, {"g", "h"});
  CHECK_FALSE(n.linear);
  CHECK_FALSE(n.fragment);
}

TEST_CASE("classify: empty and full coalitions are simple") {
  const std::set<std::string> universe{"g0", "g1"};
  CHECK(quant_kind(strat_q({}, "p"), universe) == QuantKind::Forall);
  CHECK(quant_kind(strat_q({"g0", "g1"}, "p"), universe) == QuantKind::Exists);
  CHECK(quant_kind(strat_q({"g0"}, "p"), universe) == QuantKind::Strategic);
  QuantEntry d = strat_q({"g1"}, "p");
  d.dual = true;
  CHECK(quant_kind(d, universe) == QuantKind::DualStrategic);
  d.agents = AgentSet::of({"g0", "g1"});
  CHECK(quant_kind(d, universe) == QuantKind::Forall);
}

TEST_CASE("prefix_cost: reference cells") {
  using K = QuantKind;
  auto fe = prefix_cost({K::Forall, K::Exists});
  CHECK(fe.d_spec == 1);
  CHECK(fe.d_sys == 2);
  auto ss = prefix_cost({K::Strategic, K::Strategic});
  CHECK(ss.d_spec == 2);
  CHECK(ss.d_sys == 4);
  auto e = prefix_cost({K::Exists});
  CHECK(e.d_spec == 0);
  CHECK(e.d_sys == 1);
}

TEST_CASE("templates: od, od_async and nds shapes") {
  TemplateParams p;
  p.out = {"o"};
  p.low = {"l"};
  CHECK(structurally_equal(make_template("od", p), parse_formula("A p. A q. G (o_p <-> o_q)")));

  auto async = make_template("od_async", p);
  REQUIRE(async->op == Op::Block);
  REQUIRE(async->quants.size() == 2);
  for (const auto& q : async->quants) CHECK(q.agents == AgentSet::of({"sched"}));

  auto nds = make_template("nds", p);
  CHECK(nds->op == Op::Not);
  REQUIRE(nds->left->op == Op::Quant);
  CHECK(quant_kind(nds->left->quants[0], kProgAgents) == QuantKind::Exists);
  CHECK(nds->left->left->quants[0].agents == AgentSet::of({"high"}));

  CHECK_THROWS(make_template("od", TemplateParams{}));  // no outputs declared
  CHECK_THROWS(make_template("nonsense", p));
}

TEST_CASE("templates: aproxgni lookahead binds the shifted system") {
  TemplateParams p;
  p.high = {"h"};
  p.low = {"l"};
  p.out = {"o"};
  auto zero = make_template("aproxgni(0)", p);
  auto two = make_template("aproxgni(2)", p);
  REQUIRE(zero->op == Op::Block);
  CHECK_FALSE(zero->quants[2].system.has_value());
  CHECK(two->quants[2].system == std::optional<std::string>("shifted"));
  CHECK_THROWS(make_template("aproxgni(-1)", p));
}

TEST_CASE("property: print/parse round trip") {
  Rng rng(11);
  const std::set<std::string> systems{"shifted"};
  for (int i = 0; i < 300; ++i) {
    FormulaPtr f = random_closed(rng);
    FormulaPtr back = parse_formula(to_string(f), &systems);
    CHECK_MESSAGE(structurally_equal(f, back), to_string(f));
  }
}

TEST_CASE("property: to_nnf is idempotent and keeps atoms and quantifiers") {
  Rng rng(12);
  for (int i = 0; i < 300; ++i) {
    FormulaPtr f = random_closed(rng);
    FormulaPtr n = to_nnf(f);
    CHECK(is_nnf(n));
    CHECK(structurally_equal(to_nnf(n), n));
    CHECK(count_quants(n) == count_quants(f));
    std::set<std::string> before, after;
    collect_atoms(f, before);
    collect_atoms(n, after);
    CHECK(before == after);
  }
}

TEST_CASE("property: d_sys - d_spec is 1 exactly when the innermost quantifier is simple") {
  Rng rng(13);
  const QuantKind all[] = {QuantKind::Exists, QuantKind::Forall, QuantKind::Strategic, QuantKind::DualStrategic};
  for (int i = 0; i < 500; ++i) {
    std::vector<QuantKind> prefix;
    const int len = uniform(rng, 1, 6);
    for (int j = 0; j < len; ++j) prefix.push_back(all[uniform(rng, 0, 3)]);
    auto r = prefix_cost(prefix);
    const int gap = r.d_sys - r.d_spec;
    CHECK((gap == 1 || gap == 2));
    CHECK((gap == 1) == is_simple(prefix.back()));
    CHECK(r.pair_costs.size() == prefix.size() - 1);
  }
}
