#include <charconv>

#include "stratmc/formula.hpp"

namespace stratmc {

namespace {

// /\_{a in props} (a_x <-> X^shift a_y)
FormulaPtr agree(const std::vector<std::string>& props, const std::string& x, const std::string& y,
                 int shift = 0) {
  std::vector<FormulaPtr> parts;
  for (const auto& a : props) parts.push_back(iff(atom(a, x), next_n(atom(a, y), shift)));
  return conj_all(parts);
}

// \/_{a in props} (a_x <-/-> a_y)
FormulaPtr differ(const std::vector<std::string>& props, const std::string& x,
                  const std::string& y) {
  std::vector<FormulaPtr> parts;
  for (const auto& a : props) parts.push_back(xor_(atom(a, x), atom(a, y)));
  return disj_all(parts);
}

std::vector<std::string> join(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("template needs declared ") + what + " props");
}

FormulaPtr fair(const TemplateParams& p, const std::string& var) {
  return globally(eventually(neg(atom(p.stutter_prop, var))));
}

}  // namespace

std::vector<std::string> template_names() {
  return {"od", "ni", "gni", "stratni", "aproxgni", "simni", "nds", "od_async", "ni_async"};
}

FormulaPtr make_template(std::string_view raw, const TemplateParams& p) {
  std::string name(raw);
  for (auto& c : name)
    if (c == '-') c = '_';
  int lookahead = p.lookahead;
  if (name.rfind("aproxgni(", 0) == 0 && name.back() == ')') {
    std::string_view digits(name.data() + 9, name.size() - 10);
    auto res = std::from_chars(digits.data(), digits.data() + digits.size(), lookahead);
    if (res.ec != std::errc() || lookahead < 0)
      throw std::invalid_argument("bad lookahead in template '" + name + "'");
    name = "aproxgni";
  }

  const std::string pi = "p", pi2 = "q", pi3 = "r";
  if (name == "od") {
    require(!p.out.empty(), "output");
    return quant(forall_q(pi), quant(forall_q(pi2), globally(agree(p.out, pi, pi2))));
  }
  if (name == "ni") {
    require(!p.out.empty(), "output");
    return quant(forall_q(pi),
                 quant(forall_q(pi2), implies(globally(agree(p.low, pi, pi2)),
                                              globally(agree(p.out, pi, pi2)))));
  }
  if (name == "gni") {
    require(!p.out.empty(), "output");
    FormulaPtr body = conj(globally(agree(p.high, pi, pi3)),
                           globally(agree(join(p.low, p.out), pi2, pi3)));
    return quant(forall_q(pi), quant(forall_q(pi2), quant(exists_q(pi3), body)));
  }
  if (name == "stratni") {
    require(!p.out.empty(), "output");
    return quant(forall_q(pi), quant(strat_q({p.nondet_agent, p.low_agent}, pi2),
                                     globally(agree(join(p.low, p.out), pi, pi2))));
  }
  if (name == "aproxgni") {
    require(!p.out.empty(), "output");
    std::optional<std::string> sys;
    if (lookahead > 0) sys = p.shifted_system;
    FormulaPtr body = conj(globally(agree(p.high, pi, pi3, lookahead)),
                           globally(agree(join(p.low, p.out), pi2, pi3, lookahead)));
    return block({forall_q(pi), forall_q(pi2), exists_q(pi3, sys)}, body);
  }
  if (name == "simni") {
    require(!p.out.empty(), "output");
    FormulaPtr body = implies(globally(agree(p.low, pi, pi2, 1)), globally(agree(p.out, pi, pi2, 1)));
    return block({forall_q(pi), strat_q({p.nondet_agent}, pi2, p.shifted_system)}, body);
  }
  if (name == "nds") {
    require(!p.out.empty(), "output");
    FormulaPtr body =
        implies(globally(agree(p.low, pi, pi2)), eventually(differ(p.out, pi, pi2)));
    return neg(quant(exists_q(pi), quant(strat_q({p.high_agent}, pi2), body)));
  }
  if (name == "od_async") {
    require(!p.out.empty(), "output");
    FormulaPtr body = conj(fair(p, pi), conj(fair(p, pi2), globally(agree(p.out, pi, pi2))));
    return block({strat_q({p.sched_agent}, pi), strat_q({p.sched_agent}, pi2)}, body);
  }
  if (name == "ni_async") {
    require(!p.out.empty(), "output");
    FormulaPtr body = conj(fair(p, pi), conj(fair(p, pi2), weak_until(agree(p.out, pi, pi2),
                                                                      differ(p.low, pi, pi2))));
    return block({strat_q({p.sched_agent}, pi), strat_q({p.sched_agent}, pi2)}, body);
  }
  throw std::invalid_argument("unknown template '" + std::string(raw) + "'");
}

}  // namespace stratmc
