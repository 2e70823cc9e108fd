#include "stratmc/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace stratmc {

AgentSet AgentSet::of(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return {false, std::move(names)};
}

bool AgentSet::contains(const std::string& agent) const {
  return all || std::binary_search(names.begin(), names.end(), agent);
}

namespace {

FormulaPtr make(Op op, FormulaPtr l = nullptr, FormulaPtr r = nullptr) {
  auto f = std::make_shared<Formula>();
  f->op = op;
  f->left = std::move(l);
  f->right = std::move(r);
  return f;
}

}  // namespace

FormulaPtr f_true() {
  static const FormulaPtr t = make(Op::True);
  return t;
}
FormulaPtr f_false() {
  static const FormulaPtr f = make(Op::False);
  return f;
}
FormulaPtr atom(std::string prop, std::string var) {
  auto f = std::make_shared<Formula>();
  f->op = Op::Atom;
  f->prop = std::move(prop);
  f->var = std::move(var);
  return f;
}
FormulaPtr neg(FormulaPtr f) { return make(Op::Not, std::move(f)); }
FormulaPtr conj(FormulaPtr a, FormulaPtr b) { return make(Op::And, std::move(a), std::move(b)); }
FormulaPtr disj(FormulaPtr a, FormulaPtr b) { return make(Op::Or, std::move(a), std::move(b)); }
FormulaPtr next(FormulaPtr f) { return make(Op::Next, std::move(f)); }
FormulaPtr next_n(FormulaPtr f, int times) {
  for (int i = 0; i < times; ++i) f = next(std::move(f));
  return f;
}
FormulaPtr until(FormulaPtr a, FormulaPtr b) { return make(Op::Until, std::move(a), std::move(b)); }
FormulaPtr release(FormulaPtr a, FormulaPtr b) {
  return make(Op::Release, std::move(a), std::move(b));
}
FormulaPtr weak_until(FormulaPtr a, FormulaPtr b) {
  return make(Op::WeakUntil, std::move(a), std::move(b));
}
FormulaPtr implies(FormulaPtr a, FormulaPtr b) { return disj(neg(std::move(a)), std::move(b)); }
FormulaPtr iff(FormulaPtr a, FormulaPtr b) {
  return disj(conj(a, b), conj(neg(a), neg(b)));
}
FormulaPtr xor_(FormulaPtr a, FormulaPtr b) {
  return disj(conj(a, neg(b)), conj(neg(a), b));
}
FormulaPtr eventually(FormulaPtr f) { return until(f_true(), std::move(f)); }
FormulaPtr globally(FormulaPtr f) { return release(f_false(), std::move(f)); }

FormulaPtr conj_all(const std::vector<FormulaPtr>& parts) {
  if (parts.empty()) return f_true();
  FormulaPtr acc = parts.back();
  for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it) acc = conj(*it, acc);
  return acc;
}
FormulaPtr disj_all(const std::vector<FormulaPtr>& parts) {
  if (parts.empty()) return f_false();
  FormulaPtr acc = parts.back();
  for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it) acc = disj(*it, acc);
  return acc;
}

FormulaPtr quant(QuantEntry q, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->op = Op::Quant;
  f->quants.push_back(std::move(q));
  f->left = std::move(body);
  return f;
}
FormulaPtr block(std::vector<QuantEntry> qs, FormulaPtr body) {
  if (qs.empty()) throw std::invalid_argument("parallel block needs at least one quantifier");
  auto f = std::make_shared<Formula>();
  f->op = Op::Block;
  f->quants = std::move(qs);
  f->left = std::move(body);
  return f;
}

QuantEntry forall_q(std::string var, std::optional<std::string> system) {
  return {false, AgentSet::nobody(), std::move(var), std::move(system)};
}
QuantEntry exists_q(std::string var, std::optional<std::string> system) {
  return {false, AgentSet::everyone(), std::move(var), std::move(system)};
}
QuantEntry strat_q(std::vector<std::string> agents, std::string var,
                   std::optional<std::string> system) {
  return {false, AgentSet::of(std::move(agents)), std::move(var), std::move(system)};
}

bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op || a->prop != b->prop || a->var != b->var || a->quants != b->quants)
    return false;
  return structurally_equal(a->left, b->left) && structurally_equal(a->right, b->right);
}

// ---- printing ------------------------------------------------------------------

namespace {

std::string agent_list(const AgentSet& a) {
  if (a.all) return "*";
  std::string out;
  for (std::size_t i = 0; i < a.names.size(); ++i) {
    if (i) out += ",";
    out += a.names[i];
  }
  return out;
}

std::string quant_head(const QuantEntry& q) {
  std::string head;
  if (!q.dual && q.agents.all)
    head = "E";
  else if (!q.dual && q.agents.empty())
    head = "A";
  else if (!q.dual)
    head = "<" + agent_list(q.agents) + ">";
  else
    head = "[[" + agent_list(q.agents) + "]]";
  if (q.system) head += "@" + *q.system;
  return head + " " + q.var + ".";
}

void print(const FormulaPtr& f, std::string& out, bool top) {
  switch (f->op) {
    case Op::True: out += "true"; return;
    case Op::False: out += "false"; return;
    case Op::Atom: out += f->prop + "_" + f->var; return;
    case Op::Not: out += "!"; print(f->left, out, false); return;
    case Op::Next: out += "X "; print(f->left, out, false); return;
    case Op::Quant:
    case Op::Block: {
      if (!top) out += "(";
      if (f->op == Op::Block) {
        out += "[ ";
        for (const auto& q : f->quants) out += quant_head(q) + " ";
        out += "] ";
      } else {
        out += quant_head(f->quants[0]) + " ";
      }
      print(f->left, out, f->left->is_quantifier());
      if (!top) out += ")";
      return;
    }
    default: break;
  }
  const char* sym = f->op == Op::And       ? " & "
                    : f->op == Op::Or      ? " | "
                    : f->op == Op::Until   ? " U "
                    : f->op == Op::Release ? " R "
                                           : " W ";
  out += "(";
  print(f->left, out, false);
  out += sym;
  print(f->right, out, false);
  out += ")";
}

}  // namespace

std::string to_string(const FormulaPtr& f) {
  std::string out;
  print(f, out, true);
  return out;
}

// ---- parsing -------------------------------------------------------------------

namespace {

enum class Tok { Ident, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> toks;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (ident_char(c)) {
      std::size_t j = i;
      while (j < s.size() &&
             (ident_char(s[j]) ||
              (s[j] == '.' && j + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[j + 1])))))
        ++j;
      toks.push_back({Tok::Ident, std::string(s.substr(i, j - i)), i});
      i = j;
      continue;
    }
    for (std::string_view sym : {"<->", "->", "[[", "]]", "<", ">", "[", "]", "(", ")", "!", "&", "|",
                                 ",", ".", "@", "*"}) {
      if (s.substr(i, sym.size()) == sym) {
        toks.push_back({Tok::Sym, std::string(sym), i});
        i += sym.size();
        goto next_token;
      }
    }
    throw ParseError(std::string("unexpected character '") + c + "'", i);
  next_token:;
  }
  toks.push_back({Tok::End, "", s.size()});
  return toks;
}

bool is_keyword(const std::string& s) {
  static const std::unordered_set<std::string> kw = {"true", "false", "X", "F", "G",
                                                     "U",    "R",     "W", "E", "A"};
  return kw.count(s) > 0;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const std::set<std::string>* systems)
      : toks_(std::move(toks)), systems_(systems) {}

  FormulaPtr parse_all() {
    FormulaPtr f = parse_iff();
    if (peek().kind != Tok::End) fail("unexpected token '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(idx_ + ahead, toks_.size() - 1)];
  }
  bool is_sym(const char* s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Sym && peek(ahead).text == s;
  }
  bool is_ident(const char* s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Ident && peek(ahead).text == s;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().pos); }
  void expect_sym(const char* s) {
    if (!is_sym(s)) fail(std::string("expected '") + s + "'");
    ++idx_;
  }
  std::string expect_name(const char* what) {
    if (peek().kind != Tok::Ident || is_keyword(peek().text) ||
        peek().text.find('_') != std::string::npos)
      fail(std::string("expected ") + what);
    return toks_[idx_++].text;
  }

  FormulaPtr parse_iff() {
    FormulaPtr f = parse_imp();
    while (is_sym("<->")) {
      ++idx_;
      f = iff(f, parse_imp());
    }
    return f;
  }
  FormulaPtr parse_imp() {
    FormulaPtr f = parse_or();
    if (is_sym("->")) {
      ++idx_;
      return implies(f, parse_imp());
    }
    return f;
  }
  FormulaPtr parse_or() {
    FormulaPtr f = parse_and();
    while (is_sym("|")) {
      ++idx_;
      f = disj(f, parse_and());
    }
    return f;
  }
  FormulaPtr parse_and() {
    FormulaPtr f = parse_temporal();
    while (is_sym("&")) {
      ++idx_;
      f = conj(f, parse_temporal());
    }
    return f;
  }
  FormulaPtr parse_temporal() {
    FormulaPtr f = parse_unary();
    if (is_ident("U") || is_ident("R") || is_ident("W")) {
      char k = peek().text[0];
      ++idx_;
      FormulaPtr r = parse_temporal();
      return k == 'U' ? until(f, r) : k == 'R' ? release(f, r) : weak_until(f, r);
    }
    return f;
  }

  bool at_quant_head() const {
    if (is_sym("<") || is_sym("[[")) return true;
    if ((is_ident("E") || is_ident("A")) && (peek(1).kind == Tok::Ident || is_sym("@", 1)))
      return true;
    return false;
  }

  std::vector<std::string> parse_agent_list(const char* close, bool& all) {
    std::vector<std::string> names;
    all = false;
    if (is_sym("*")) {
      ++idx_;
      all = true;
    } else if (!is_sym(close)) {
      names.push_back(expect_name("agent name"));
      while (is_sym(",")) {
        ++idx_;
        names.push_back(expect_name("agent name"));
      }
    }
    expect_sym(close);
    return names;
  }

  QuantEntry parse_quant_head() {
    QuantEntry q;
    if (is_ident("E") || is_ident("A")) {
      q.agents = is_ident("E") ? AgentSet::everyone() : AgentSet::nobody();
      ++idx_;
    } else {
      q.dual = is_sym("[[");
      ++idx_;
      bool all = false;
      auto names = parse_agent_list(q.dual ? "]]" : ">", all);
      q.agents = all ? AgentSet::everyone() : AgentSet::of(std::move(names));
    }
    if (is_sym("@")) {
      ++idx_;
      std::size_t pos = peek().pos;
      q.system = expect_name("system name");
      if (systems_ && !systems_->count(*q.system))
        throw ParseError("unknown system '" + *q.system + "'", pos);
    }
    q.var = expect_name("path variable");
    expect_sym(".");
    return q;
  }

  FormulaPtr parse_unary() {
    if (is_sym("!")) {
      ++idx_;
      return neg(parse_unary());
    }
    if (is_ident("X")) {
      ++idx_;
      return next(parse_unary());
    }
    if (is_ident("F")) {
      ++idx_;
      return eventually(parse_unary());
    }
    if (is_ident("G")) {
      ++idx_;
      return globally(parse_unary());
    }
    if (at_quant_head()) {
      QuantEntry q = parse_quant_head();
      return quant(std::move(q), parse_iff());
    }
    if (is_sym("[")) {
      ++idx_;
      std::vector<QuantEntry> qs;
      while (!is_sym("]")) {
        if (!at_quant_head()) fail("expected quantifier inside parallel block");
        qs.push_back(parse_quant_head());
      }
      ++idx_;
      if (qs.empty()) fail("empty parallel block");
      return block(std::move(qs), parse_iff());
    }
    return parse_primary();
  }

  FormulaPtr parse_primary() {
    if (is_sym("(")) {
      ++idx_;
      FormulaPtr f = parse_iff();
      expect_sym(")");
      return f;
    }
    if (is_ident("true")) {
      ++idx_;
      return f_true();
    }
    if (is_ident("false")) {
      ++idx_;
      return f_false();
    }
    if (peek().kind == Tok::Ident) {
      const std::string& t = peek().text;
      auto us = t.rfind('_');
      if (us == std::string::npos || us == 0 || us + 1 == t.size())
        fail("expected atom of the form prop_var, got '" + t + "'");
      ++idx_;
      return atom(t.substr(0, us), t.substr(us + 1));
    }
    fail("unexpected " + (peek().kind == Tok::End ? std::string("end of input")
                                                  : "token '" + peek().text + "'"));
  }

  std::vector<Token> toks_;
  std::size_t idx_ = 0;
  const std::set<std::string>* systems_;
};

// Renames binders so that every path variable is bound once, and reports
// atoms whose variable is unbound.
class Renamer {
 public:
  FormulaPtr run(const FormulaPtr& f) {
    FormulaPtr out = walk(f);
    if (!unbound_.empty()) {
      std::string msg = "unbound path variable(s):";
      for (const auto& v : unbound_) msg += " " + v;
      throw ParseError(msg, 0);
    }
    return out;
  }

 private:
  std::string fresh(const std::string& v) {
    std::string cand = v;
    while (used_.count(cand)) cand += "'";
    used_.insert(cand);
    return cand;
  }

  FormulaPtr walk(const FormulaPtr& f) {
    auto it = memo_.find(f.get());
    if (it != memo_.end()) return it->second;
    FormulaPtr out;
    switch (f->op) {
      case Op::True:
      case Op::False: out = f; break;
      case Op::Atom: {
        auto s = scope_.find(f->var);
        if (s == scope_.end()) {
          unbound_.insert(f->var);
          out = f;
        } else {
          out = s->second == f->var ? f : atom(f->prop, s->second);
        }
        break;
      }
      case Op::Quant:
      case Op::Block: {
        auto saved_scope = scope_;
        auto saved_memo = std::move(memo_);
        memo_.clear();
        std::vector<QuantEntry> qs = f->quants;
        for (auto& q : qs) {
          std::string renamed = fresh(q.var);
          scope_[q.var] = renamed;
          q.var = renamed;
        }
        FormulaPtr body = walk(f->left);
        scope_ = std::move(saved_scope);
        memo_ = std::move(saved_memo);
        out = f->op == Op::Quant ? quant(qs[0], body) : block(qs, body);
        // binders must not be shared, so quantified nodes are never memoized
        return out;
      }
      default: {
        FormulaPtr l = f->left ? walk(f->left) : nullptr;
        FormulaPtr r = f->right ? walk(f->right) : nullptr;
        if (l == f->left && r == f->right) {
          out = f;
        } else {
          auto copy = std::make_shared<Formula>(*f);
          copy->left = l;
          copy->right = r;
          out = copy;
        }
      }
    }
    memo_[f.get()] = out;
    return out;
  }

  std::set<std::string> used_;
  std::set<std::string> unbound_;
  std::map<std::string, std::string> scope_;
  std::unordered_map<const Formula*, FormulaPtr> memo_;
};

}  // namespace

FormulaPtr parse_formula(std::string_view text, const std::set<std::string>* systems) {
  Parser p(lex(text), systems);
  return Renamer().run(p.parse_all());
}

// ---- normal form and queries ----------------------------------------------------

namespace {

class NnfBuilder {
 public:
  FormulaPtr build(const FormulaPtr& f, bool negated) {
    auto key = std::make_pair(f.get(), negated);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    FormulaPtr out = compute(f, negated);
    memo_[key] = out;
    return out;
  }

 private:
  FormulaPtr compute(const FormulaPtr& f, bool negated) {
    switch (f->op) {
      case Op::True: return negated ? f_false() : f_true();
      case Op::False: return negated ? f_true() : f_false();
      case Op::Atom: return negated ? neg(f) : f;
      case Op::Not: return build(f->left, !negated);
      case Op::Next: return next(build(f->left, negated));
      case Op::And:
        return negated ? disj(build(f->left, true), build(f->right, true))
                       : conj(build(f->left, false), build(f->right, false));
      case Op::Or:
        return negated ? conj(build(f->left, true), build(f->right, true))
                       : disj(build(f->left, false), build(f->right, false));
      case Op::Until:
        return negated ? release(build(f->left, true), build(f->right, true))
                       : until(build(f->left, false), build(f->right, false));
      case Op::Release:
        return negated ? until(build(f->left, true), build(f->right, true))
                       : release(build(f->left, false), build(f->right, false));
      case Op::WeakUntil: {
        if (!negated) return weak_until(build(f->left, false), build(f->right, false));
        // !(a W b) == (!b) U (!a & !b)
        FormulaPtr nb = build(f->right, true);
        return until(nb, conj(build(f->left, true), nb));
      }
      case Op::Quant:
      case Op::Block: {
        std::vector<QuantEntry> qs = f->quants;
        if (negated)
          for (auto& q : qs) q.dual = !q.dual;
        FormulaPtr body = build(f->left, negated);
        return f->op == Op::Quant ? quant(qs[0], body) : block(qs, body);
      }
    }
    return f;
  }

  std::map<std::pair<const Formula*, bool>, FormulaPtr> memo_;
};

template <typename Fn>
void visit_unique(const FormulaPtr& f, std::unordered_set<const Formula*>& seen, Fn&& fn) {
  if (!f || !seen.insert(f.get()).second) return;
  fn(f);
  visit_unique(f->left, seen, fn);
  visit_unique(f->right, seen, fn);
}

}  // namespace

FormulaPtr to_nnf(const FormulaPtr& f) { return NnfBuilder().build(f, false); }

bool is_nnf(const FormulaPtr& f) {
  bool ok = true;
  std::unordered_set<const Formula*> seen;
  visit_unique(f, seen, [&](const FormulaPtr& g) {
    if (g->op == Op::Not && g->left->op != Op::Atom) ok = false;
  });
  return ok;
}

bool quantifier_free(const FormulaPtr& f) {
  bool ok = true;
  std::unordered_set<const Formula*> seen;
  visit_unique(f, seen, [&](const FormulaPtr& g) {
    if (g->is_quantifier()) ok = false;
  });
  return ok;
}

std::set<std::string> free_vars(const FormulaPtr& f) {
  std::set<std::string> out;
  std::function<void(const FormulaPtr&, std::set<std::string>&)> go =
      [&](const FormulaPtr& g, std::set<std::string>& bound) {
        if (!g) return;
        if (g->op == Op::Atom) {
          if (!bound.count(g->var)) out.insert(g->var);
          return;
        }
        if (g->is_quantifier()) {
          auto inner = bound;
          for (const auto& q : g->quants) inner.insert(q.var);
          go(g->left, inner);
          return;
        }
        go(g->left, bound);
        go(g->right, bound);
      };
  std::set<std::string> bound;
  go(f, bound);
  return out;
}

std::size_t formula_size(const FormulaPtr& f) {
  std::unordered_set<const Formula*> seen;
  visit_unique(f, seen, [](const FormulaPtr&) {});
  return seen.size();
}

int temporal_depth_ops(const FormulaPtr& f) {
  int n = 0;
  std::unordered_set<const Formula*> seen;
  visit_unique(f, seen, [&](const FormulaPtr& g) {
    if (g->op == Op::Next || g->op == Op::Until || g->op == Op::Release || g->op == Op::WeakUntil)
      ++n;
  });
  return n;
}

// ---- classification ------------------------------------------------------------

QuantKind quant_kind(const QuantEntry& q, const std::set<std::string>& universe) {
  bool full = q.agents.all;
  if (!full && !universe.empty()) {
    full = std::all_of(universe.begin(), universe.end(),
                       [&](const std::string& a) { return q.agents.contains(a); });
  }
  bool none = !q.agents.all && std::none_of(universe.begin(), universe.end(), [&](const std::string& a) {
    return q.agents.contains(a);
  });
  if (full) return q.dual ? QuantKind::Forall : QuantKind::Exists;
  if (none) return q.dual ? QuantKind::Exists : QuantKind::Forall;
  return q.dual ? QuantKind::DualStrategic : QuantKind::Strategic;
}

const char* kind_name(QuantKind k) {
  switch (k) {
    case QuantKind::Exists: return "exists";
    case QuantKind::Forall: return "forall";
    case QuantKind::Strategic: return "strategic";
    case QuantKind::DualStrategic: return "dual-strategic";
  }
  return "?";
}

std::optional<Prefix> split_prefix(const FormulaPtr& nnf) {
  Prefix p;
  FormulaPtr cur = nnf;
  int quant_nodes = 0;
  while (cur->is_quantifier()) {
    p.is_block = cur->op == Op::Block;
    for (const auto& q : cur->quants) p.quants.push_back(q);
    cur = cur->left;
    ++quant_nodes;
  }
  if (!quantifier_free(cur)) return std::nullopt;
  if (quant_nodes != 1) p.is_block = false;
  p.body = cur;
  return p;
}

Classification classify(const FormulaPtr& f, const std::set<std::string>& universe) {
  Classification c;
  auto prefix = split_prefix(to_nnf(f));
  if (!prefix) return c;
  c.linear = true;
  for (const auto& q : prefix->quants) {
    QuantKind k = quant_kind(q, universe);
    c.kinds.push_back(k);
    (is_simple(k) ? c.simple_count : c.complex_count)++;
  }
  bool uniform = !c.kinds.empty() &&
                 std::all_of(c.kinds.begin(), c.kinds.end(), [&](QuantKind k) {
                   return is_simple(k) && k == c.kinds.front();
                 });
  c.fragment = prefix->is_block || c.kinds.size() == 1 || uniform;
  return c;
}

int alternation_cost(QuantKind outer, QuantKind inner) {
  auto rank = [](QuantKind k) {
    switch (k) {
      case QuantKind::Exists: return 0;
      case QuantKind::Forall: return 1;
      case QuantKind::Strategic: return 2;
      case QuantKind::DualStrategic: return 3;
    }
    return 0;
  };
  static const int table[4][4] = {
      {0, 1, 1, 1},
      {1, 0, 1, 1},
      {1, 1, 2, 2},
      {1, 1, 2, 2},
  };
  return table[rank(outer)][rank(inner)];
}

CostReport prefix_cost(const std::vector<QuantKind>& prefix) {
  if (prefix.empty()) throw std::invalid_argument("prefix cost needs at least one quantifier");
  CostReport r;
  r.d_sys = is_simple(prefix.back()) ? 1 : 2;
  for (std::size_t i = 0; i + 1 < prefix.size(); ++i) {
    int q = alternation_cost(prefix[i], prefix[i + 1]);
    r.pair_costs.push_back(q);
    r.d_spec += q;
  }
  r.d_sys += r.d_spec;
  return r;
}

CostReport prefix_cost(const FormulaPtr& f, const std::set<std::string>& universe) {
  Classification c = classify(f, universe);
  if (!c.linear) throw std::invalid_argument("prefix cost is defined for linear formulas only");
  return prefix_cost(c.kinds);
}

}  // namespace stratmc
