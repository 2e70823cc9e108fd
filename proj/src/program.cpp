#include "stratmc/program.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>

#include "stratmc/automata.hpp"
#include "stratmc/formula.hpp"

namespace stratmc {

bool Stmt::operator<(const Stmt& o) const {
  return std::tie(kind, var, expr, first, second) < std::tie(o.kind, o.var, o.expr, o.first, o.second);
}

const char* controller_agent(Controller c) {
  switch (c) {
    case Controller::Nondet: return "nondet";
    case Controller::High: return "high";
    case Controller::Low: return "low";
  }
  return "?";
}

int Program::intern(const Stmt& s) const {
  auto it = std::lower_bound(index_.begin(), index_.end(), s,
                             [](const auto& e, const Stmt& k) { return e.first < k; });
  if (it != index_.end() && it->first == s) return it->second;
  int id = static_cast<int>(stmts_.size());
  stmts_.push_back(s);
  index_.insert(it, {s, id});
  return id;
}

int Program::done() const {
  Stmt d;
  auto it = std::lower_bound(index_.begin(), index_.end(), d,
                             [](const auto& e, const Stmt& k) { return e.first < k; });
  if (it == index_.end() || !(it->first == d)) throw std::logic_error("program has no terminated node");
  return it->second;
}

int Program::var_index(std::string_view name) const {
  auto it = std::find(vars.begin(), vars.end(), name);
  return it == vars.end() ? -1 : static_cast<int>(it - vars.begin());
}

std::uint32_t Program::eval(int e, const std::vector<std::uint32_t>& mem) const {
  const Expr& x = exprs.at(e);
  switch (x.kind) {
    case Expr::Kind::Var: return mem.at(x.var);
    case Expr::Kind::True: return mask();
    case Expr::Kind::False: return 0;
    case Expr::Kind::And: return eval(x.left, mem) & eval(x.right, mem);
    case Expr::Kind::Or: return eval(x.left, mem) | eval(x.right, mem);
    case Expr::Kind::Not: return ~eval(x.left, mem) & mask();
  }
  return 0;
}

namespace {

std::string expr_source(const Program& p, int e) {
  const Expr& x = p.exprs[e];
  switch (x.kind) {
    case Expr::Kind::Var: return p.vars[x.var];
    case Expr::Kind::True: return "true";
    case Expr::Kind::False: return "false";
    case Expr::Kind::And: return "(" + expr_source(p, x.left) + " & " + expr_source(p, x.right) + ")";
    case Expr::Kind::Or: return "(" + expr_source(p, x.left) + " | " + expr_source(p, x.right) + ")";
    case Expr::Kind::Not: return "!" + expr_source(p, x.left);
  }
  return "?";
}

}  // namespace

std::string Program::to_source(int id) const {
  const Stmt& s = stmt(id);
  switch (s.kind) {
    case Stmt::Kind::Assign: return vars[s.var] + " := " + expr_source(*this, s.expr);
    case Stmt::Kind::ReadHigh: return "read_h " + vars[s.var];
    case Stmt::Kind::ReadLow: return "read_l " + vars[s.var];
    case Stmt::Kind::If:
      return "if " + expr_source(*this, s.expr) + " { " + to_source(s.first) + " } else { " +
             to_source(s.second) + " }";
    case Stmt::Kind::Choice: return "choose { " + to_source(s.first) + " } or { " + to_source(s.second) + " }";
    case Stmt::Kind::While: return "while " + expr_source(*this, s.expr) + " { " + to_source(s.first) + " }";
    case Stmt::Kind::Seq: return to_source(s.first) + "; " + to_source(s.second);
    case Stmt::Kind::Done: return "done";
  }
  return "?";
}

// ---- parser --------------------------------------------------------------------------

namespace {

class ProgramParser {
 public:
  explicit ProgramParser(std::string_view text) : src_(text) {}

  Program run() {
    headers();
    p_.intern(Stmt{});  // the terminated program always has an id
    skip();
    p_.root = at_end() ? p_.done() : sequence(true);
    skip();
    if (!at_end()) fail("unexpected input");
    return std::move(p_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  bool at_end() const { return pos_ >= src_.size(); }

  void skip() {
    while (!at_end()) {
      if (std::isspace(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
      } else if (src_.compare(pos_, 2, "//") == 0) {
        while (!at_end() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string word() {
    skip();
    std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    if (start == pos_) fail("identifier expected");
    return std::string(src_.substr(start, pos_ - start));
  }

  bool peek_word(std::string_view w) {
    skip();
    if (src_.compare(pos_, w.size(), w) != 0) return false;
    std::size_t end = pos_ + w.size();
    return end >= src_.size() || !(std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_');
  }

  bool accept(std::string_view tok) {
    skip();
    if (src_.compare(pos_, tok.size(), tok) != 0) return false;
    pos_ += tok.size();
    return true;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  void headers() {
    bool have_vars = false;
    for (skip(); !at_end() && src_[pos_] == '#'; skip()) {
      ++pos_;
      std::string key = word();
      std::size_t eol = src_.find('\n', pos_);
      if (eol == std::string_view::npos) eol = src_.size();
      std::string_view rest = src_.substr(pos_, eol - pos_);
      std::vector<std::string> items;
      std::string cur;
      for (char c : rest) {
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
          if (!cur.empty()) items.push_back(std::move(cur));
          cur.clear();
        } else {
          cur += c;
        }
      }
      if (!cur.empty()) items.push_back(cur);
      if (key == "vars") {
        for (auto& v : items) {
          if (p_.var_index(v) >= 0) fail("variable '" + v + "' declared twice");
          p_.vars.push_back(v);
        }
        have_vars = true;
      } else if (key == "bits") {
        if (items.size() != 1) fail("#bits takes one number");
        p_.bits = std::stoi(items[0]);
        if (p_.bits < 1 || p_.bits > 16) fail("bit width must be between 1 and 16");
      } else if (key == "out") {
        outputs_ = items;
      } else {
        fail("unknown header '#" + key + "'");
      }
      pos_ = eol;
    }
    if (!have_vars) fail("missing #vars header");
    for (const auto& o : outputs_) {
      int v = p_.var_index(o);
      if (v < 0) fail("output '" + o + "' is not a declared variable");
      p_.outputs.push_back(v);
    }
  }

  int variable() {
    std::size_t at = pos_;
    std::string name = word();
    int v = p_.var_index(name);
    if (v < 0) {
      pos_ = at;
      skip();
      fail("undeclared variable '" + name + "'");
    }
    return v;
  }

  int add_expr(Expr e) {
    p_.exprs.push_back(e);
    return static_cast<int>(p_.exprs.size()) - 1;
  }

  int expr() {
    int left = conj();
    while (accept("|")) left = add_expr({Expr::Kind::Or, -1, left, conj()});
    return left;
  }
  int conj() {
    int left = unary();
    while (accept("&")) left = add_expr({Expr::Kind::And, -1, left, unary()});
    return left;
  }
  int unary() {
    if (accept("!")) return add_expr({Expr::Kind::Not, -1, unary(), -1});
    if (accept("(")) {
      int e = expr();
      expect(")");
      return e;
    }
    if (peek_word("true")) {
      word();
      return add_expr({Expr::Kind::True});
    }
    if (peek_word("false")) {
      word();
      return add_expr({Expr::Kind::False});
    }
    return add_expr({Expr::Kind::Var, variable()});
  }

  int block() {
    expect("{");
    skip();
    if (accept("}")) fail("empty block");
    int body = sequence(false);
    expect("}");
    return body;
  }

  // Statements separated by optional ';', right-nested into Seq nodes.
  int sequence(bool top) {
    std::vector<int> parts{statement()};
    while (true) {
      accept(";");
      skip();
      if (at_end() || (!top && src_[pos_] == '}')) break;
      parts.push_back(statement());
    }
    int acc = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;)
      acc = p_.intern({Stmt::Kind::Seq, -1, -1, parts[i], acc});
    return acc;
  }

  int statement() {
    skip();
    if (peek_word("read_h") || peek_word("read_l")) {
      bool high = word() == "read_h";
      return p_.intern({high ? Stmt::Kind::ReadHigh : Stmt::Kind::ReadLow, variable()});
    }
    if (peek_word("if")) {
      word();
      int cond = expr();
      int then_part = block();
      int else_part = p_.done();
      if (peek_word("else")) {
        word();
        else_part = block();
      }
      return p_.intern({Stmt::Kind::If, -1, cond, then_part, else_part});
    }
    if (peek_word("while")) {
      word();
      int cond = expr();
      return p_.intern({Stmt::Kind::While, -1, cond, block()});
    }
    if (peek_word("choose")) {
      word();
      int a = block();
      if (!peek_word("or")) fail("expected 'or'");
      word();
      return p_.intern({Stmt::Kind::Choice, -1, -1, a, block()});
    }
    int v = variable();
    expect(":=");
    return p_.intern({Stmt::Kind::Assign, v, expr()});
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Program p_;
  std::vector<std::string> outputs_;
};

}  // namespace

Program parse_program(std::string_view text) { return ProgramParser(text).run(); }

// ---- semantics -----------------------------------------------------------------------

Config initial_config(const Program& p) { return {p.root, std::vector<std::uint32_t>(p.vars.size(), 0)}; }

Controller controller(const Program& p, int id) {
  const Stmt& s = p.stmt(id);
  switch (s.kind) {
    case Stmt::Kind::ReadHigh: return Controller::High;
    case Stmt::Kind::ReadLow: return Controller::Low;
    case Stmt::Kind::Seq: return controller(p, s.first);
    default: return Controller::Nondet;
  }
}

namespace {

// Successor configurations of one statement, possibly with duplicates.
std::vector<Config> raw_step(const Program& p, const Config& c) {
  const Stmt s = p.stmt(c.stmt);
  const int done = p.done();
  switch (s.kind) {
    case Stmt::Kind::Done: return {c};
    case Stmt::Kind::Assign: {
      Config n{done, c.mem};
      n.mem[s.var] = p.eval(s.expr, c.mem);
      return {n};
    }
    case Stmt::Kind::ReadHigh:
    case Stmt::Kind::ReadLow: {
      std::vector<Config> out;
      for (std::uint32_t b = 0; b <= p.mask(); ++b) {
        Config n{done, c.mem};
        n.mem[s.var] = b;
        out.push_back(std::move(n));
      }
      return out;
    }
    case Stmt::Kind::If: return {{p.eval(s.expr, c.mem) != 0 ? s.first : s.second, c.mem}};
    case Stmt::Kind::Choice: return {{s.first, c.mem}, {s.second, c.mem}};
    case Stmt::Kind::While:
      if (p.eval(s.expr, c.mem) == 0) return {{done, c.mem}};
      return {{p.intern({Stmt::Kind::Seq, -1, -1, s.first, c.stmt}), c.mem}};
    case Stmt::Kind::Seq: {
      std::vector<Config> out;
      for (auto& n : raw_step(p, {s.first, c.mem})) {
        if (n.stmt != done) n.stmt = p.intern({Stmt::Kind::Seq, -1, -1, n.stmt, s.second});
        else n.stmt = s.second;
        out.push_back(std::move(n));
      }
      return out;
    }
  }
  return {};
}

}  // namespace

std::vector<Step> step(const Program& p, const Config& c) {
  auto next = raw_step(p, c);
  std::sort(next.begin(), next.end());
  next.erase(std::unique(next.begin(), next.end()), next.end());
  const Controller who = controller(p, c.stmt);
  std::vector<Step> out;
  for (auto& n : next) out.push_back({std::move(n), who});
  return out;
}

GameStructure compile_to_cgs(const Program& source, const CompileOptions& opts) {
  Program p = source;
  std::map<Config, int> ids;
  std::vector<Config> configs;
  std::vector<std::vector<int>> succ;
  std::vector<Controller> owner;
  auto id_of = [&](const Config& c) {
    auto [it, fresh] = ids.emplace(c, static_cast<int>(configs.size()));
    if (fresh) {
      if (configs.size() >= opts.max_states)
        throw BudgetExceeded("program has more than " + std::to_string(opts.max_states) +
                             " reachable configurations");
      configs.push_back(c);
    }
    return it->second;
  };
  id_of(initial_config(p));
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const Config c = configs[i];
    std::vector<int> next;
    for (const auto& s : step(p, c)) next.push_back(id_of(s.next));
    succ.push_back(std::move(next));
    owner.push_back(controller(p, c.stmt));
  }

  std::size_t degree = 1;
  for (const auto& s : succ) degree = std::max(degree, s.size());
  std::vector<std::string> moves;
  for (std::size_t m = 0; m < degree; ++m) moves.push_back(std::to_string(m));

  GameBuilder b;
  const int who_n = b.add_agent("nondet", 0, moves);
  const int who_h = b.add_agent("high", 0, moves);
  const int who_l = b.add_agent("low", 0, moves);
  auto props = [&](int v, std::uint32_t value) {
    std::vector<std::string> out;
    for (int bit = 0; bit < p.bits; ++bit)
      if (value >> bit & 1u) out.push_back(p.bits == 1 ? p.vars[v] : p.vars[v] + "." + std::to_string(bit));
    return out;
  };
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::vector<std::string> label;
    for (std::size_t v = 0; v < p.vars.size(); ++v) {
      auto ps = props(static_cast<int>(v), configs[i].mem[v]);
      label.insert(label.end(), ps.begin(), ps.end());
    }
    b.add_state("c" + std::to_string(i), label);
  }
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const int agent = owner[i] == Controller::High ? who_h : owner[i] == Controller::Low ? who_l : who_n;
    const auto& next = succ[i];
    b.set_transitions(static_cast<int>(i), [agent, &next](const std::vector<int>& mv) {
      return next[mv[agent] % next.size()];
    });
  }
  b.set_initial(0);

  Roles roles;
  auto all_bits = [&](int v) {
    std::vector<std::string> out;
    for (int bit = 0; bit < p.bits; ++bit)
      out.push_back(p.bits == 1 ? p.vars[v] : p.vars[v] + "." + std::to_string(bit));
    return out;
  };
  std::set<int> high, low;
  for (std::size_t id = 0; id < p.num_stmts(); ++id) {
    const Stmt& s = p.stmt(static_cast<int>(id));
    if (s.kind == Stmt::Kind::ReadHigh) high.insert(s.var);
    if (s.kind == Stmt::Kind::ReadLow) low.insert(s.var);
  }
  for (int v : high)
    for (auto& n : all_bits(v)) roles.high.push_back(n);
  for (int v : low)
    for (auto& n : all_bits(v)) roles.low.push_back(n);
  for (int v : p.outputs)
    for (auto& n : all_bits(v)) roles.out.push_back(n);
  b.set_roles(roles);
  return b.build();
}

}  // namespace stratmc
