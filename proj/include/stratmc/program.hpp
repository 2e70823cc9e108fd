#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stratmc/game.hpp"

namespace stratmc {

// Boolean expressions evaluate bitwise over the program's bit width; a
// condition holds when any bit is set.
struct Expr {
  enum class Kind { Var, True, False, And, Or, Not } kind = Kind::True;
  int var = -1;
  int left = -1, right = -1;  // indices into Program::exprs
};

struct Stmt {
  enum class Kind { Assign, ReadHigh, ReadLow, If, Choice, While, Seq, Done } kind = Kind::Done;
  int var = -1;
  int expr = -1;
  int first = -1, second = -1;  // sub-statements (Seq, If, Choice; While body in first)
  bool operator==(const Stmt&) const = default;
  bool operator<(const Stmt& o) const;
};

enum class Controller { Nondet, High, Low };
const char* controller_agent(Controller c);  // "nondet", "high", "low"

// Statement nodes are hash-consed: structurally equal statements share an id,
// so program residues compare by id.
class Program {
 public:
  std::vector<std::string> vars;
  std::vector<int> outputs;  // indices into vars
  int bits = 1;
  std::vector<Expr> exprs;
  int root = -1;

  // Logically const: residues created while stepping extend the arena.
  int intern(const Stmt& s) const;
  const Stmt& stmt(int id) const { return stmts_.at(id); }
  int done() const;
  std::size_t num_stmts() const { return stmts_.size(); }
  int var_index(std::string_view name) const;  // -1 when undeclared
  std::uint32_t mask() const { return bits >= 32 ? 0xffffffffu : ((1u << bits) - 1); }
  std::uint32_t eval(int expr, const std::vector<std::uint32_t>& mem) const;
  std::string to_source(int stmt) const;

 private:
  mutable std::vector<Stmt> stmts_;
  mutable std::vector<std::pair<Stmt, int>> index_;  // sorted by Stmt for lookup
};

struct Config {
  int stmt = -1;
  std::vector<std::uint32_t> mem;
  bool operator==(const Config&) const = default;
  auto operator<=>(const Config&) const = default;
};

struct Step {
  Config next;
  Controller who = Controller::Nondet;
};

Program parse_program(std::string_view text);

Config initial_config(const Program& p);
Controller controller(const Program& p, int stmt);
// Distinct successors, sorted; every entry carries the responsible agent.
std::vector<Step> step(const Program& p, const Config& c);

struct CompileOptions {
  std::size_t max_states = 1000000;
};

// Turn-based structure over agents nondet/high/low (stage 0). The controller's
// move i selects successor i modulo the out-degree.
GameStructure compile_to_cgs(const Program& p, const CompileOptions& opts = {});

}  // namespace stratmc
