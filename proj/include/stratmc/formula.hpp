#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stratmc {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " at offset " + std::to_string(pos)), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

// Agents a quantifier talks about. `all` means the full agent set of whatever
// structure the quantifier is bound to; otherwise `names` is sorted and unique.
struct AgentSet {
  bool all = false;
  std::vector<std::string> names;

  static AgentSet everyone() { return {true, {}}; }
  static AgentSet nobody() { return {false, {}}; }
  static AgentSet of(std::vector<std::string> names);

  bool empty() const { return !all && names.empty(); }
  bool contains(const std::string& agent) const;
  bool operator==(const AgentSet&) const = default;
};

struct QuantEntry {
  bool dual = false;  // [[A]] instead of <A>
  AgentSet agents;
  std::string var;
  std::optional<std::string> system;
  bool operator==(const QuantEntry&) const = default;
};

enum class Op { True, False, Atom, Not, And, Or, Next, Until, Release, WeakUntil, Quant, Block };

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable AST node. Unary operators and quantifiers keep their operand in
// `left`; `quants` has exactly one entry for Quant and at least one for Block.
class Formula {
 public:
  Op op = Op::True;
  std::string prop;
  std::string var;
  std::vector<QuantEntry> quants;
  FormulaPtr left;
  FormulaPtr right;

  bool is_quantifier() const { return op == Op::Quant || op == Op::Block; }
  bool is_binary() const {
    return op == Op::And || op == Op::Or || op == Op::Until || op == Op::Release ||
           op == Op::WeakUntil;
  }
};

// Constructors. Derived operators are expanded immediately into the primitive set.
FormulaPtr f_true();
FormulaPtr f_false();
FormulaPtr atom(std::string prop, std::string var);
FormulaPtr neg(FormulaPtr f);
FormulaPtr conj(FormulaPtr a, FormulaPtr b);
FormulaPtr disj(FormulaPtr a, FormulaPtr b);
FormulaPtr next(FormulaPtr f);
FormulaPtr next_n(FormulaPtr f, int times);
FormulaPtr until(FormulaPtr a, FormulaPtr b);
FormulaPtr release(FormulaPtr a, FormulaPtr b);
FormulaPtr weak_until(FormulaPtr a, FormulaPtr b);
FormulaPtr implies(FormulaPtr a, FormulaPtr b);
FormulaPtr iff(FormulaPtr a, FormulaPtr b);
FormulaPtr xor_(FormulaPtr a, FormulaPtr b);
FormulaPtr eventually(FormulaPtr f);
FormulaPtr globally(FormulaPtr f);
FormulaPtr conj_all(const std::vector<FormulaPtr>& parts);  // empty -> true
FormulaPtr disj_all(const std::vector<FormulaPtr>& parts);  // empty -> false
FormulaPtr quant(QuantEntry q, FormulaPtr body);
FormulaPtr block(std::vector<QuantEntry> qs, FormulaPtr body);

QuantEntry forall_q(std::string var, std::optional<std::string> system = std::nullopt);
QuantEntry exists_q(std::string var, std::optional<std::string> system = std::nullopt);
QuantEntry strat_q(std::vector<std::string> agents, std::string var,
                   std::optional<std::string> system = std::nullopt);

bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b);
std::string to_string(const FormulaPtr& f);

// Parses the ASCII syntax, expands derived operators, alpha-renames clashing
// binders and rejects open formulas. When `systems` is non-null every @SYS
// annotation must name one of its members.
FormulaPtr parse_formula(std::string_view text, const std::set<std::string>* systems = nullptr);

FormulaPtr to_nnf(const FormulaPtr& f);
bool is_nnf(const FormulaPtr& f);
bool quantifier_free(const FormulaPtr& f);
std::set<std::string> free_vars(const FormulaPtr& f);
std::size_t formula_size(const FormulaPtr& f);  // tree size, shared nodes counted once
int temporal_depth_ops(const FormulaPtr& f);    // number of temporal operator nodes

// ---- classification and prefix cost ----------------------------------------

enum class QuantKind { Exists, Forall, Strategic, DualStrategic };

// Kind of a quantifier relative to the agent universe of its structure.
QuantKind quant_kind(const QuantEntry& q, const std::set<std::string>& universe);
inline bool is_simple(QuantKind k) { return k == QuantKind::Exists || k == QuantKind::Forall; }
const char* kind_name(QuantKind k);

struct Classification {
  bool linear = false;
  bool fragment = false;           // single block (possibly after wrapping) + LTL body
  std::vector<QuantKind> kinds;    // prefix order; empty when not linear
  int complex_count = 0;
  int simple_count = 0;
};

struct Prefix {
  std::vector<QuantEntry> quants;
  bool is_block = false;  // true when the prefix is one parallel block
  FormulaPtr body;
};

// Splits a linear formula (after NNF) into its quantifier prefix and body.
// Returns nullopt when the formula is not linear.
std::optional<Prefix> split_prefix(const FormulaPtr& nnf);

Classification classify(const FormulaPtr& f, const std::set<std::string>& universe);

struct CostReport {
  int d_spec = 0;
  int d_sys = 0;
  std::vector<int> pair_costs;  // q(Q_i, Q_{i+1}) for adjacent prefix entries
};

int alternation_cost(QuantKind outer, QuantKind inner);
CostReport prefix_cost(const std::vector<QuantKind>& prefix);
CostReport prefix_cost(const FormulaPtr& f, const std::set<std::string>& universe);

// ---- property templates ------------------------------------------------------

struct TemplateParams {
  std::vector<std::string> high, low, out;
  int lookahead = 1;                      // aproxgni(n)
  std::string shifted_system = "shifted"; // system ref bound to the shifted copy
  std::string nondet_agent = "nondet";
  std::string low_agent = "low";
  std::string high_agent = "high";
  std::string sched_agent = "sched";
  std::string stutter_prop = "stut";
};

// Accepted names: od, ni, gni, stratni, aproxgni, aproxgni(N), simni, nds,
// od_async (od-async), ni_async (ni-async).
FormulaPtr make_template(std::string_view name, const TemplateParams& params);
std::vector<std::string> template_names();

}  // namespace stratmc
