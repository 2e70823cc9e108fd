#include <algorithm>
#include <map>
#include <set>

#include "stratmc/checker.hpp"

namespace stratmc {

GamePtr SystemEnv::resolve(const std::optional<std::string>& ref) const {
  if (!ref) return main;
  auto it = named.find(*ref);
  if (it == named.end()) throw std::invalid_argument("unknown system '" + *ref + "'");
  return it->second;
}

std::set<std::string> SystemEnv::names() const {
  std::set<std::string> out;
  for (const auto& [name, g] : named) out.insert(name);
  return out;
}

namespace {

class LassoEvaluator {
 public:
  LassoEvaluator(const ZippedWord& w, const std::vector<std::string>& vars, const Alphabet& alphabet)
      : w_(w), vars_(vars), alphabet_(alphabet), len_(w.length()) {}

  const std::vector<bool>& eval(const FormulaPtr& f) {
    if (auto it = memo_.find(f.get()); it != memo_.end()) return it->second;
    std::vector<bool> v(len_);
    switch (f->op) {
      case Op::True: v.assign(len_, true); break;
      case Op::False: v.assign(len_, false); break;
      case Op::Atom: {
        auto it = std::find(vars_.begin(), vars_.end(), f->var);
        if (it == vars_.end()) throw std::invalid_argument("atom over unknown variable '" + f->var + "'");
        const std::size_t c = it - vars_.begin();
        const int prop = alphabet_.components.at(c)->prop_id(f->prop);
        for (std::size_t i = 0; i < len_; ++i) v[i] = prop >= 0 && alphabet_.has(c, w_.at(i).at(c), prop);
        break;
      }
      case Op::Not: {
        const auto& a = eval(f->left);
        for (std::size_t i = 0; i < len_; ++i) v[i] = !a[i];
        break;
      }
      case Op::And:
      case Op::Or: {
        const auto a = eval(f->left);
        const auto& b = eval(f->right);
        for (std::size_t i = 0; i < len_; ++i) v[i] = f->op == Op::And ? a[i] && b[i] : a[i] || b[i];
        break;
      }
      case Op::Next: {
        const auto& a = eval(f->left);
        for (std::size_t i = 0; i < len_; ++i) v[i] = a[w_.next(i)];
        break;
      }
      case Op::Until:
      case Op::Release:
      case Op::WeakUntil: {
        const auto a = eval(f->left);
        const auto& b = eval(f->right);
        // least fixpoint for U, greatest for R and W
        v.assign(len_, f->op != Op::Until);
        for (bool changed = true; changed;) {
          changed = false;
          for (std::size_t k = len_; k-- > 0;) {
            const bool nx = v[w_.next(k)];
            bool val = f->op == Op::Release ? b[k] && (a[k] || nx) : b[k] || (a[k] && nx);
            if (val != v[k]) {
              v[k] = val;
              changed = true;
            }
          }
        }
        break;
      }
      default: throw std::invalid_argument("lasso evaluation needs a quantifier-free formula");
    }
    return memo_.emplace(f.get(), std::move(v)).first->second;
  }

 private:
  const ZippedWord& w_;
  const std::vector<std::string>& vars_;
  const Alphabet& alphabet_;
  std::size_t len_;
  std::map<const Formula*, std::vector<bool>> memo_;
};

std::vector<int> project(const GameStructure& g, int s, const std::vector<int>& props) {
  std::vector<int> out;
  for (int p : props)
    if (p >= 0 && g.has_prop(s, p)) out.push_back(p);
  return out;
}

std::vector<int> prop_ids(const GameStructure& g, const std::vector<std::string>& names) {
  std::vector<int> out;
  for (const auto& n : names) out.push_back(g.prop_id(n));
  return out;
}

}  // namespace

bool eval_ltl_lasso(const FormulaPtr& body, const ZippedWord& w, const std::vector<std::string>& vars,
                    const Alphabet& alphabet) {
  if (w.period.empty()) throw std::invalid_argument("lasso needs a non-empty period");
  if (w.arity() != vars.size() || alphabet.arity() != vars.size())
    throw std::invalid_argument("lasso arity does not match the path variables");
  return LassoEvaluator(w, vars, alphabet).eval(body)[0];
}

bool security_simulation_exists(const GameStructure& g) {
  if (!g.roles) throw std::invalid_argument("security simulation needs declared H/L/O roles");
  const auto high = prop_ids(g, g.roles->high);
  const auto low = prop_ids(g, g.roles->low);
  const auto out = prop_ids(g, g.roles->out);
  const int n = static_cast<int>(g.num_states());
  std::vector<std::vector<int>> succ(n);
  for (int s = 0; s < n; ++s) succ[s] = g.successors(s);

  std::vector<std::vector<char>> rel(n, std::vector<char>(n, 0));
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) rel[s][t] = project(g, s, out) == project(g, t, out);

  // (s,t) survives when every step of s is answered from t: among the
  // t-successors that repeat the low input, each realizable high input must
  // offer a related successor. No low match means the premise is broken.
  auto transfers = [&](int s, int t) {
    for (int s2 : succ[s]) {
      const auto want_low = project(g, s2, low);
      std::map<std::vector<int>, bool> by_high;
      for (int t2 : succ[t]) {
        if (project(g, t2, low) != want_low) continue;
        bool& ok = by_high[project(g, t2, high)];
        ok = ok || rel[s2][t2];
      }
      for (const auto& [h, ok] : by_high)
        if (!ok) return false;
    }
    return true;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t)
        if (rel[s][t] && !transfers(s, t)) {
          rel[s][t] = 0;
          changed = true;
        }
  }
  return rel[g.initial][g.initial];
}

}  // namespace stratmc
