#include <algorithm>
#include <chrono>
#include <functional>
#include <set>
#include <sstream>

#include "interner.hpp"
#include "stratmc/checker.hpp"

namespace stratmc {

namespace {

using detail::Interner;
using detail::Lock;

// Starting state of a fresh copy: the current state of the last path when that
// path lives in the same structure, else the structure's initial state.
int start_state(const Alphabet& outer, const Letter& letter, const GamePtr& g) {
  const std::size_t n = outer.arity();
  if (n >= 1 && outer.components[n - 1] == g) return letter[n - 1];
  return g->initial;
}

Alphabet extend(const Alphabet& a, const std::vector<GamePtr>& gs) {
  Alphabet out = a;
  out.components.insert(out.components.end(), gs.begin(), gs.end());
  return out;
}

// ---- existential projection onto one more path --------------------------------------

class ExistsProduct : public ParityAutomaton {
 public:
  ExistsProduct(AutPtr inner, GamePtr g, Alphabet outer, std::size_t budget)
      : ParityAutomaton(Mode::Nondeterministic, std::move(outer)),
        inner_(std::move(inner)),
        g_(std::move(g)),
        budget_(budget) {
    if (inner_->mode() != Mode::Nondeterministic && inner_->mode() != Mode::Deterministic)
      throw std::logic_error("existential product needs a nondeterministic automaton");
  }

  int initial() const override { return 0; }
  int color(int q) const override {
    Lock lock(mu_);
    return inner_->color(q == 0 ? inner_->initial() : ids_.key(q - 1).first);
  }
  int max_color() const override { return inner_->max_color(); }
  std::size_t num_states() const override {
    Lock lock(mu_);
    return ids_.size() + 1;
  }
  std::string state_name(int q) const override {
    Lock lock(mu_);
    if (q == 0) return "init";
    auto [a, s] = ids_.key(q - 1);
    return "(" + inner_->state_name(a) + "," + g_->state_names[s] + ")";
  }

  PosBool delta(int q, const Letter& letter) const override {
    Lock lock(mu_);
    int a, s;
    if (q == 0) {
      a = inner_->initial();
      s = start_state(alphabet_, letter, g_);
    } else {
      std::tie(a, s) = ids_.key(q - 1);
    }
    Letter full = letter;
    full.push_back(s);
    const auto next = g_->successors(s);
    return inner_->delta(a, full).map_leaves([&](int t) {
      std::vector<PosBool> opts;
      for (int s2 : next) opts.push_back(PosBool::leaf(1 + ids_.intern({t, s2}, budget_)));
      return PosBool::make_or(std::move(opts));
    });
  }

 private:
  AutPtr inner_;
  GamePtr g_;
  std::size_t budget_;
  mutable std::recursive_mutex mu_;
  mutable Interner<std::pair<int, int>> ids_;
};

// ---- strategic product over k parallel copies -------------------------------------

struct Copy {
  GamePtr g;
  std::vector<bool> controlled;  // per agent in canonical order
};

std::vector<bool> controlled_agents(const GameStructure& g, const AgentSet& a) {
  std::vector<bool> out(g.agents.size());
  for (std::size_t i = 0; i < g.agents.size(); ++i) out[i] = a.contains(g.agents[i].name);
  return out;
}

class StrategyProduct : public ParityAutomaton {
 public:
  StrategyProduct(AutPtr det, std::vector<Copy> copies, Alphabet outer, std::size_t budget)
      : ParityAutomaton(Mode::Alternating, std::move(outer)),
        det_(std::move(det)),
        copies_(std::move(copies)),
        budget_(budget) {
    std::set<int> st;
    for (const auto& c : copies_)
      for (int s : c.g->stages()) st.insert(s);
    stages_.assign(st.begin(), st.end());
  }

  int initial() const override { return 0; }
  int color(int q) const override {
    Lock lock(mu_);
    return det_->color(q == 0 ? det_->initial() : ids_.key(q - 1).first);
  }
  int max_color() const override { return det_->max_color(); }
  std::size_t num_states() const override {
    Lock lock(mu_);
    return ids_.size() + 1;
  }
  std::string state_name(int q) const override {
    Lock lock(mu_);
    if (q == 0) return "init";
    const auto& [a, ss] = ids_.key(q - 1);
    std::string out = "(" + det_->state_name(a);
    for (std::size_t i = 0; i < ss.size(); ++i) out += "," + copies_[i].g->state_names[ss[i]];
    return out + ")";
  }

  PosBool delta(int q, const Letter& letter) const override {
    Lock lock(mu_);
    int a;
    std::vector<int> ss;
    if (q == 0) {
      a = det_->initial();
      for (const auto& c : copies_) ss.push_back(start_state(alphabet_, letter, c.g));
    } else {
      std::tie(a, ss) = ids_.key(q - 1);
    }
    Letter full = letter;
    full.insert(full.end(), ss.begin(), ss.end());
    PosBool d = det_->delta(a, full);
    if (d.is_true() || d.is_false()) return d;
    if (d.kind() != PosBool::Kind::Leaf) throw std::logic_error("strategy product needs a deterministic automaton");
    std::vector<std::vector<int>> moves(copies_.size());
    for (std::size_t i = 0; i < copies_.size(); ++i) moves[i].assign(copies_[i].g->agents.size(), 0);
    return choose(d.state(), ss, moves, 0, true);
  }

 private:
  // Agents of stage `stages_[idx]` that belong to the given side.
  std::vector<std::pair<std::size_t, std::size_t>> deciders(std::size_t idx, bool exists) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < copies_.size(); ++i) {
      const auto& ag = copies_[i].g->agents;
      for (std::size_t j = 0; j < ag.size(); ++j)
        if (ag[j].stage == stages_[idx] && copies_[i].controlled[j] == exists) out.emplace_back(i, j);
    }
    return out;
  }

  // Disjunction over the coalition's moves of a stage, then conjunction over the
  // opponents' moves, stage by stage.
  PosBool choose(int next_state, const std::vector<int>& ss, std::vector<std::vector<int>>& moves,
                 std::size_t idx, bool exists) const {
    if (idx == stages_.size()) {
      std::vector<int> succ(ss.size());
      for (std::size_t i = 0; i < ss.size(); ++i) succ[i] = copies_[i].g->successor(ss[i], moves[i]);
      return PosBool::leaf(1 + ids_.intern({next_state, succ}, budget_));
    }
    const auto who = deciders(idx, exists);
    std::vector<PosBool> parts;
    std::vector<int> pick(who.size(), 0);
    while (true) {
      for (std::size_t k = 0; k < who.size(); ++k) moves[who[k].first][who[k].second] = pick[k];
      parts.push_back(exists ? choose(next_state, ss, moves, idx, false)
                             : choose(next_state, ss, moves, idx + 1, true));
      std::size_t k = 0;
      while (k < who.size()) {
        const auto& ag = copies_[who[k].first].g->agents[who[k].second];
        if (++pick[k] < static_cast<int>(ag.moves.size())) break;
        pick[k++] = 0;
      }
      if (k == who.size()) break;
    }
    return exists ? PosBool::make_or(std::move(parts)) : PosBool::make_and(std::move(parts));
  }

  AutPtr det_;
  std::vector<Copy> copies_;
  std::vector<int> stages_;
  std::size_t budget_;
  mutable std::recursive_mutex mu_;
  mutable Interner<std::pair<int, std::vector<int>>> ids_;
};

// ---- boolean and temporal skeleton over quantified subformulas ---------------------

// Quantified subformulas become children; the skeleton's transition formulas
// refer to them through literals numbered after the atoms. Child state t of
// child j is state base + t * m + j.
class Skeleton : public ParityAutomaton {
 public:
  Skeleton(Alphabet alphabet, std::vector<AtomRef> atoms, std::vector<AutPtr> children)
      : ParityAutomaton(Mode::Alternating, std::move(alphabet)),
        atoms_(std::move(atoms)),
        children_(std::move(children)) {
    for (auto& a : atoms_) a.prop_id = alphabet_.components[a.component]->prop_id(a.prop);
  }

  int add_state(int color, std::string name) {
    colors_.push_back(color);
    guards_.push_back(PosBool::top());
    names_.push_back(std::move(name));
    return static_cast<int>(colors_.size()) - 1;
  }
  void set_guard(int q, PosBool g) { guards_[q] = std::move(g); }
  void set_initial(int q) { initial_ = q; }

  int initial() const override { return initial_; }
  int color(int q) const override {
    if (q < base()) return colors_[q];
    auto [j, t] = split(q);
    return children_[j]->color(t);
  }
  int max_color() const override {
    int m = 1;
    for (const auto& c : children_) m = std::max(m, c->max_color());
    return m;
  }
  std::size_t num_states() const override {
    std::size_t biggest = 0;
    for (const auto& c : children_) biggest = std::max(biggest, c->num_states());
    return base() + biggest * children_.size();
  }
  std::string state_name(int q) const override {
    if (q < base()) return names_[q];
    auto [j, t] = split(q);
    return "#" + std::to_string(j) + ":" + children_[j]->state_name(t);
  }

  PosBool delta(int q, const Letter& letter) const override {
    if (q >= base()) {
      auto [j, t] = split(q);
      return lift(j, children_[j]->delta(t, letter));
    }
    return substitute(guards_[q], letter);
  }

 private:
  int base() const { return static_cast<int>(colors_.size()); }
  std::pair<int, int> split(int q) const {
    const int m = static_cast<int>(children_.size());
    return {(q - base()) % m, (q - base()) / m};
  }
  PosBool lift(int j, const PosBool& f) const {
    const int m = static_cast<int>(children_.size());
    return f.map_leaves([&](int t) { return PosBool::leaf(base() + t * m + j); });
  }
  PosBool substitute(const PosBool& f, const Letter& letter) const {
    switch (f.kind()) {
      case PosBool::Kind::Lit: {
        const int idx = f.state();
        if (idx < static_cast<int>(atoms_.size())) {
          const auto& a = atoms_[idx];
          bool v = a.prop_id >= 0 && alphabet_.has(a.component, letter[a.component], a.prop_id);
          return v == f.positive() ? PosBool::top() : PosBool::bottom();
        }
        const int j = idx - static_cast<int>(atoms_.size());
        return lift(j, children_[j]->delta(children_[j]->initial(), letter));
      }
      case PosBool::Kind::And:
      case PosBool::Kind::Or: {
        std::vector<PosBool> ks;
        for (const auto& k : f.kids()) ks.push_back(substitute(k, letter));
        return f.kind() == PosBool::Kind::And ? PosBool::make_and(std::move(ks))
                                              : PosBool::make_or(std::move(ks));
      }
      default: return f;
    }
  }

  std::vector<AtomRef> atoms_;
  std::vector<AutPtr> children_;
  std::vector<int> colors_;
  std::vector<PosBool> guards_;
  std::vector<std::string> names_;
  int initial_ = 0;
};

class Builder {
 public:
  Builder(const SystemEnv& env, const CheckOptions& opts, std::vector<AutPtr>* trace)
      : env_(env), opts_(opts), trace_(trace) {}

  AutPtr build(const FormulaPtr& f, const std::vector<std::string>& vars, const Alphabet& alphabet) {
    AutPtr out;
    if (quantifier_free(f)) {
      out = ltl_body_to_apa(f, vars, alphabet);
    } else if (f->is_quantifier()) {
      out = quantified(f, vars, alphabet);
    } else {
      out = skeleton(f, vars, alphabet);
    }
    if (trace_) trace_->push_back(out);
    return out;
  }

 private:
  AutPtr quantified(const FormulaPtr& f, const std::vector<std::string>& vars, const Alphabet& alphabet) {
    std::vector<std::string> inner_vars = vars;
    std::vector<Copy> copies;
    std::vector<QuantKind> kinds;
    std::vector<QuantEntry> entries = f->quants;
    for (const auto& e : entries) {
      GamePtr g = env_.resolve(e.system);
      inner_vars.push_back(e.var);
      kinds.push_back(quant_kind(e, g->agent_names()));
      copies.push_back({g, {}});
    }
    std::vector<GamePtr> gs;
    for (const auto& c : copies) gs.push_back(c.g);
    const Alphabet inner_alpha = extend(alphabet, gs);
    AutPtr body = build(f->left, inner_vars, inner_alpha);
    const std::size_t budget = opts_.automaton_states;

    if (entries.size() == 1 && kinds[0] == QuantKind::Exists)
      return std::make_shared<ExistsProduct>(to_nondeterministic(body, budget), gs[0], alphabet, budget);
    if (entries.size() == 1 && kinds[0] == QuantKind::Forall)
      return dualize(std::make_shared<ExistsProduct>(to_nondeterministic(dualize(body), budget), gs[0],
                                                     alphabet, budget));

    const bool any_dual = std::count(kinds.begin(), kinds.end(), QuantKind::DualStrategic) > 0;
    const bool any_strat = std::count(kinds.begin(), kinds.end(), QuantKind::Strategic) > 0;
    if (any_dual && any_strat)
      throw std::invalid_argument("parallel block mixes <A> and [[A]] quantifiers");
    // With a dual entry the block is evaluated as the negation of its dual block.
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& g = *copies[i].g;
      AgentSet who;
      switch (kinds[i]) {
        case QuantKind::Exists: who = any_dual ? AgentSet::nobody() : AgentSet::everyone(); break;
        case QuantKind::Forall: who = any_dual ? AgentSet::everyone() : AgentSet::nobody(); break;
        default: who = entries[i].agents; break;
      }
      copies[i].controlled = controlled_agents(g, who);
    }
    if (!any_dual)
      return std::make_shared<StrategyProduct>(determinize(body, budget), copies, alphabet, budget);
    return dualize(std::make_shared<StrategyProduct>(determinize(dualize(body), budget), copies,
                                                     alphabet, budget));
  }

  AutPtr skeleton(const FormulaPtr& f, const std::vector<std::string>& vars, const Alphabet& alphabet) {
    std::vector<AtomRef> atoms;
    std::vector<FormulaPtr> quantified_parts;
    collect(f, vars, atoms, quantified_parts);
    std::vector<AutPtr> children;
    for (const auto& q : quantified_parts) children.push_back(build(q, vars, alphabet));
    auto sk = std::make_shared<Skeleton>(alphabet, atoms, std::move(children));
    std::map<std::string, int> ids;
    std::function<int(const FormulaPtr&)> state_for;
    std::function<PosBool(const FormulaPtr&)> expand = [&](const FormulaPtr& g) -> PosBool {
      if (g->is_quantifier()) {
        auto it = std::find(quantified_parts.begin(), quantified_parts.end(), g);
        return PosBool::lit(static_cast<int>(atoms.size() + (it - quantified_parts.begin())), true);
      }
      switch (g->op) {
        case Op::True: return PosBool::top();
        case Op::False: return PosBool::bottom();
        case Op::Atom: return PosBool::lit(atom_index(atoms, g, vars), true);
        case Op::Not: return PosBool::lit(atom_index(atoms, g->left, vars), false);
        case Op::And: return PosBool::make_and({expand(g->left), expand(g->right)});
        case Op::Or: return PosBool::make_or({expand(g->left), expand(g->right)});
        case Op::Next: return PosBool::leaf(state_for(g->left));
        case Op::Until:
        case Op::WeakUntil:
          return PosBool::make_or(
              {expand(g->right), PosBool::make_and({expand(g->left), PosBool::leaf(state_for(g))})});
        case Op::Release:
          return PosBool::make_and(
              {expand(g->right), PosBool::make_or({expand(g->left), PosBool::leaf(state_for(g))})});
        default: throw std::logic_error("unexpected operator in skeleton");
      }
    };
    state_for = [&](const FormulaPtr& g) {
      std::string key = to_string(g);
      if (auto it = ids.find(key); it != ids.end()) return it->second;
      int q = sk->add_state(g->op == Op::Release || g->op == Op::WeakUntil ? 0 : 1, key);
      ids.emplace(key, q);
      sk->set_guard(q, expand(g));
      return q;
    };
    sk->set_initial(state_for(f));
    return sk;
  }

  static int atom_index(std::vector<AtomRef>& atoms, const FormulaPtr& a, const std::vector<std::string>& vars) {
    auto v = std::find(vars.begin(), vars.end(), a->var);
    if (v == vars.end()) throw std::invalid_argument("unbound path variable '" + a->var + "'");
    AtomRef ref{static_cast<int>(v - vars.begin()), a->prop, -1};
    auto it = std::find(atoms.begin(), atoms.end(), ref);
    return static_cast<int>(it - atoms.begin());
  }

  static void collect(const FormulaPtr& f, const std::vector<std::string>& vars,
                      std::vector<AtomRef>& atoms, std::vector<FormulaPtr>& parts) {
    if (f->is_quantifier()) {
      if (std::find(parts.begin(), parts.end(), f) == parts.end()) parts.push_back(f);
      return;
    }
    if (f->op == Op::Atom) {
      auto v = std::find(vars.begin(), vars.end(), f->var);
      if (v == vars.end()) throw std::invalid_argument("unbound path variable '" + f->var + "'");
      AtomRef ref{static_cast<int>(v - vars.begin()), f->prop, -1};
      if (std::find(atoms.begin(), atoms.end(), ref) == atoms.end()) atoms.push_back(ref);
      return;
    }
    if (f->left) collect(f->left, vars, atoms, parts);
    if (f->right) collect(f->right, vars, atoms, parts);
  }

  const SystemEnv& env_;
  const CheckOptions& opts_;
  std::vector<AutPtr>* trace_;
};

std::string lasso_text(const ZippedWord& w) {
  std::ostringstream out;
  auto dump = [&](const std::vector<Letter>& part) {
    for (const auto& l : part) {
      out << " [";
      for (std::size_t i = 0; i < l.size(); ++i) out << (i ? "," : "") << l[i];
      out << "]";
    }
  };
  out << "prefix";
  dump(w.prefix);
  out << "\nperiod";
  dump(w.period);
  out << "\n";
  return out.str();
}

}  // namespace

const char* engine_name(Engine e) {
  switch (e) {
    case Engine::Auto: return "auto";
    case Engine::Fragment: return "fragment";
    case Engine::Full: return "full";
  }
  return "?";
}

AutPtr build_equiv_automaton(const FormulaPtr& f, const std::vector<std::string>& vars,
                             const Alphabet& alphabet, const SystemEnv& env, const CheckOptions& opts) {
  if (!is_nnf(f)) throw std::invalid_argument("automaton construction needs a formula in NNF");
  return Builder(env, opts, nullptr).build(f, vars, alphabet);
}

Verdict mc_full(const SystemEnv& env, const FormulaPtr& f, const CheckOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  if (!free_vars(f).empty()) throw std::invalid_argument("model checking needs a closed formula");
  std::vector<AutPtr> trace;
  AutPtr top = Builder(env, opts, &trace).build(to_nnf(f), {}, Alphabet{});
  EmptinessResult res = is_empty(top, opts.automaton_states);
  Verdict v;
  v.holds = !res.empty;
  v.engine = Engine::Full;
  for (const auto& a : trace) v.stats.automaton_states.push_back(a->num_states());
  v.stats.colors = top->max_color() + 1;
  if (opts.witness && res.witness) v.witness = lasso_text(*res.witness);
  v.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return v;
}

}  // namespace stratmc
