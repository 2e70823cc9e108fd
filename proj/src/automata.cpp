#include "stratmc/automata.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace stratmc {

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Alternating: return "alternating";
    case Mode::Nondeterministic: return "nondeterministic";
    case Mode::Universal: return "universal";
    case Mode::Deterministic: return "deterministic";
  }
  return "?";
}

// ---- explicit automata -----------------------------------------------------------

void ExplicitAutomaton::bind_atoms() {
  for (auto& a : atoms_) {
    if (a.component < 0 || static_cast<std::size_t>(a.component) >= alphabet_.arity())
      throw std::invalid_argument("atom '" + a.prop + "' reads missing component " +
                                  std::to_string(a.component));
    a.prop_id = alphabet_.components[a.component]->prop_id(a.prop);
  }
}

int ExplicitAutomaton::add_state(int color, PosBool guard, std::string name) {
  if (color < 0) throw std::invalid_argument("negative colour");
  colors_.push_back(color);
  guards_.push_back(std::move(guard));
  names_.push_back(std::move(name));
  return static_cast<int>(colors_.size()) - 1;
}

int ExplicitAutomaton::max_color() const {
  int m = 0;
  for (int c : colors_) m = std::max(m, c);
  return m;
}

bool ExplicitAutomaton::atom_value(int atom, const Letter& letter) const {
  const AtomRef& a = atoms_.at(atom);
  return a.prop_id >= 0 && alphabet_.has(a.component, letter.at(a.component), a.prop_id);
}

PosBool ExplicitAutomaton::delta(int q, const Letter& letter) const {
  return guards_.at(q).resolve([&](int atom) { return atom_value(atom, letter); });
}

std::string ExplicitAutomaton::state_name(int q) const {
  const auto& n = names_.at(q);
  return n.empty() ? std::to_string(q) : n;
}

std::string serialize_automaton(const ExplicitAutomaton& a) {
  std::ostringstream out;
  out << "mode " << mode_name(a.mode()) << "\n";
  for (std::size_t i = 0; i < a.atoms().size(); ++i)
    out << "atom " << i << " " << a.atoms()[i].component << " " << a.atoms()[i].prop << "\n";
  out << "initial " << a.initial() << "\n";
  for (std::size_t q = 0; q < a.num_states(); ++q)
    out << "state " << q << " color " << a.color(static_cast<int>(q)) << " : "
        << a.guard(static_cast<int>(q)).to_string() << "\n";
  return out.str();
}

std::shared_ptr<ExplicitAutomaton> parse_automaton(const std::string& text, Alphabet alphabet) {
  std::istringstream in(text);
  std::string line;
  Mode mode = Mode::Alternating;
  std::vector<AtomRef> atoms;
  int initial = 0;
  std::vector<std::pair<int, std::string>> states;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    const std::size_t here = offset;
    offset += line.size() + 1;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "mode") {
      std::string m;
      ls >> m;
      if (m == "alternating") mode = Mode::Alternating;
      else if (m == "nondeterministic") mode = Mode::Nondeterministic;
      else if (m == "universal") mode = Mode::Universal;
      else if (m == "deterministic") mode = Mode::Deterministic;
      else throw ParseError("unknown mode '" + m + "'", here);
    } else if (key == "atom") {
      std::size_t idx;
      AtomRef a;
      if (!(ls >> idx >> a.component >> a.prop) || idx != atoms.size())
        throw ParseError("atoms must be listed as 'atom INDEX COMPONENT PROP' in order", here);
      atoms.push_back(a);
    } else if (key == "initial") {
      if (!(ls >> initial)) throw ParseError("missing initial state", here);
    } else if (key == "state") {
      std::size_t idx;
      std::string color_kw, colon;
      int color;
      if (!(ls >> idx >> color_kw >> color >> colon) || color_kw != "color" || colon != ":" ||
          idx != states.size())
        throw ParseError("states must be listed as 'state INDEX color C : GUARD' in order", here);
      std::string guard;
      std::getline(ls, guard);
      states.emplace_back(color, guard);
    } else {
      throw ParseError("unknown directive '" + key + "'", here);
    }
  }
  auto a = std::make_shared<ExplicitAutomaton>(mode, std::move(alphabet), std::move(atoms));
  for (auto& [color, guard] : states) a->add_state(color, parse_posbool(guard));
  if (initial < 0 || static_cast<std::size_t>(initial) >= a->num_states())
    throw ParseError("initial state out of range", 0);
  a->set_initial(initial);
  return a;
}

// ---- LTL to alternating automaton ---------------------------------------------------

namespace {

class LtlTranslator {
 public:
  LtlTranslator(const std::vector<std::string>& vars, const Alphabet& alphabet)
      : vars_(vars), alphabet_(alphabet) {}

  std::shared_ptr<ExplicitAutomaton> run(const FormulaPtr& body) {
    collect_atoms(body);
    aut_ = std::make_shared<ExplicitAutomaton>(Mode::Alternating, alphabet_, atoms_);
    aut_->set_initial(state_for(body));
    return aut_;
  }

 private:
  int component_of(const std::string& var) const {
    auto it = std::find(vars_.begin(), vars_.end(), var);
    if (it == vars_.end()) throw std::invalid_argument("atom over unknown path variable '" + var + "'");
    return static_cast<int>(it - vars_.begin());
  }

  void collect_atoms(const FormulaPtr& f) {
    if (!f) return;
    if (f->op == Op::Atom) {
      AtomRef a{component_of(f->var), f->prop, -1};
      if (std::find(atoms_.begin(), atoms_.end(), a) == atoms_.end()) atoms_.push_back(a);
      return;
    }
    if (f->is_quantifier()) throw std::invalid_argument("automaton body must be quantifier-free");
    collect_atoms(f->left);
    collect_atoms(f->right);
  }

  int atom_index(const FormulaPtr& f) const {
    AtomRef a{component_of(f->var), f->prop, -1};
    return static_cast<int>(std::find(atoms_.begin(), atoms_.end(), a) - atoms_.begin());
  }

  int state_for(const FormulaPtr& f) {
    std::string key = to_string(f);
    if (auto it = ids_.find(key); it != ids_.end()) return it->second;
    // Until states reject when visited forever; release and weak-until accept.
    const int color = f->op == Op::Release || f->op == Op::WeakUntil ? 0 : 1;
    int q = aut_->add_state(color, PosBool::top(), key);
    ids_.emplace(key, q);
    aut_->set_guard(q, expand(f));
    return q;
  }

  // One-step unfolding; temporal fixpoints refer back to their own state.
  PosBool expand(const FormulaPtr& f) {
    switch (f->op) {
      case Op::True: return PosBool::top();
      case Op::False: return PosBool::bottom();
      case Op::Atom: return PosBool::lit(atom_index(f), true);
      case Op::Not:
        if (f->left->op != Op::Atom) throw std::invalid_argument("body is not in negation normal form");
        return PosBool::lit(atom_index(f->left), false);
      case Op::And: return PosBool::make_and({expand(f->left), expand(f->right)});
      case Op::Or: return PosBool::make_or({expand(f->left), expand(f->right)});
      case Op::Next: return PosBool::leaf(state_for(f->left));
      case Op::Until:
      case Op::WeakUntil: {
        PosBool self = PosBool::leaf(state_for(f));
        return PosBool::make_or({expand(f->right), PosBool::make_and({expand(f->left), self})});
      }
      case Op::Release: {
        PosBool self = PosBool::leaf(state_for(f));
        return PosBool::make_and({expand(f->right), PosBool::make_or({expand(f->left), self})});
      }
      default: throw std::invalid_argument("automaton body must be quantifier-free");
    }
  }

  const std::vector<std::string>& vars_;
  const Alphabet& alphabet_;
  std::vector<AtomRef> atoms_;
  std::shared_ptr<ExplicitAutomaton> aut_;
  std::unordered_map<std::string, int> ids_;
};

class DualAutomaton : public ParityAutomaton {
 public:
  explicit DualAutomaton(AutPtr inner)
      : ParityAutomaton(flip(inner->mode()), inner->alphabet()), inner_(std::move(inner)) {}

  int initial() const override { return inner_->initial(); }
  int color(int q) const override { return inner_->color(q) + 1; }
  int max_color() const override { return inner_->max_color() + 1; }
  PosBool delta(int q, const Letter& l) const override { return inner_->delta(q, l).dual(); }
  std::size_t num_states() const override { return inner_->num_states(); }
  std::string state_name(int q) const override { return "~" + inner_->state_name(q); }

 private:
  static Mode flip(Mode m) {
    if (m == Mode::Nondeterministic) return Mode::Universal;
    if (m == Mode::Universal) return Mode::Nondeterministic;
    return m;
  }
  AutPtr inner_;
};

}  // namespace

std::shared_ptr<ExplicitAutomaton> ltl_body_to_apa(const FormulaPtr& body,
                                                   const std::vector<std::string>& vars,
                                                   const Alphabet& alphabet) {
  if (vars.size() != alphabet.arity())
    throw std::invalid_argument("one alphabet component per path variable expected");
  return LtlTranslator(vars, alphabet).run(body);
}

AutPtr dualize(AutPtr a) { return std::make_shared<DualAutomaton>(std::move(a)); }

}  // namespace stratmc
