#include "stratmc/game.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace stratmc {

std::size_t GameStructure::num_joint_moves() const {
  std::size_t n = 1;
  for (const auto& a : agents) n *= a.moves.size();
  return n;
}

std::size_t GameStructure::joint_index(const std::vector<int>& moves) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < agents.size(); ++i) idx = idx * agents[i].moves.size() + moves[i];
  return idx;
}

std::vector<int> GameStructure::decode_joint(std::size_t joint) const {
  std::vector<int> moves(agents.size());
  for (std::size_t i = agents.size(); i-- > 0;) {
    moves[i] = static_cast<int>(joint % agents[i].moves.size());
    joint /= agents[i].moves.size();
  }
  return moves;
}

std::vector<int> GameStructure::successors(int s) const {
  std::vector<int> out(table[s].begin(), table[s].end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (!out.empty() && out.front() < 0) out.erase(out.begin());
  return out;
}

int GameStructure::prop_id(std::string_view p) const {
  auto it = std::lower_bound(props.begin(), props.end(), p);
  return it != props.end() && *it == p ? static_cast<int>(it - props.begin()) : -1;
}

bool GameStructure::has_prop(int s, int prop) const {
  if (prop < 0) return false;
  const auto& l = labels[s];
  return std::binary_search(l.begin(), l.end(), prop);
}

std::vector<std::string> GameStructure::label_names(int s) const {
  std::vector<std::string> out;
  for (int p : labels[s]) out.push_back(props[p]);
  return out;
}

int GameStructure::agent_index(std::string_view name) const {
  for (std::size_t i = 0; i < agents.size(); ++i)
    if (agents[i].name == name) return static_cast<int>(i);
  return -1;
}

int GameStructure::state_index(std::string_view name) const {
  for (std::size_t i = 0; i < state_names.size(); ++i)
    if (state_names[i] == name) return static_cast<int>(i);
  return -1;
}

int GameStructure::max_stage() const {
  int m = 0;
  for (const auto& a : agents) m = std::max(m, a.stage);
  return m;
}

std::set<std::string> GameStructure::agent_names() const {
  std::set<std::string> out;
  for (const auto& a : agents) out.insert(a.name);
  return out;
}

std::vector<int> GameStructure::stages() const {
  std::set<int> s;
  for (const auto& a : agents) s.insert(a.stage);
  return {s.begin(), s.end()};
}

// ---- builder -----------------------------------------------------------------------

int GameBuilder::add_agent(std::string name, int stage, std::vector<std::string> moves) {
  for (const auto& a : agents_)
    if (a.name == name) throw std::invalid_argument("duplicate agent '" + name + "'");
  if (moves.empty()) throw std::invalid_argument("agent '" + name + "' has no moves");
  agents_.push_back({std::move(name), stage, std::move(moves)});
  return static_cast<int>(agents_.size()) - 1;
}

int GameBuilder::add_state(std::string name, std::vector<std::string> labels) {
  states_.emplace_back(std::move(name), std::move(labels));
  fns_.emplace_back();
  return static_cast<int>(states_.size()) - 1;
}

void GameBuilder::add_transition(int from, std::vector<int> pattern, int to) {
  pattern.resize(agents_.size(), -1);
  patterns_.push_back({from, std::move(pattern), to});
}

void GameBuilder::set_transitions(int from, MoveFn fn) { fns_.at(from) = std::move(fn); }

GameStructure GameBuilder::build() const {
  GameStructure g;
  std::vector<int> order(agents_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::tie(agents_[a].stage, agents_[a].name) < std::tie(agents_[b].stage, agents_[b].name);
  });
  for (int a : order) g.agents.push_back(agents_[a]);

  std::set<std::string> props;
  std::set<std::string> names;
  for (const auto& [name, labels] : states_) {
    if (!names.insert(name).second) throw std::invalid_argument("duplicate state '" + name + "'");
    props.insert(labels.begin(), labels.end());
  }
  if (roles_) {
    for (const auto* set : {&roles_->high, &roles_->low, &roles_->out}) props.insert(set->begin(), set->end());
  }
  g.props.assign(props.begin(), props.end());
  for (const auto& [name, labels] : states_) {
    g.state_names.push_back(name);
    std::vector<int> ids;
    for (const auto& p : labels) ids.push_back(g.prop_id(p));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    g.labels.push_back(std::move(ids));
  }
  g.initial = initial_;
  g.roles = roles_;

  const std::size_t joint = g.num_joint_moves();
  g.table.assign(states_.size(), std::vector<int>(joint, -1));
  std::vector<int> builder_moves(agents_.size());
  for (std::size_t s = 0; s < states_.size(); ++s) {
    if (!fns_[s]) continue;
    for (std::size_t j = 0; j < joint; ++j) {
      auto canon = g.decode_joint(j);
      for (std::size_t k = 0; k < order.size(); ++k) builder_moves[order[k]] = canon[k];
      g.table[s][j] = (*fns_[s])(builder_moves);
    }
  }
  for (const auto& p : patterns_) {
    for (std::size_t j = 0; j < joint; ++j) {
      auto canon = g.decode_joint(j);
      bool match = true;
      for (std::size_t k = 0; k < order.size() && match; ++k) {
        int want = p.moves[order[k]];
        match = want < 0 || want == canon[k];
      }
      if (match) g.table[p.from][j] = p.to;
    }
  }
  return g;
}

// ---- validation -----------------------------------------------------------------

Diagnostics validate(const GameStructure& g) {
  Diagnostics d;
  const int n = static_cast<int>(g.num_states());
  if (n == 0) {
    d.errors.push_back("structure has no states");
    return d;
  }
  if (g.initial < 0 || g.initial >= n) d.errors.push_back("initial state out of range");
  for (const auto& a : g.agents)
    if (a.moves.empty()) d.errors.push_back("agent " + a.name + " has no moves");
  for (int s = 0; s < n; ++s) {
    for (std::size_t j = 0; j < g.table[s].size(); ++j) {
      int t = g.table[s][j];
      if (t >= 0 && t < n) continue;
      std::string vec;
      auto mv = g.decode_joint(j);
      for (std::size_t k = 0; k < mv.size(); ++k)
        vec += (k ? ", " : "") + g.agents[k].name + "=" + g.agents[k].moves[mv[k]];
      d.errors.push_back("totality violation at state " + g.state_names[s] + " for (" + vec + ")");
      break;
    }
  }
  auto st = g.stages();
  for (std::size_t i = 0; i < st.size(); ++i)
    if (st[i] != static_cast<int>(i)) {
      d.warnings.push_back("stage map has gaps (stages are not 0..k)");
      break;
    }
  if (g.roles) {
    std::map<std::string, int> seen;
    for (const auto* set : {&g.roles->high, &g.roles->low, &g.roles->out})
      for (const auto& p : *set)
        if (++seen[p] > 1) d.errors.push_back("prop " + p + " has more than one role");
  }
  if (d.ok()) {
    std::vector<bool> reach(n, false);
    std::deque<int> work{g.initial};
    reach[g.initial] = true;
    while (!work.empty()) {
      int s = work.front();
      work.pop_front();
      for (int t : g.successors(s))
        if (!reach[t]) {
          reach[t] = true;
          work.push_back(t);
        }
    }
    for (int s = 0; s < n; ++s)
      if (!reach[s]) d.warnings.push_back("state " + g.state_names[s] + " is unreachable");
  }
  return d;
}

// ---- text format ----------------------------------------------------------------

namespace {

std::vector<std::string> words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::runtime_error line_error(int lineno, const std::string& msg) {
  return std::runtime_error("line " + std::to_string(lineno) + ": " + msg);
}

}  // namespace

GameStructure parse_game(std::string_view text) {
  GameBuilder b;
  std::map<std::string, int> agent_ids, state_ids;
  std::vector<std::vector<std::string>> agent_moves;
  struct PendingTrans {
    int line;
    std::string from, to;
    std::vector<std::pair<std::string, std::string>> assigns;
  };
  std::vector<PendingTrans> trans;
  std::optional<int> initial;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto w = words(line);
    if (w.empty()) continue;
    if (w[0] == "agent") {
      if (w.size() < 6 || w[2] != "stage" || w[4] != "moves")
        throw line_error(lineno, "expected 'agent NAME stage K moves m1 ...'");
      int stage = std::stoi(w[3]);
      std::vector<std::string> moves(w.begin() + 5, w.end());
      agent_ids[w[1]] = b.add_agent(w[1], stage, moves);
      agent_moves.push_back(moves);
    } else if (w[0] == "state") {
      if (w.size() < 2) throw line_error(lineno, "state needs an id");
      std::vector<std::string> labels;
      bool is_init = false;
      std::size_t i = 2;
      // `init` may stand before or after the label list
      bool in_labels = false;
      for (; i < w.size(); ++i) {
        if (w[i] == "init" && !is_init) {
          is_init = true;
        } else if (w[i] == "label" && !in_labels && labels.empty()) {
          in_labels = true;
        } else if (in_labels && w[i] != "label" && w[i] != "init") {
          labels.push_back(w[i]);
        } else {
          throw line_error(lineno, "unexpected '" + w[i] + "'");
        }
      }
      if (state_ids.count(w[1])) throw line_error(lineno, "duplicate state " + w[1]);
      int id = b.add_state(w[1], labels);
      state_ids[w[1]] = id;
      if (is_init) {
        if (initial) throw line_error(lineno, "second initial state");
        initial = id;
      }
    } else if (w[0] == "trans") {
      auto arrow = line.find("->");
      if (arrow == std::string::npos) throw line_error(lineno, "trans needs '->'");
      auto lhs = line.substr(0, arrow);
      auto rhs = words(line.substr(arrow + 2));
      if (rhs.size() != 1) throw line_error(lineno, "trans needs exactly one target");
      for (auto& c : lhs)
        if (c == ',') c = ' ';
      auto lw = words(lhs);
      if (lw.size() < 2) throw line_error(lineno, "trans needs a source state");
      PendingTrans t{lineno, lw[1], rhs[0], {}};
      for (std::size_t i = 2; i < lw.size(); ++i) {
        auto eq = lw[i].find('=');
        if (eq == std::string::npos) throw line_error(lineno, "expected agent=move");
        t.assigns.emplace_back(lw[i].substr(0, eq), lw[i].substr(eq + 1));
      }
      trans.push_back(std::move(t));
    } else if (w[0] == "roles") {
      Roles r;
      std::vector<std::string>* cur = nullptr;
      for (std::size_t i = 1; i < w.size(); ++i) {
        if (w[i] == "/") {
          cur = nullptr;
        } else if (!cur && (w[i] == "H" || w[i] == "L" || w[i] == "O")) {
          cur = w[i] == "H" ? &r.high : w[i] == "L" ? &r.low : &r.out;
        } else if (cur) {
          cur->push_back(w[i]);
        } else {
          throw line_error(lineno, "expected H, L or O in roles");
        }
      }
      b.set_roles(r);
    } else {
      throw line_error(lineno, "unknown directive '" + w[0] + "'");
    }
  }
  if (state_ids.empty()) throw std::runtime_error("no states declared");
  b.set_initial(initial.value_or(0));
  for (const auto& t : trans) {
    auto from = state_ids.find(t.from);
    auto to = state_ids.find(t.to);
    if (from == state_ids.end()) throw line_error(t.line, "unknown state " + t.from);
    if (to == state_ids.end()) throw line_error(t.line, "unknown state " + t.to);
    std::vector<int> pattern(agent_ids.size(), -1);
    for (const auto& [agent, move] : t.assigns) {
      auto a = agent_ids.find(agent);
      if (a == agent_ids.end()) throw line_error(t.line, "unknown agent " + agent);
      if (move == "*") continue;
      const auto& mv = agent_moves[a->second];
      auto m = std::find(mv.begin(), mv.end(), move);
      if (m == mv.end()) throw line_error(t.line, "agent " + agent + " has no move " + move);
      pattern[a->second] = static_cast<int>(m - mv.begin());
    }
    b.add_transition(from->second, pattern, to->second);
  }
  return b.build();
}

namespace {

// Emits one line per maximal block of joint moves (fixed prefix in canonical
// agent order) that share a target.
void emit_trans(const GameStructure& g, int s, std::size_t depth, std::size_t lo, std::size_t span,
                std::vector<int>& fixed, std::ostringstream& out) {
  const auto& row = g.table[s];
  bool uniform = std::all_of(row.begin() + lo, row.begin() + lo + span,
                             [&](int t) { return t == row[lo]; });
  if (uniform || depth == g.agents.size()) {
    out << "trans " << g.state_names[s];
    for (std::size_t k = 0; k < depth; ++k)
      out << (k ? ", " : " ") << g.agents[k].name << "=" << g.agents[k].moves[fixed[k]];
    out << " -> " << (row[lo] < 0 ? std::string("?") : g.state_names[row[lo]]) << "\n";
    return;
  }
  std::size_t m = g.agents[depth].moves.size();
  std::size_t sub = span / m;
  for (std::size_t i = 0; i < m; ++i) {
    fixed[depth] = static_cast<int>(i);
    emit_trans(g, s, depth + 1, lo + i * sub, sub, fixed, out);
  }
}

}  // namespace

std::string serialize_game(const GameStructure& g) {
  std::ostringstream out;
  for (const auto& a : g.agents) {
    out << "agent " << a.name << " stage " << a.stage << " moves";
    for (const auto& m : a.moves) out << " " << m;
    out << "\n";
  }
  for (std::size_t s = 0; s < g.num_states(); ++s) {
    out << "state " << g.state_names[s];
    if (!g.labels[s].empty()) {
      out << " label";
      for (int p : g.labels[s]) out << " " << g.props[p];
    }
    if (static_cast<int>(s) == g.initial) out << " init";
    out << "\n";
  }
  if (g.roles) {
    out << "roles H";
    for (const auto& p : g.roles->high) out << " " << p;
    out << " / L";
    for (const auto& p : g.roles->low) out << " " << p;
    out << " / O";
    for (const auto& p : g.roles->out) out << " " << p;
    out << "\n";
  }
  std::vector<int> fixed(g.agents.size());
  for (std::size_t s = 0; s < g.num_states(); ++s)
    emit_trans(g, static_cast<int>(s), 0, 0, g.num_joint_moves(), fixed, out);
  return out.str();
}

// ---- transformations ---------------------------------------------------------------

GameStructure stutterize(const GameStructure& g, const std::string& sched, const std::string& stut) {
  if (g.agent_index(sched) >= 0) throw std::invalid_argument("agent '" + sched + "' already exists");
  if (g.prop_id(stut) >= 0) throw std::invalid_argument("prop '" + stut + "' already exists");
  GameStructure out;
  out.agents = g.agents;
  out.agents.push_back({sched, g.agents.empty() ? 0 : g.max_stage() + 1, {"go", "stay"}});
  std::set<std::string> props(g.props.begin(), g.props.end());
  props.insert(stut);
  out.props.assign(props.begin(), props.end());
  const int stut_id = out.prop_id(stut);
  const std::size_t n = g.num_states();
  auto remap = [&](int p) { return out.prop_id(g.props[p]); };
  for (int tag = 0; tag < 2; ++tag) {
    for (std::size_t s = 0; s < n; ++s) {
      out.state_names.push_back(g.state_names[s] + "/" + std::to_string(tag));
      std::vector<int> l;
      for (int p : g.labels[s]) l.push_back(remap(p));
      if (tag) l.push_back(stut_id);
      std::sort(l.begin(), l.end());
      out.labels.push_back(std::move(l));
    }
  }
  out.initial = g.initial;
  out.roles = g.roles;
  // sched is last in canonical order, so joint index = old_joint * 2 + sched_move
  const std::size_t joint = g.num_joint_moves();
  out.table.assign(2 * n, std::vector<int>(2 * joint, -1));
  for (std::size_t tag = 0; tag < 2; ++tag)
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t j = 0; j < joint; ++j) {
        int t = g.table[s][j];
        out.table[tag * n + s][2 * j] = t < 0 ? -1 : t;
        out.table[tag * n + s][2 * j + 1] = static_cast<int>(n + s);
      }
  return out;
}

GameStructure shift(const GameStructure& g, int n) {
  if (n < 0) throw std::invalid_argument("shift amount must be non-negative");
  if (n == 0) return g;
  GameStructure out = g;
  const int base = static_cast<int>(g.num_states());
  const std::size_t joint = g.num_joint_moves();
  for (int i = 0; i < n; ++i) {
    std::string name = "shift" + std::to_string(i);
    while (out.state_index(name) >= 0) name += "'";
    out.state_names.push_back(name);
    out.labels.emplace_back();
    int target = i + 1 < n ? base + i + 1 : g.initial;
    out.table.emplace_back(joint, target);
  }
  out.initial = base;
  return out;
}

GameStructure reachable(const GameStructure& g) {
  const int n = static_cast<int>(g.num_states());
  std::vector<int> index(n, -1);
  std::vector<int> order{g.initial};
  index[g.initial] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int t : g.successors(order[i]))
      if (index[t] < 0) {
        index[t] = static_cast<int>(order.size());
        order.push_back(t);
      }
  std::sort(order.begin(), order.end());
  for (std::size_t i = 0; i < order.size(); ++i) index[order[i]] = static_cast<int>(i);
  GameStructure out;
  out.agents = g.agents;
  out.props = g.props;
  out.roles = g.roles;
  out.initial = index[g.initial];
  for (int s : order) {
    out.state_names.push_back(g.state_names[s]);
    out.labels.push_back(g.labels[s]);
    std::vector<int> row = g.table[s];
    for (int& t : row) t = t < 0 ? -1 : index[t];
    out.table.push_back(std::move(row));
  }
  return out;
}

}  // namespace stratmc
