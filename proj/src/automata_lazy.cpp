// Lazily explored automaton constructions. States are interned on first use
// behind const accessors; every accessor holds the object's lock.

#include <algorithm>
#include <climits>
#include <deque>
#include <map>
#include <mutex>
#include <set>

#include "stratmc/automata.hpp"
#include "stratmc/paritygame.hpp"
#include "interner.hpp"

namespace stratmc {

namespace {

using detail::Interner;
using detail::Lock;
using DeltaCache = std::map<std::pair<int, Letter>, PosBool>;

std::string set_name(const std::vector<int>& s, const ParityAutomaton& inner) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += inner.state_name(s[i]);
  }
  return out + "}";
}

// ---- parity to Buchi by guessing the least colour seen forever -------------------

class PriorityGuess : public ParityAutomaton {
 public:
  PriorityGuess(AutPtr inner, std::vector<int> evens, std::size_t budget)
      : ParityAutomaton(mode_after(inner->mode()), inner->alphabet()),
        inner_(std::move(inner)),
        evens_(std::move(evens)),
        budget_(budget) {
    initial_ = ids_.intern({inner_->initial(), -1}, budget_);
  }

  int initial() const override { return initial_; }
  int color(int q) const override {
    Lock lock(mu_);
    auto [s, g] = ids_.key(q);
    return g >= 0 && inner_->color(s) == g ? 0 : 1;
  }
  int max_color() const override { return 1; }
  std::size_t num_states() const override {
    Lock lock(mu_);
    return ids_.size();
  }
  std::string state_name(int q) const override {
    Lock lock(mu_);
    auto [s, g] = ids_.key(q);
    return inner_->state_name(s) + "/" + (g < 0 ? std::string("?") : std::to_string(g));
  }

  PosBool delta(int q, const Letter& letter) const override {
    Lock lock(mu_);
    auto [s, g] = ids_.key(q);
    if (g >= 0 && inner_->color(s) < g) return PosBool::bottom();
    return inner_->delta(s, letter).map_leaves([&](int t) {
      if (g >= 0) return PosBool::leaf(ids_.intern({t, g}, budget_));
      std::vector<PosBool> options{PosBool::leaf(ids_.intern({t, -1}, budget_))};
      for (int e : evens_) options.push_back(PosBool::leaf(ids_.intern({t, e}, budget_)));
      return PosBool::make_or(std::move(options));
    });
  }

 private:
  static Mode mode_after(Mode m) {
    if (m == Mode::Deterministic || m == Mode::Nondeterministic) return Mode::Nondeterministic;
    return Mode::Alternating;
  }
  AutPtr inner_;
  std::vector<int> evens_;
  std::size_t budget_;
  int initial_;
  mutable std::recursive_mutex mu_;
  mutable Interner<std::pair<int, int>> ids_;
};

// ---- alternating Buchi to nondeterministic Buchi (breakpoint) ------------------

class Breakpoint : public ParityAutomaton {
 public:
  Breakpoint(AutPtr inner, std::size_t budget)
      : ParityAutomaton(Mode::Nondeterministic, inner->alphabet()),
        inner_(std::move(inner)),
        budget_(budget) {
    const int q0 = inner_->initial();
    std::vector<int> v;
    if (inner_->color(q0) != 0) v.push_back(q0);
    initial_ = ids_.intern({{q0}, v}, budget_);
  }

  int initial() const override { return initial_; }
  int color(int q) const override {
    Lock lock(mu_);
    return ids_.key(q).second.empty() ? 0 : 1;
  }
  int max_color() const override { return 1; }
  std::size_t num_states() const override {
    Lock lock(mu_);
    return ids_.size();
  }
  std::string state_name(int q) const override {
    Lock lock(mu_);
    const auto& [u, v] = ids_.key(q);
    return "(" + set_name(u, *inner_) + "," + set_name(v, *inner_) + ")";
  }

  PosBool delta(int q, const Letter& letter) const override {
    Lock lock(mu_);
    auto key = std::make_pair(q, letter);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    PosBool r = compute(q, letter);
    cache_.emplace(std::move(key), r);
    return r;
  }

 private:
  PosBool compute(int q, const Letter& letter) const {
    const auto [u, v] = ids_.key(q);
    std::vector<std::vector<std::vector<int>>> models;
    for (int s : u) {
      models.push_back(inner_->delta(s, letter).minimal_models());
      if (models.back().empty()) return PosBool::bottom();
    }
    const bool reset = v.empty();
    std::vector<PosBool> options;
    std::vector<std::size_t> pick(u.size(), 0);
    while (true) {
      std::set<int> nu, nv;
      for (std::size_t i = 0; i < u.size(); ++i) {
        const auto& m = models[i][pick[i]];
        nu.insert(m.begin(), m.end());
        if (!reset && std::binary_search(v.begin(), v.end(), u[i])) nv.insert(m.begin(), m.end());
      }
      if (reset) nv = nu;
      std::vector<int> vu(nu.begin(), nu.end()), vv;
      for (int t : nv)
        if (inner_->color(t) != 0) vv.push_back(t);
      options.push_back(PosBool::leaf(ids_.intern({vu, vv}, budget_)));
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == models[i].size()) pick[i++] = 0;
      if (i == pick.size()) break;
    }
    return PosBool::make_or(std::move(options));
  }

  AutPtr inner_;
  std::size_t budget_;
  int initial_;
  mutable std::recursive_mutex mu_;
  mutable Interner<std::pair<std::vector<int>, std::vector<int>>> ids_;
  mutable DeltaCache cache_;
};

// ---- Buchi to deterministic parity (compact Safra trees) ----------------------

constexpr int kAccepting = INT_MAX;  // virtual state reached on a true transition
constexpr int kNoEvent = (1 << 21) + 1;

struct SafraNode {
  int name;
  std::vector<int> label;  // sorted
  std::vector<int> kids;   // indices into the node array, oldest first
};

struct SafraTree {
  std::vector<SafraNode> nodes;  // nodes[0] is the root when non-empty

  // Preorder encoding: name, |label|, label..., #kids, kids...
  void encode(int v, std::vector<int>& out) const {
    const auto& n = nodes[v];
    out.push_back(n.name);
    out.push_back(static_cast<int>(n.label.size()));
    out.insert(out.end(), n.label.begin(), n.label.end());
    out.push_back(static_cast<int>(n.kids.size()));
    for (int k : n.kids) encode(k, out);
  }

  static SafraTree decode(const std::vector<int>& code) {
    SafraTree t;
    if (code.empty()) return t;
    std::size_t pos = 0;
    t.read(code, pos);
    return t;
  }

 private:
  int read(const std::vector<int>& code, std::size_t& pos) {
    int idx = static_cast<int>(nodes.size());
    nodes.push_back({code[pos], {}, {}});
    ++pos;
    int len = code[pos++];
    nodes[idx].label.assign(code.begin() + pos, code.begin() + pos + len);
    pos += len;
    int nk = code[pos++];
    for (int i = 0; i < nk; ++i) {
      int k = read(code, pos);
      nodes[idx].kids.push_back(k);
    }
    return idx;
  }
};

class Safra : public ParityAutomaton {
 public:
  Safra(AutPtr nba, std::size_t budget)
      : ParityAutomaton(Mode::Deterministic, nba->alphabet()), nba_(std::move(nba)), budget_(budget) {
    SafraTree t;
    t.nodes.push_back({0, {nba_->initial()}, {}});
    std::vector<int> code;
    t.encode(0, code);
    initial_ = ids_.intern({code, kNoEvent}, budget_);
  }

  int initial() const override { return initial_; }
  int color(int q) const override {
    Lock lock(mu_);
    return ids_.key(q).second;
  }
  int max_color() const override { return kNoEvent; }
  std::size_t num_states() const override {
    Lock lock(mu_);
    return ids_.size();
  }
  std::string state_name(int q) const override {
    Lock lock(mu_);
    const auto& [code, prio] = ids_.key(q);
    SafraTree t = SafraTree::decode(code);
    std::string out;
    print(t, 0, out);
    return out + "@" + std::to_string(prio);
  }

  PosBool delta(int q, const Letter& letter) const override {
    Lock lock(mu_);
    auto key = std::make_pair(q, letter);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    PosBool r = step(q, letter);
    cache_.emplace(std::move(key), r);
    return r;
  }

 private:
  void print(const SafraTree& t, int v, std::string& out) const {
    const auto& n = t.nodes[v];
    out += std::to_string(n.name) + ":{";
    for (std::size_t i = 0; i < n.label.size(); ++i) {
      if (i) out += ",";
      out += n.label[i] == kAccepting ? "T" : nba_->state_name(n.label[i]);
    }
    out += "}";
    if (!n.kids.empty()) {
      out += "[";
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        if (i) out += " ";
        print(t, n.kids[i], out);
      }
      out += "]";
    }
  }

  bool accepting(int s) const { return s == kAccepting || nba_->color(s) == 0; }

  std::vector<int> successors(const std::vector<int>& set, const Letter& letter) const {
    std::set<int> out;
    for (int s : set) {
      if (s == kAccepting) {
        out.insert(kAccepting);
        continue;
      }
      PosBool d = nba_->delta(s, letter);
      if (d.is_true()) {
        out.insert(kAccepting);
        continue;
      }
      if (d.kind() == PosBool::Kind::And)
        throw std::logic_error("determinization needs a nondeterministic automaton");
      std::vector<int> targets;
      d.collect_states(targets);
      out.insert(targets.begin(), targets.end());
    }
    return {out.begin(), out.end()};
  }

  PosBool step(int q, const Letter& letter) const {
    SafraTree t = SafraTree::decode(ids_.key(q).first);
    if (t.nodes.empty()) return PosBool::bottom();
    int fresh = 0;
    for (const auto& n : t.nodes) fresh = std::max(fresh, n.name + 1);
    const int first_new = fresh;

    // successor labels, then spawn children for accepting states
    const std::size_t old_count = t.nodes.size();
    for (std::size_t v = 0; v < old_count; ++v) t.nodes[v].label = successors(t.nodes[v].label, letter);
    for (std::size_t v = 0; v < old_count; ++v) {
      std::vector<int> acc;
      for (int s : t.nodes[v].label)
        if (accepting(s)) acc.push_back(s);
      if (acc.empty()) continue;
      t.nodes.push_back({fresh++, std::move(acc), {}});
      t.nodes[v].kids.push_back(static_cast<int>(t.nodes.size()) - 1);
    }

    // horizontal merge: a state stays only in the oldest branch holding it
    horizontal(t, 0);

    // drop empty nodes
    int min_removed = INT_MAX;
    std::vector<bool> dead(t.nodes.size(), false);
    mark_empty(t, 0, false, dead, min_removed, first_new);

    // vertical merge
    int min_green = INT_MAX;
    if (!dead[0]) vertical(t, 0, dead, min_green);

    // Removing node i must outrank node i turning green: a branch that keeps
    // dying is not a witness however often it flashes green.
    int prio = kNoEvent;
    if (min_green < min_removed) prio = 2 * min_green + 2;
    else if (min_removed != INT_MAX) prio = 2 * min_removed + 1;

    if (dead[0]) return PosBool::bottom();
    SafraTree out = compact(t, dead);
    std::vector<int> code;
    out.encode(0, code);
    return PosBool::leaf(ids_.intern({code, prio}, budget_));
  }

  static void horizontal(SafraTree& t, int v) {
    std::set<int> claimed;
    for (int k : t.nodes[v].kids) {
      auto& lab = t.nodes[k].label;
      std::vector<int> kept;
      for (int s : lab)
        if (!claimed.count(s) && std::binary_search(t.nodes[v].label.begin(), t.nodes[v].label.end(), s))
          kept.push_back(s);
      lab = std::move(kept);
      horizontal(t, k);
      claimed.insert(lab.begin(), lab.end());
    }
  }

  static void mark_empty(const SafraTree& t, int v, bool parent_dead, std::vector<bool>& dead,
                         int& min_removed, int first_new) {
    const auto& n = t.nodes[v];
    dead[v] = parent_dead || n.label.empty();
    if (dead[v] && n.name < first_new) min_removed = std::min(min_removed, n.name);
    for (int k : n.kids) mark_empty(t, k, dead[v], dead, min_removed, first_new);
  }

  static void vertical(SafraTree& t, int v, std::vector<bool>& dead, int& min_green) {
    auto& n = t.nodes[v];
    std::set<int> covered;
    bool any_kid = false;
    for (int k : n.kids)
      if (!dead[k]) {
        any_kid = true;
        covered.insert(t.nodes[k].label.begin(), t.nodes[k].label.end());
      }
    if (any_kid && covered.size() == n.label.size()) {
      min_green = std::min(min_green, n.name);
      kill_below(t, v, dead);
      return;
    }
    for (int k : n.kids)
      if (!dead[k]) vertical(t, k, dead, min_green);
  }

  static void kill_below(const SafraTree& t, int v, std::vector<bool>& dead) {
    for (int k : t.nodes[v].kids) {
      dead[k] = true;
      kill_below(t, k, dead);
    }
  }

  static SafraTree compact(const SafraTree& t, const std::vector<bool>& dead) {
    std::vector<int> names;
    for (std::size_t v = 0; v < t.nodes.size(); ++v)
      if (!dead[v]) names.push_back(t.nodes[v].name);
    std::sort(names.begin(), names.end());
    SafraTree out;
    copy(t, 0, dead, names, out);
    return out;
  }

  static int copy(const SafraTree& t, int v, const std::vector<bool>& dead,
                  const std::vector<int>& names, SafraTree& out) {
    int idx = static_cast<int>(out.nodes.size());
    const auto& n = t.nodes[v];
    int rank = static_cast<int>(std::lower_bound(names.begin(), names.end(), n.name) - names.begin());
    out.nodes.push_back({rank, n.label, {}});
    for (int k : n.kids)
      if (!dead[k]) {
        int c = copy(t, k, dead, names, out);
        out.nodes[idx].kids.push_back(c);
      }
    return idx;
  }

  AutPtr nba_;
  std::size_t budget_;
  int initial_;
  mutable std::recursive_mutex mu_;
  mutable Interner<std::pair<std::vector<int>, int>> ids_;
  mutable DeltaCache cache_;
};

std::vector<int> even_colors(const ParityAutomaton& a, std::size_t budget) {
  std::vector<int> evens;
  if (a.max_color() <= 32) {
    for (int c = 0; c <= a.max_color(); c += 2) evens.push_back(c);
    return evens;
  }
  explore(a, all_letters(a.alphabet()), budget);
  std::set<int> seen;
  for (std::size_t q = 0; q < a.num_states(); ++q) {
    int c = a.color(static_cast<int>(q));
    if (c % 2 == 0) seen.insert(c);
  }
  return {seen.begin(), seen.end()};
}

}  // namespace

AutPtr parity_to_buchi_alt(AutPtr a) {
  if (a->max_color() <= 1) return a;
  auto evens = even_colors(*a, 1000000);
  return std::make_shared<PriorityGuess>(std::move(a), std::move(evens), 1000000);
}

AutPtr dealternate_mh(AutPtr a, std::size_t budget) {
  if (a->max_color() > 1) throw std::invalid_argument("breakpoint construction needs colours 0 and 1");
  return std::make_shared<Breakpoint>(std::move(a), budget);
}

AutPtr to_nondeterministic(AutPtr a, std::size_t budget) {
  const bool branching_free = a->mode() == Mode::Nondeterministic || a->mode() == Mode::Deterministic;
  if (a->max_color() > 1) {
    auto evens = even_colors(*a, budget);
    a = std::make_shared<PriorityGuess>(std::move(a), std::move(evens), budget);
  }
  if (branching_free) return a;
  return dealternate_mh(std::move(a), budget);
}

AutPtr determinize(AutPtr a, std::size_t budget) {
  if (a->mode() == Mode::Deterministic) return a;
  return std::make_shared<Safra>(to_nondeterministic(std::move(a), budget), budget);
}

// ---- membership, exploration, emptiness -----------------------------------------

bool accepts_lasso(const ParityAutomaton& a, const ZippedWord& w) {
  if (w.period.empty()) throw std::invalid_argument("lasso needs a non-empty period");
  ParityGame g;
  std::map<std::pair<int, std::size_t>, int> state_nodes;
  std::deque<std::pair<int, std::size_t>> work;
  std::vector<int> helpers;
  int top_sink = -1, bottom_sink = -1;

  auto state_node = [&](int q, std::size_t pos) {
    auto [it, fresh] = state_nodes.emplace(std::make_pair(q, pos), -1);
    if (fresh) {
      it->second = g.add_node(Player::Exists, a.color(q));
      work.emplace_back(q, pos);
    }
    return it->second;
  };
  std::function<int(const PosBool&, std::size_t)> formula_node = [&](const PosBool& f,
                                                                       std::size_t pos) -> int {
    switch (f.kind()) {
      case PosBool::Kind::True:
        if (top_sink < 0) {
          top_sink = g.add_node(Player::Exists, 0);
          g.succ[top_sink].push_back(top_sink);
        }
        return top_sink;
      case PosBool::Kind::False:
        if (bottom_sink < 0) {
          bottom_sink = g.add_node(Player::Exists, 1);
          g.succ[bottom_sink].push_back(bottom_sink);
        }
        return bottom_sink;
      case PosBool::Kind::Leaf: return state_node(f.state(), w.next(pos));
      case PosBool::Kind::Lit: throw std::logic_error("unresolved literal");
      default: break;
    }
    int v = g.add_node(f.kind() == PosBool::Kind::Or ? Player::Exists : Player::Forall, 0);
    helpers.push_back(v);
    for (const auto& k : f.kids()) {
      int c = formula_node(k, pos);
      g.succ[v].push_back(c);
    }
    return v;
  };

  g.initial = state_node(a.initial(), 0);
  while (!work.empty()) {
    auto [q, pos] = work.front();
    work.pop_front();
    int v = state_nodes.at({q, pos});
    int c = formula_node(a.delta(q, w.at(pos)), pos);
    g.succ[v].push_back(c);
  }
  int top_color = 1;
  for (const auto& [key, v] : state_nodes) top_color = std::max(top_color, g.color[v]);
  for (int v : helpers) g.color[v] = top_color + 1;
  return solve(g).winner[g.initial] == Player::Exists;
}

std::vector<Letter> all_letters(const Alphabet& alphabet, std::size_t limit) {
  std::size_t total = 1;
  for (const auto& c : alphabet.components) {
    total *= std::max<std::size_t>(c->num_states(), 1);
    if (total > limit) throw BudgetExceeded("alphabet exceeds " + std::to_string(limit) + " letters");
  }
  std::vector<Letter> out;
  Letter cur(alphabet.arity(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    out.push_back(cur);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (++cur[i] < static_cast<int>(alphabet.components[i]->num_states())) break;
      cur[i] = 0;
    }
  }
  return out;
}

std::size_t explore(const ParityAutomaton& a, const std::vector<Letter>& letters,
                    std::size_t budget) {
  std::set<int> seen{a.initial()};
  std::deque<int> work{a.initial()};
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    for (const auto& l : letters) {
      std::vector<int> next;
      a.delta(q, l).collect_states(next);
      for (int t : next)
        if (seen.insert(t).second) {
          if (seen.size() > budget) throw BudgetExceeded("exploration exceeded budget");
          work.push_back(t);
        }
    }
  }
  return seen.size();
}

namespace {

struct Edge {
  int to;  // -1: the accepting sink
  std::size_t letter;
};

}  // namespace

EmptinessResult is_empty(AutPtr a, std::size_t budget) {
  EmptinessResult res;
  if (a->arity() == 0) {
    ZippedWord w{{}, {Letter{}}};
    if (accepts_lasso(*a, w)) {
      res.empty = false;
      res.witness = w;
    }
    return res;
  }

  AutPtr n = to_nondeterministic(a, budget);
  const auto letters = all_letters(n->alphabet());
  std::vector<std::vector<Edge>> adj;
  std::deque<int> work{n->initial()};
  std::set<int> seen{n->initial()};
  std::vector<int> parent_state, parent_letter;
  auto grow = [&](int q) {
    if (static_cast<std::size_t>(q) >= adj.size()) {
      adj.resize(q + 1);
      parent_state.resize(q + 1, -2);
      parent_letter.resize(q + 1, -1);
    }
  };
  grow(n->initial());
  parent_state[n->initial()] = -1;
  int accepting_sink_from = -1;
  std::size_t sink_letter = 0;
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    for (std::size_t li = 0; li < letters.size(); ++li) {
      PosBool d = n->delta(q, letters[li]);
      if (d.is_true()) {
        adj[q].push_back({-1, li});
        if (accepting_sink_from < 0) {
          accepting_sink_from = q;
          sink_letter = li;
        }
        continue;
      }
      std::vector<int> next;
      d.collect_states(next);
      for (int t : next) {
        grow(t);
        adj[q].push_back({t, li});
        if (seen.insert(t).second) {
          if (seen.size() > budget) throw BudgetExceeded("emptiness check exceeded budget");
          parent_state[t] = q;
          parent_letter[t] = static_cast<int>(li);
          work.push_back(t);
        }
      }
    }
  }

  auto path_to = [&](int q) {
    std::vector<Letter> word;
    for (int cur = q; parent_state[cur] >= 0; cur = parent_state[cur])
      word.push_back(letters[parent_letter[cur]]);
    std::reverse(word.begin(), word.end());
    return word;
  };

  if (accepting_sink_from >= 0) {
    res.empty = false;
    auto prefix = path_to(accepting_sink_from);
    prefix.push_back(letters[sink_letter]);
    res.witness = ZippedWord{prefix, {letters[0]}};
    return res;
  }

  // accepting state on a cycle: BFS back to itself
  for (int f : seen) {
    if (n->color(f) % 2 != 0) continue;
    std::map<int, std::pair<int, std::size_t>> back;
    std::deque<int> q{f};
    bool closed = false;
    std::pair<int, std::size_t> closing{};
    while (!q.empty() && !closed) {
      int cur = q.front();
      q.pop_front();
      for (const auto& e : adj[cur]) {
        if (e.to == f) {
          closed = true;
          closing = {cur, e.letter};
          break;
        }
        if (e.to >= 0 && !back.count(e.to)) {
          back[e.to] = {cur, e.letter};
          q.push_back(e.to);
        }
      }
    }
    if (!closed) continue;
    std::vector<Letter> period{letters[closing.second]};
    for (int cur = closing.first; cur != f; cur = back[cur].first) period.push_back(letters[back[cur].second]);
    std::reverse(period.begin(), period.end());
    res.empty = false;
    res.witness = ZippedWord{path_to(f), period};
    return res;
  }
  return res;
}

}  // namespace stratmc
