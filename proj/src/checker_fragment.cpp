#include <algorithm>
#include <chrono>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "stratmc/checker.hpp"
#include "stratmc/paritygame.hpp"

namespace stratmc {

namespace {

struct FragmentCopy {
  GamePtr g;
  std::string var;
  std::vector<bool> controlled;
};

struct FragmentPlan {
  std::vector<FragmentCopy> copies;
  FormulaPtr body;      // NNF
  bool negated = false; // verdict is the negation of the planned game
};

std::optional<FragmentPlan> plan_fragment(const SystemEnv& env, const FormulaPtr& f) {
  auto prefix = split_prefix(to_nnf(f));
  if (!prefix || prefix->quants.empty()) return std::nullopt;
  std::vector<QuantKind> kinds;
  for (const auto& q : prefix->quants) kinds.push_back(quant_kind(q, env.resolve(q.system)->agent_names()));
  const bool uniform = std::all_of(kinds.begin(), kinds.end(), [&](QuantKind k) {
    return is_simple(k) && k == kinds.front();
  });
  if (!prefix->is_block && kinds.size() > 1 && !uniform) return std::nullopt;
  const bool any_dual = std::count(kinds.begin(), kinds.end(), QuantKind::DualStrategic) > 0;
  const bool any_strat = std::count(kinds.begin(), kinds.end(), QuantKind::Strategic) > 0;
  if (any_dual && any_strat) return std::nullopt;

  FragmentPlan plan;
  plan.negated = any_dual;
  plan.body = any_dual ? to_nnf(neg(prefix->body)) : prefix->body;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const auto& q = prefix->quants[i];
    FragmentCopy c{env.resolve(q.system), q.var, {}};
    AgentSet who = q.agents;
    if (kinds[i] == QuantKind::Exists) who = any_dual ? AgentSet::nobody() : AgentSet::everyone();
    if (kinds[i] == QuantKind::Forall) who = any_dual ? AgentSet::everyone() : AgentSet::nobody();
    for (const auto& a : c.g->agents) c.controlled.push_back(who.contains(a.name));
    plan.copies.push_back(std::move(c));
  }
  return plan;
}

// A table of successors over the undecided agents of one copy, big-endian in
// canonical agent order.
struct Residual {
  std::vector<int> agents;  // canonical agent indices still undecided
  std::vector<int> table;
};

class ProductGame {
 public:
  ProductGame(const FragmentPlan& plan, AutPtr dpa, std::size_t node_budget)
      : plan_(plan), dpa_(std::move(dpa)), budget_(node_budget) {
    std::set<int> st;
    for (const auto& c : plan_.copies)
      for (int s : c.g->stages()) st.insert(s);
    stages_.assign(st.begin(), st.end());
  }

  ParityGame run() {
    std::vector<int> start;
    for (const auto& c : plan_.copies) start.push_back(c.g->initial);
    game_.initial = sync_node(start, dpa_->initial());
    while (!work_.empty()) {
      auto [v, states, q] = work_.front();
      work_.pop_front();
      expand_sync(v, states, q);
    }
    int top = 1;
    for (int v : sync_ids_) top = std::max(top, game_.color[v]);
    for (int v : helpers_) game_.color[v] = top + 1;
    std::set<int> used;
    for (int v : sync_ids_) used.insert(game_.color[v]);
    dpa_colors_ = static_cast<int>(used.size());
    return std::move(game_);
  }

  int dpa_colors() const { return dpa_colors_; }

 private:
  int add(Player p, int color) {
    if (game_.size() >= budget_)
      throw BudgetExceeded("product game exceeded " + std::to_string(budget_) + " nodes");
    return game_.add_node(p, color);
  }

  int sink(bool win) {
    int& id = win ? win_sink_ : lose_sink_;
    if (id < 0) {
      id = add(Player::Exists, win ? 0 : 1);
      game_.succ[id].push_back(id);
      sync_ids_.push_back(id);
    }
    return id;
  }

  int sync_node(const std::vector<int>& states, int q) {
    auto key = std::make_pair(states, q);
    if (auto it = syncs_.find(key); it != syncs_.end()) return it->second;
    int v = add(Player::Exists, dpa_->color(q));
    syncs_.emplace(key, v);
    sync_ids_.push_back(v);
    work_.push_back({v, states, q});
    return v;
  }

  void expand_sync(int v, const std::vector<int>& states, int q) {
    PosBool d = dpa_->delta(q, states);
    if (d.is_true() || d.is_false()) {
      const int target = sink(d.is_true());
      game_.succ[v].push_back(target);
      return;
    }
    std::vector<Residual> res;
    for (std::size_t i = 0; i < states.size(); ++i) {
      Residual r;
      for (std::size_t a = 0; a < plan_.copies[i].g->agents.size(); ++a) r.agents.push_back(static_cast<int>(a));
      r.table = plan_.copies[i].g->table[states[i]];
      res.push_back(std::move(r));
    }
    // Computed first: building the target may reallocate game_.succ.
    const int target = phase_node(d.state(), 0, std::move(res));
    game_.succ[v].push_back(target);
  }

  // Phase 2k lets Exists fix the coalition agents of stage k, phase 2k+1 lets
  // Forall fix the rest. Empty phases are skipped.
  int phase_node(int q, std::size_t phase, std::vector<Residual> res) {
    while (phase < 2 * stages_.size() && deciders(phase, res).empty()) ++phase;
    if (phase == 2 * stages_.size()) {
      std::vector<int> next;
      for (const auto& r : res) next.push_back(r.table.at(0));
      return sync_node(next, q);
    }
    std::vector<std::vector<int>> key_tables;
    for (const auto& r : res) key_tables.push_back(r.table);
    auto key = std::make_tuple(q, phase, key_tables);
    if (auto it = phases_.find(key); it != phases_.end()) return it->second;
    const bool exists = phase % 2 == 0;
    int v = add(exists ? Player::Exists : Player::Forall, 0);
    helpers_.push_back(v);
    phases_.emplace(std::move(key), v);

    // Restrictions act on each copy independently, so the node's successors
    // are the product of the per-copy sets of distinct restricted tables.
    const auto who = deciders(phase, res);
    std::vector<std::vector<Residual>> options(res.size());
    for (std::size_t c = 0; c < res.size(); ++c) {
      std::vector<int> positions;
      for (const auto& [copy, pos] : who)
        if (copy == c) positions.push_back(pos);
      if (positions.empty()) {
        options[c].push_back(res[c]);
        continue;
      }
      const auto& agents = plan_.copies[c].g->agents;
      std::set<std::vector<int>> distinct;
      std::vector<int> pick(positions.size(), 0);
      while (true) {
        std::vector<std::pair<int, int>> fixed;  // position in residual, move
        for (std::size_t k = 0; k < positions.size(); ++k) fixed.emplace_back(positions[k], pick[k]);
        Residual r = restrict(c, res[c], fixed);
        if (distinct.insert(r.table).second) options[c].push_back(std::move(r));
        std::size_t k = 0;
        while (k < positions.size()) {
          if (++pick[k] < static_cast<int>(agents[res[c].agents[positions[k]]].moves.size())) break;
          pick[k++] = 0;
        }
        if (k == positions.size()) break;
      }
    }
    std::vector<std::size_t> pick(res.size(), 0);
    std::set<int> seen;
    while (true) {
      std::vector<Residual> next;
      for (std::size_t c = 0; c < res.size(); ++c) next.push_back(options[c][pick[c]]);
      int w = phase_node(q, phase + 1, std::move(next));
      if (seen.insert(w).second) game_.succ[v].push_back(w);
      std::size_t c = 0;
      while (c < res.size()) {
        if (++pick[c] < options[c].size()) break;
        pick[c++] = 0;
      }
      if (c == res.size()) break;
    }
    return v;
  }

  // (copy, position inside that copy's residual agent list)
  std::vector<std::pair<std::size_t, int>> deciders(std::size_t phase, const std::vector<Residual>& res) const {
    const int stage = stages_[phase / 2];
    const bool exists = phase % 2 == 0;
    std::vector<std::pair<std::size_t, int>> out;
    for (std::size_t c = 0; c < res.size(); ++c) {
      const auto& copy = plan_.copies[c];
      for (std::size_t k = 0; k < res[c].agents.size(); ++k) {
        const int a = res[c].agents[k];
        if (copy.g->agents[a].stage == stage && copy.controlled[a] == exists)
          out.emplace_back(c, static_cast<int>(k));
      }
    }
    return out;
  }

  Residual restrict(std::size_t c, const Residual& r, const std::vector<std::pair<int, int>>& fixed) const {
    const auto& agents = plan_.copies[c].g->agents;
    std::vector<int> value(r.agents.size(), -1);
    for (auto [pos, mv] : fixed) value[pos] = mv;
    Residual out;
    for (std::size_t k = 0; k < r.agents.size(); ++k)
      if (value[k] < 0) out.agents.push_back(r.agents[k]);
    std::size_t size = 1;
    for (int a : out.agents) size *= agents[a].moves.size();
    out.table.resize(size);
    std::vector<int> free_moves(out.agents.size(), 0);
    for (std::size_t idx = 0; idx < size; ++idx) {
      // decode idx big-endian over out.agents
      std::size_t rest = idx;
      for (std::size_t k = out.agents.size(); k-- > 0;) {
        free_moves[k] = static_cast<int>(rest % agents[out.agents[k]].moves.size());
        rest /= agents[out.agents[k]].moves.size();
      }
      std::size_t full = 0, f = 0;
      for (std::size_t k = 0; k < r.agents.size(); ++k) {
        const int mv = value[k] >= 0 ? value[k] : free_moves[f++];
        full = full * agents[r.agents[k]].moves.size() + mv;
      }
      out.table[idx] = r.table[full];
    }
    return out;
  }

  const FragmentPlan& plan_;
  AutPtr dpa_;
  std::size_t budget_;
  std::vector<int> stages_;
  ParityGame game_;
  std::map<std::pair<std::vector<int>, int>, int> syncs_;
  std::map<std::tuple<int, std::size_t, std::vector<std::vector<int>>>, int> phases_;
  std::deque<std::tuple<int, std::vector<int>, int>> work_;
  std::vector<int> sync_ids_, helpers_;
  int win_sink_ = -1, lose_sink_ = -1;
  int dpa_colors_ = 0;
};

std::string strategy_text(const ParityGame& g, const Solution& sol) {
  std::ostringstream out;
  out << dump_game(g);
  for (std::size_t v = 0; v < g.size(); ++v)
    if (g.owner[v] == Player::Exists && sol.winner[v] == Player::Exists && sol.strategy[v] >= 0 &&
        g.succ[v].size() > 1)
      out << "strategy " << v << " " << sol.strategy[v] << "\n";
  return out.str();
}

}  // namespace

bool fragment_eligible(const SystemEnv& env, const FormulaPtr& f) {
  return free_vars(f).empty() && plan_fragment(env, f).has_value();
}

Verdict mc_fragment(const SystemEnv& env, const FormulaPtr& f, const CheckOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  if (!free_vars(f).empty()) throw std::invalid_argument("model checking needs a closed formula");
  auto plan = plan_fragment(env, f);
  if (!plan) throw std::invalid_argument("formula is outside the parallel-block fragment");

  std::vector<std::string> vars;
  Alphabet alphabet;
  for (const auto& c : plan->copies) {
    vars.push_back(c.var);
    alphabet.components.push_back(c.g);
  }
  auto apa = ltl_body_to_apa(plan->body, vars, alphabet);
  AutPtr nba = to_nondeterministic(apa, opts.automaton_states);
  AutPtr dpa = determinize(nba, opts.automaton_states);

  ProductGame builder(*plan, dpa, opts.game_nodes);
  ParityGame game = builder.run();
  Solution sol = solve(game);

  Verdict v;
  v.engine = Engine::Fragment;
  const bool exists_wins = sol.winner[game.initial] == Player::Exists;
  v.holds = plan->negated ? !exists_wins : exists_wins;
  v.stats.automaton_states = {apa->num_states(), nba->num_states(), dpa->num_states()};
  v.stats.game_nodes = game.size();
  v.stats.game_edges = game.num_edges();
  v.stats.colors = builder.dpa_colors();
  if (opts.witness) v.witness = strategy_text(game, sol);
  v.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return v;
}

Verdict model_check(const SystemEnv& env, const FormulaPtr& f, Engine engine, const CheckOptions& opts) {
  if (engine == Engine::Auto) engine = fragment_eligible(env, f) ? Engine::Fragment : Engine::Full;
  return engine == Engine::Fragment ? mc_fragment(env, f, opts) : mc_full(env, f, opts);
}

}  // namespace stratmc
