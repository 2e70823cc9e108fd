#include "stratmc/paritygame.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace stratmc {

std::size_t ParityGame::num_edges() const {
  std::size_t e = 0;
  for (const auto& s : succ) e += s.size();
  return e;
}

int ParityGame::max_color() const {
  int m = 0;
  for (int c : color) m = std::max(m, c);
  return m;
}

namespace {

std::vector<std::vector<int>> predecessors(const ParityGame& g) {
  std::vector<std::vector<int>> pred(g.size());
  for (std::size_t v = 0; v < g.size(); ++v)
    for (int w : g.succ[v]) pred[w].push_back(static_cast<int>(v));
  return pred;
}

// Attractor with strategy recording; `strategy` may be null.
std::vector<bool> attract(const ParityGame& g, const std::vector<std::vector<int>>& pred,
                          Player side, const std::vector<bool>& target,
                          const std::vector<bool>& alive, std::vector<int>* strategy) {
  const std::size_t n = g.size();
  std::vector<bool> in(n, false);
  std::vector<int> escapes(n, 0);
  std::deque<int> work;
  for (std::size_t v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    for (int w : g.succ[v])
      if (alive[w]) ++escapes[v];
    if (target[v]) {
      in[v] = true;
      work.push_back(static_cast<int>(v));
    }
  }
  while (!work.empty()) {
    int w = work.front();
    work.pop_front();
    for (int v : pred[w]) {
      if (!alive[v] || in[v]) continue;
      if (g.owner[v] == side) {
        in[v] = true;
        if (strategy) (*strategy)[v] = w;
        work.push_back(v);
      } else if (--escapes[v] == 0) {
        in[v] = true;
        work.push_back(v);
      }
    }
  }
  return in;
}

class Zielonka {
 public:
  explicit Zielonka(const ParityGame& g) : g_(g), pred_(predecessors(g)) {
    sol_.winner.assign(g.size(), Player::Exists);
    sol_.strategy.assign(g.size(), -1);
  }

  Solution run() {
    std::vector<bool> all(g_.size(), true);
    std::vector<bool> won_exists, won_forall;
    solve(all, won_exists, won_forall);
    for (std::size_t v = 0; v < g_.size(); ++v)
      sol_.winner[v] = won_exists[v] ? Player::Exists : Player::Forall;
    for (std::size_t v = 0; v < g_.size(); ++v)
      if (g_.owner[v] != sol_.winner[v]) sol_.strategy[v] = -1;
    return std::move(sol_);
  }

 private:
  void solve(const std::vector<bool>& alive, std::vector<bool>& win_e, std::vector<bool>& win_f) {
    const std::size_t n = g_.size();
    win_e.assign(n, false);
    win_f.assign(n, false);
    int lowest = std::numeric_limits<int>::max();
    for (std::size_t v = 0; v < n; ++v)
      if (alive[v]) lowest = std::min(lowest, g_.color[v]);
    if (lowest == std::numeric_limits<int>::max()) return;

    const Player p = lowest % 2 == 0 ? Player::Exists : Player::Forall;
    std::vector<bool> top(n, false);
    for (std::size_t v = 0; v < n; ++v) top[v] = alive[v] && g_.color[v] == lowest;
    std::vector<bool> attr = attract(g_, pred_, p, top, alive, &sol_.strategy);

    std::vector<bool> rest(n);
    for (std::size_t v = 0; v < n; ++v) rest[v] = alive[v] && !attr[v];
    std::vector<bool> sub_e, sub_f;
    solve(rest, sub_e, sub_f);
    auto& sub_opp = p == Player::Exists ? sub_f : sub_e;
    bool opp_empty = std::none_of(sub_opp.begin(), sub_opp.end(), [](bool b) { return b; });

    if (opp_empty) {
      auto& mine = p == Player::Exists ? win_e : win_f;
      for (std::size_t v = 0; v < n; ++v) {
        if (!alive[v]) continue;
        mine[v] = true;
        if (top[v] && g_.owner[v] == p) {
          for (int w : g_.succ[v])
            if (alive[w]) {
              sol_.strategy[v] = w;
              break;
            }
        }
      }
      return;
    }

    const Player q = opponent(p);
    std::vector<bool> back = attract(g_, pred_, q, sub_opp, alive, &sol_.strategy);
    std::vector<bool> remain(n);
    for (std::size_t v = 0; v < n; ++v) remain[v] = alive[v] && !back[v];
    std::vector<bool> r_e, r_f;
    solve(remain, r_e, r_f);
    for (std::size_t v = 0; v < n; ++v) {
      if (!alive[v]) continue;
      bool opp_wins = back[v] || (q == Player::Exists ? r_e[v] : r_f[v]);
      (q == Player::Exists ? win_e : win_f)[v] = opp_wins;
      (q == Player::Exists ? win_f : win_e)[v] = !opp_wins;
    }
  }

  const ParityGame& g_;
  std::vector<std::vector<int>> pred_;
  Solution sol_;
};

// Tarjan SCCs on the subgraph induced by `mask` with edges from `adj`.
std::vector<std::vector<int>> sccs(const std::vector<std::vector<int>>& adj,
                                   const std::vector<bool>& mask) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> out;
  int counter = 0;
  struct Frame {
    int v;
    std::size_t edge;
  };
  for (int root = 0; root < n; ++root) {
    if (!mask[root] || index[root] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.edge < adj[f.v].size()) {
        int w = adj[f.v][f.edge++];
        if (!mask[w]) continue;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      int v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

// Nodes lying on a cycle (inside `mask`) whose least colour has parity `parity`.
std::vector<bool> nodes_on_cycles_with_parity(const ParityGame& g,
                                              const std::vector<std::vector<int>>& adj,
                                              const std::vector<bool>& mask, int parity) {
  const std::size_t n = g.size();
  std::vector<bool> bad(n, false);
  const int maxc = g.max_color();
  for (int c = parity; c <= maxc; c += 2) {
    std::vector<bool> sub(n);
    for (std::size_t v = 0; v < n; ++v) sub[v] = mask[v] && g.color[v] >= c;
    for (const auto& comp : sccs(adj, sub)) {
      bool has_c = false;
      bool cyclic = comp.size() > 1;
      for (int v : comp) {
        has_c = has_c || g.color[v] == c;
        if (!cyclic)
          for (int w : adj[v]) cyclic = cyclic || w == v;
      }
      if (has_c && cyclic)
        for (int v : comp) bad[v] = true;
    }
  }
  return bad;
}

}  // namespace

std::vector<bool> attractor(const ParityGame& g, Player side, const std::vector<bool>& target,
                            const std::vector<bool>& alive) {
  std::vector<bool> all = alive.empty() ? std::vector<bool>(g.size(), true) : alive;
  return attract(g, predecessors(g), side, target, all, nullptr);
}

Solution solve(const ParityGame& g) {
  for (std::size_t v = 0; v < g.size(); ++v)
    if (g.succ[v].empty()) throw std::invalid_argument("parity game node without successor");
  return Zielonka(g).run();
}

std::vector<Player> solve_brute_force(const ParityGame& g) {
  const std::size_t n = g.size();
  std::vector<int> choosers;
  for (std::size_t v = 0; v < n; ++v)
    if (g.owner[v] == Player::Exists) choosers.push_back(static_cast<int>(v));
  std::vector<std::size_t> pick(choosers.size(), 0);
  std::vector<Player> result(n, Player::Forall);
  const std::vector<bool> all(n, true);
  while (true) {
    std::vector<std::vector<int>> adj(n);
    for (std::size_t v = 0; v < n; ++v) adj[v] = g.succ[v];
    for (std::size_t i = 0; i < choosers.size(); ++i)
      adj[choosers[i]] = {g.succ[choosers[i]][pick[i]]};
    std::vector<bool> bad = nodes_on_cycles_with_parity(g, adj, all, 1);
    // nodes that can reach a bad cycle are lost for this strategy
    std::vector<std::vector<int>> rev(n);
    for (std::size_t v = 0; v < n; ++v)
      for (int w : adj[v]) rev[w].push_back(static_cast<int>(v));
    std::vector<bool> lost = bad;
    std::deque<int> work;
    for (std::size_t v = 0; v < n; ++v)
      if (bad[v]) work.push_back(static_cast<int>(v));
    while (!work.empty()) {
      int w = work.front();
      work.pop_front();
      for (int v : rev[w])
        if (!lost[v]) {
          lost[v] = true;
          work.push_back(v);
        }
    }
    for (std::size_t v = 0; v < n; ++v)
      if (!lost[v]) result[v] = Player::Exists;
    std::size_t i = 0;
    while (i < pick.size() && ++pick[i] == g.succ[choosers[i]].size()) pick[i++] = 0;
    if (i == pick.size()) break;
  }
  return result;
}

bool strategy_is_winning(const ParityGame& g, const Solution& sol) {
  const std::size_t n = g.size();
  for (Player p : {Player::Exists, Player::Forall}) {
    std::vector<bool> region(n);
    for (std::size_t v = 0; v < n; ++v) region[v] = sol.winner[v] == p;
    std::vector<std::vector<int>> adj(n);
    for (std::size_t v = 0; v < n; ++v) {
      if (!region[v]) continue;
      if (g.owner[v] == p) {
        int s = sol.strategy[v];
        if (s < 0 || std::find(g.succ[v].begin(), g.succ[v].end(), s) == g.succ[v].end())
          return false;
        adj[v] = {s};
      } else {
        adj[v] = g.succ[v];
      }
      for (int w : adj[v])
        if (!region[w]) return false;
    }
    int losing_parity = p == Player::Exists ? 1 : 0;
    auto bad = nodes_on_cycles_with_parity(g, adj, region, losing_parity);
    if (std::any_of(bad.begin(), bad.end(), [](bool b) { return b; })) return false;
  }
  return true;
}

std::string dump_game(const ParityGame& g) {
  std::ostringstream out;
  out << "initial " << g.initial << "\n";
  for (std::size_t v = 0; v < g.size(); ++v) {
    out << "node " << v << " owner " << (g.owner[v] == Player::Exists ? "exists" : "forall")
        << " color " << g.color[v] << " succ";
    for (int w : g.succ[v]) out << " " << w;
    out << "\n";
  }
  return out.str();
}

}  // namespace stratmc
