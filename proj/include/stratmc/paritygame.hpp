#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stratmc {

enum class Player : std::uint8_t { Exists = 0, Forall = 1 };
inline Player opponent(Player p) { return p == Player::Exists ? Player::Forall : Player::Exists; }

// Min-even parity game: Exists wins a play iff the least colour seen
// infinitely often is even. Every node must have at least one successor.
struct ParityGame {
  std::vector<Player> owner;
  std::vector<int> color;
  std::vector<std::vector<int>> succ;
  int initial = 0;

  int add_node(Player p, int c) {
    owner.push_back(p);
    color.push_back(c);
    succ.emplace_back();
    return static_cast<int>(owner.size()) - 1;
  }
  std::size_t size() const { return owner.size(); }
  std::size_t num_edges() const;
  int max_color() const;
};

struct Solution {
  std::vector<Player> winner;
  std::vector<int> strategy;  // chosen successor for nodes owned by their winner, else -1
};

// Nodes from which `side` can force a visit to `target`, restricted to the
// nodes flagged in `alive` (empty = all nodes).
std::vector<bool> attractor(const ParityGame& g, Player side, const std::vector<bool>& target,
                            const std::vector<bool>& alive = {});

Solution solve(const ParityGame& g);

// Reference solver: enumerates positional strategies of Exists and checks
// Forall's best reply by cycle analysis. Only usable on tiny games.
std::vector<Player> solve_brute_force(const ParityGame& g);

// True when following `strategy` keeps every play from every node in the
// winner's region inside that region and every reachable cycle has the
// winner's parity as its least colour.
bool strategy_is_winning(const ParityGame& g, const Solution& sol);

// Line format: "node ID owner exists|forall color C succ a b c".
std::string dump_game(const ParityGame& g);

}  // namespace stratmc
