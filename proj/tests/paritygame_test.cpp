#include <doctest.h>

#include "stratmc/paritygame.hpp"
#include "support.hpp"

using namespace stratmc;
using namespace stratmc::testing;

TEST_CASE("attractor: full set, empty set, forced chain") {
  ParityGame g;
  for (int i = 0; i < 3; ++i) g.add_node(Player::Exists, 1);
  g.succ[0] = {1};
  g.succ[1] = {2};
  g.succ[2] = {2};
  CHECK(attractor(g, Player::Exists, {true, true, true}) == std::vector<bool>{true, true, true});
  CHECK(attractor(g, Player::Exists, {false, false, false}) == std::vector<bool>{false, false, false});
  CHECK(attractor(g, Player::Exists, {false, false, true}) == std::vector<bool>{true, true, true});
}

TEST_CASE("attractor: the opponent escapes unless every edge leads in") {
  ParityGame g;
  g.add_node(Player::Forall, 1);
  g.add_node(Player::Exists, 1);
  g.add_node(Player::Exists, 1);
  g.succ[0] = {1, 2};
  g.succ[1] = {1};
  g.succ[2] = {2};
  CHECK(attractor(g, Player::Exists, {false, true, false}) == std::vector<bool>{false, true, false});
  CHECK(attractor(g, Player::Forall, {false, true, false}) == std::vector<bool>{true, true, false});
}

TEST_CASE("solve: single self loops") {
  ParityGame even;
  even.add_node(Player::Forall, 0);
  even.succ[0] = {0};
  CHECK(solve(even).winner[0] == Player::Exists);

  ParityGame odd;
  odd.add_node(Player::Exists, 1);
  odd.succ[0] = {0};
  CHECK(solve(odd).winner[0] == Player::Forall);
}

TEST_CASE("solve: small games agree with positional brute force") {
  // shape family: two colours, out-degree at most two
  Rng rng(51);
  for (int i = 0; i < 2000; ++i) {
    ParityGame g = random_parity_game(rng, uniform(rng, 1, 4), 2, 2);
    Solution sol = solve(g);
    CHECK(sol.winner == solve_brute_force(g));
    CHECK(strategy_is_winning(g, sol));
  }
}

TEST_CASE("property: regions partition, are closed, and strategies stay inside") {
  Rng rng(52);
  for (int i = 0; i < 500; ++i) {
    ParityGame g = random_parity_game(rng, uniform(rng, 1, 12), uniform(rng, 1, 5), 3);
    Solution sol = solve(g);
    REQUIRE(sol.winner.size() == g.size());
    REQUIRE(sol.strategy.size() == g.size());
    for (std::size_t v = 0; v < g.size(); ++v) {
      const Player w = sol.winner[v];
      if (g.owner[v] == w) {
        // the winner picks an edge that stays in its region
        const int t = sol.strategy[v];
        REQUIRE(t >= 0);
        CHECK(std::count(g.succ[v].begin(), g.succ[v].end(), t) == 1);
        CHECK(sol.winner[t] == w);
      } else {
        // every opponent edge stays in the winner's region
        for (int t : g.succ[v]) CHECK(sol.winner[t] == w);
        CHECK(sol.strategy[v] == -1);
      }
    }
    CHECK(strategy_is_winning(g, sol));
  }
}

TEST_CASE("strategy_is_winning: rejects a strategy that leaves the region") {
  ParityGame g;
  g.add_node(Player::Exists, 1);
  g.add_node(Player::Exists, 0);
  g.add_node(Player::Exists, 1);
  g.succ[0] = {1, 2};
  g.succ[1] = {1};
  g.succ[2] = {2};
  Solution sol = solve(g);
  CHECK(sol.winner[0] == Player::Exists);
  CHECK(sol.strategy[0] == 1);
  Solution wrong = sol;
  wrong.strategy[0] = 2;
  CHECK_FALSE(strategy_is_winning(g, wrong));
}

TEST_CASE("dump_game lists every node") {
  ParityGame g;
  g.add_node(Player::Exists, 3);
  g.succ[0] = {0};
  const std::string text = dump_game(g);
  CHECK(text.find("3") != std::string::npos);
}
