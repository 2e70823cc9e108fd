#include <doctest.h>

#include "stratmc/counter.hpp"
#include "stratmc/game.hpp"
#include "stratmc/program.hpp"
#include "support.hpp"

#include <map>

using namespace stratmc;
using namespace stratmc::testing;

namespace {

GameStructure self_loop() {
  return parse_game(
      "agent g stage 0 moves m\n"
      "state s init label a\n"
      "trans s -> s\n");
}

// Reachable part renumbered in BFS order over joint moves; two structures
// with equal canonical forms are isomorphic.
std::pair<std::vector<std::vector<int>>, std::vector<std::vector<int>>> canonical(const GameStructure& g) {
  std::map<int, int> index{{g.initial, 0}};
  std::vector<int> order{g.initial};
  std::vector<std::vector<int>> table, labels;
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::vector<int> row;
    for (int t : g.table[order[i]]) {
      auto [it, fresh] = index.emplace(t, static_cast<int>(order.size()));
      if (fresh) order.push_back(t);
      row.push_back(it->second);
    }
    table.push_back(row);
    labels.push_back(g.labels[order[i]]);
  }
  return {table, labels};
}

}  // namespace

TEST_CASE("validate: one-state self loop is valid") {
  CHECK(validate(self_loop()).ok());
}

TEST_CASE("validate: missing transition names the state and the move vector") {
  GameStructure g = parse_game(
      "agent g stage 0 moves x y\n"
      "state s init\n"
      "state t\n"
      "trans s g=x -> t\n"
      "trans t -> s\n");
  auto d = validate(g);
  REQUIRE_FALSE(d.ok());
  const std::string msg = d.errors.front();
  CHECK(msg.find("s") != std::string::npos);
  CHECK(msg.find("y") != std::string::npos);
}

TEST_CASE("validate: counter fixture") {
  GameStructure g = counter_game();
  CHECK(validate(g).ok());
  CHECK(reachable(g).num_states() == 5 + 64);
}

TEST_CASE("parse/serialize round trip") {
  Rng rng(21);
  for (int i = 0; i < 50; ++i) {
    GameStructure g = random_game(rng);
    CHECK(parse_game(serialize_game(g)) == g);
  }
  CHECK_THROWS_WITH_AS(parse_game("state s init\ntrans s -> nowhere\n"), "line 2: unknown state nowhere", std::runtime_error);
}

TEST_CASE("stutterize: doubles the states and adds a last-stage scheduler") {
  GameBuilder b;
  b.add_agent("g", 0, {"m0", "m1"});
  b.add_agent("h", 2, {"m0"});
  for (int s = 0; s < 5; ++s) b.add_state("s" + std::to_string(s), s % 2 ? std::vector<std::string>{"a"} : std::vector<std::string>{});
  for (int s = 0; s < 5; ++s) b.add_transition(s, {-1, -1}, (s + 1) % 5);
  GameStructure g = b.build();
  GameStructure st = stutterize(g);
  CHECK(st.num_states() == 10);
  CHECK(st.agents.size() == 3);
  const int sched = st.agent_index("sched");
  REQUIRE(sched >= 0);
  CHECK(st.agents[sched].stage == 3);
  const int stut = st.prop_id("stut");
  for (int s = 0; s < 5; ++s) {
    // copy 0 keeps L(s), copy 1 adds stut
    auto base = g.label_names(s);
    auto tagged = base;
    tagged.push_back("stut");
    std::sort(tagged.begin(), tagged.end());
    CHECK(st.label_names(s) == base);
    CHECK(st.label_names(s + 5) == tagged);
    CHECK(st.has_prop(s + 5, stut));
  }
  CHECK_THROWS(stutterize(st));  // sched already present
}

TEST_CASE("stutterize: a play that always stays on compiled Q1 is stuttering from step 1") {
  Program q1 = parse_program(
      "#vars o h temp\n#out o\n"
      "read_h h; if h { o := !o } else { temp := !o; o := temp }");
  GameStructure st = stutterize(compile_to_cgs(q1));
  const int sched = st.agent_index("sched");
  const int stay = static_cast<int>(std::find(st.agents[sched].moves.begin(), st.agents[sched].moves.end(), "stay") -
                                    st.agents[sched].moves.begin());
  const int stut = st.prop_id("stut");
  int s = st.initial;
  for (int step = 1; step <= 10; ++step) {
    std::vector<int> mv(st.agents.size(), 0);
    mv[sched] = stay;
    s = st.successor(s, mv);
    CHECK(st.has_prop(s, stut));
  }
}

TEST_CASE("shift: zero is the identity, n adds n unlabeled states") {
  Rng rng(22);
  GameStructure g = random_game(rng);
  CHECK(shift(g, 0) == g);
  GameStructure s2 = shift(g, 2);
  CHECK(s2.num_states() == g.num_states() + 2);
  CHECK(s2.label_names(s2.initial).empty());
}

TEST_CASE("property: plays of shift(g, n) are n empty labels followed by a play of g") {
  Rng rng(23);
  for (int i = 0; i < 40; ++i) {
    GameStructure g = random_game(rng);
    const int n = uniform(rng, 1, 3);
    GameStructure sg = shift(g, n);
    int s = sg.initial, t = g.initial;
    for (int k = 0; k < n + 3; ++k) {
      if (k < n) CHECK(sg.labels[s].empty());
      else CHECK(sg.label_names(s) == g.label_names(t));
      std::vector<int> mv;
      for (const auto& a : g.agents) mv.push_back(uniform(rng, 0, static_cast<int>(a.moves.size()) - 1));
      s = sg.successor(s, mv);
      if (k >= n) t = g.successor(t, mv);
    }
  }
}

TEST_CASE("property: shift composes") {
  Rng rng(24);
  for (int i = 0; i < 30; ++i) {
    GameStructure g = random_game(rng);
    const int x = uniform(rng, 0, 3), y = uniform(rng, 0, 3);
    CHECK(canonical(shift(shift(g, x), y)) == canonical(shift(g, x + y)));
  }
}

TEST_CASE("reachable: drops isolated states, keeps the initial one, is idempotent") {
  GameStructure g = parse_game(
      "agent g stage 0 moves m\n"
      "state s init\nstate lonely label a\n"
      "trans s -> s\ntrans lonely -> s\n");
  GameStructure r = reachable(g);
  CHECK(r.num_states() == 1);
  CHECK(r.state_names[r.initial] == "s");
  CHECK(reachable(r) == r);

  Rng rng(25);
  for (int i = 0; i < 40; ++i) {
    GameStructure h = reachable(random_game(rng));
    CHECK(reachable(h) == h);
    CHECK(h.num_states() >= 1);
  }
}

TEST_CASE("property: stutterize go-successors project onto successors of g") {
  Rng rng(26);
  for (int i = 0; i < 30; ++i) {
    GameStructure g = random_game(rng);
    GameStructure st = stutterize(g);
    CHECK(st.num_states() == 2 * g.num_states());
    for (std::size_t s = 0; s < st.num_states(); ++s) {
      const std::string& name = st.state_names[s];
      // every successor's underlying state is a successor of the underlying state or itself
      for (int t : st.successors(static_cast<int>(s))) {
        auto base = [&](const std::string& n) { return g.state_index(n.substr(0, n.rfind('/'))); };
        const int from = base(name), to = base(st.state_names[t]);
        REQUIRE(from >= 0);
        REQUIRE(to >= 0);
        auto succ = g.successors(from);
        CHECK((to == from || std::count(succ.begin(), succ.end(), to) == 1));
      }
    }
  }
}

TEST_CASE("property: transition table is total and deterministic") {
  Rng rng(27);
  for (int i = 0; i < 50; ++i) {
    GameStructure g = random_game(rng);
    for (std::size_t s = 0; s < g.num_states(); ++s) {
      REQUIRE(g.table[s].size() == g.num_joint_moves());
      for (std::size_t j = 0; j < g.num_joint_moves(); ++j) {
        const int t = g.table[s][j];
        CHECK(t >= 0);
        CHECK(t < static_cast<int>(g.num_states()));
        CHECK(g.joint_index(g.decode_joint(j)) == j);
      }
    }
  }
}
