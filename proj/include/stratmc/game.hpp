#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace stratmc {

struct Agent {
  std::string name;
  int stage = 0;
  std::vector<std::string> moves;
  bool operator==(const Agent&) const = default;
};

// Declared information-flow roles of atomic propositions.
struct Roles {
  std::vector<std::string> high, low, out;
  bool operator==(const Roles&) const = default;
};

// Multi-stage concurrent game structure. Agents are kept in canonical order
// (stage, then name). `table[s]` is indexed by the mixed-radix joint move index
// over that order; -1 marks a missing transition (rejected by validate).
class GameStructure {
 public:
  std::vector<std::string> state_names;
  int initial = 0;
  std::vector<Agent> agents;
  std::vector<std::string> props;        // sorted
  std::vector<std::vector<int>> labels;  // per state, sorted prop ids
  std::vector<std::vector<int>> table;
  std::optional<Roles> roles;

  bool operator==(const GameStructure&) const = default;

  std::size_t num_states() const { return state_names.size(); }
  std::size_t num_joint_moves() const;
  std::size_t joint_index(const std::vector<int>& moves) const;
  std::vector<int> decode_joint(std::size_t joint) const;
  int successor(int s, const std::vector<int>& moves) const {
    return table[s][joint_index(moves)];
  }
  std::vector<int> successors(int s) const;  // distinct, sorted

  int prop_id(std::string_view p) const;  // -1 when the structure never uses p
  bool has_prop(int s, int prop) const;
  std::vector<std::string> label_names(int s) const;
  int agent_index(std::string_view name) const;  // -1 when absent
  int state_index(std::string_view name) const;  // -1 when absent
  int max_stage() const;
  std::set<std::string> agent_names() const;
  std::vector<int> stages() const;  // distinct stages, increasing
};

using GamePtr = std::shared_ptr<const GameStructure>;

// Collects agents, states and transitions in any order and produces a
// canonical GameStructure. Later transitions override earlier ones.
class GameBuilder {
 public:
  using MoveFn = std::function<int(const std::vector<int>& moves)>;

  int add_agent(std::string name, int stage, std::vector<std::string> moves);
  int add_state(std::string name, std::vector<std::string> labels = {});
  void set_initial(int s) { initial_ = s; }
  void set_roles(Roles r) { roles_ = std::move(r); }
  // `pattern` is indexed by builder agent id; -1 is a wildcard.
  void add_transition(int from, std::vector<int> pattern, int to);
  // `fn` receives moves indexed by builder agent id.
  void set_transitions(int from, MoveFn fn);
  int num_states() const { return static_cast<int>(states_.size()); }
  GameStructure build() const;

 private:
  struct Pattern {
    int from;
    std::vector<int> moves;
    int to;
  };
  std::vector<Agent> agents_;
  std::vector<std::pair<std::string, std::vector<std::string>>> states_;
  std::vector<std::optional<MoveFn>> fns_;
  std::vector<Pattern> patterns_;
  int initial_ = 0;
  std::optional<Roles> roles_;
};

struct Diagnostics {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

Diagnostics validate(const GameStructure& g);

GameStructure parse_game(std::string_view text);
std::string serialize_game(const GameStructure& g);

// Adds agent `sched` (moves go/stay) in a fresh last stage; states become
// pairs (s, tag) and tag-1 copies carry `stut`.
GameStructure stutterize(const GameStructure& g, const std::string& sched = "sched",
                         const std::string& stut = "stut");
// Prepends a chain of `n` fresh unlabeled states before the initial state.
GameStructure shift(const GameStructure& g, int n);
// Restriction to states reachable from the initial state.
GameStructure reachable(const GameStructure& g);

// Ultimately periodic word u.v^omega over n-tuples of states.
struct ZippedWord {
  std::vector<std::vector<int>> prefix;
  std::vector<std::vector<int>> period;

  std::size_t length() const { return prefix.size() + period.size(); }
  const std::vector<int>& at(std::size_t pos) const {
    return pos < prefix.size() ? prefix[pos] : period[pos - prefix.size()];
  }
  // Successor of a position in the folded word.
  std::size_t next(std::size_t pos) const {
    return pos + 1 < length() ? pos + 1 : prefix.size();
  }
  std::size_t arity() const { return period.empty() ? 0 : period.front().size(); }
};

// Component-wise labels for letters that are tuples of states.
struct Alphabet {
  std::vector<GamePtr> components;
  std::size_t arity() const { return components.size(); }
  bool has(std::size_t component, int state, int prop) const {
    return components[component]->has_prop(state, prop);
  }
};

}  // namespace stratmc
