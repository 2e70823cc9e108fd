#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stratmc/formula.hpp"
#include "stratmc/game.hpp"

namespace stratmc {

// Yardstick fixture: a two-player game in which the builder must emit a
// binary counter whose reset marker recurs with a fixed, very large period,
// while the challenger may flag a wrong bit.

namespace counter_props {
inline constexpr const char* kBitStart = "bitstart";  // starts an a-configuration
inline constexpr const char* kCfgStart = "cfgstart";  // starts a b-configuration
inline constexpr const char* kReset = "ctrstart";     // b-counter restarts at zero
inline constexpr const char* kA = "a";
inline constexpr const char* kB = "b";
inline constexpr const char* kError = "error";
inline constexpr const char* kErrorStart = "errorStart";
}  // namespace counter_props

inline constexpr const char* kBuilderAgent = "builder";
inline constexpr const char* kChallengerAgent = "challenger";

// One step of the counter region.
struct CounterColumn {
  bool bit_start = false, cfg_start = false, reset = false, a = false, b = false, error = false;
  bool operator==(const CounterColumn&) const = default;
};

GameStructure counter_game();

// State of the counter region carrying exactly the propositions of `c`.
int counter_state(const GameStructure& g, const CounterColumn& c);

std::string counter_var(int level);  // path variable of level i: "c<i>"

// Level 1 checks the counter on its own with n-bit a-configurations; level
// i > 1 measures positions with the level i-1 counter.
FormulaPtr counter_correct(int level, int n);
// <<builder>> c_k ... <<builder>> c_1. correct_1 & ... & correct_k
FormulaPtr counter_spec(int n, int k);

// Reset period of a correct level-k counter; nullopt once it exceeds 64 bits.
std::optional<std::uint64_t> counter_period(int k, int n);
// Closed form of the period as text, e.g. "2^(2^2)*2^2*2" for k=1, n=2.
std::string counter_period_text(int k, int n);

// Arithmetic oracle, independent of the formulas: the first `length`
// columns of a correct level-1 counter over n-bit a-configurations.
std::vector<CounterColumn> canonical_counter(int n, std::size_t length);

// Path init -> s1 -> counter region: the challenger delays nothing and the
// counter starts in the third step. `prefix` precedes the repeated `period`.
ZippedWord counter_lasso(const GameStructure& g, const std::vector<CounterColumn>& prefix,
                         const std::vector<CounterColumn>& period);

struct CounterFixture {
  int n = 1, k = 1;
  GameStructure game;
  std::vector<FormulaPtr> correct;  // correct_1 .. correct_k
  FormulaPtr spec;
  std::optional<std::uint64_t> period;
};

CounterFixture gen_counter(int n, int k);

}  // namespace stratmc
