#include "stratmc/counter.hpp"

#include <stdexcept>

namespace stratmc {

namespace cp = counter_props;

namespace {

// Region states are indexed by the bitmask over these six propositions.
constexpr const char* kRegionProps[] = {cp::kBitStart, cp::kCfgStart, cp::kReset, cp::kA, cp::kB, cp::kError};
constexpr int kRegionBits = 6;
constexpr int kBuilderBits = 5;  // the builder sets all region props but error

int column_mask(const CounterColumn& c) {
  const bool bits[] = {c.bit_start, c.cfg_start, c.reset, c.a, c.b, c.error};
  int m = 0;
  for (int i = 0; i < kRegionBits; ++i)
    if (bits[i]) m |= 1 << i;
  return m;
}

std::string region_name(int mask) {
  std::string s = "o_";
  for (int i = 0; i < kRegionBits; ++i) s += (mask >> i & 1) ? '1' : '0';
  return s;
}

}  // namespace

GameStructure counter_game() {
  GameBuilder b;
  // builder move: region props (5 bits) plus the loop flag read in s4
  std::vector<std::string> builder_moves, challenger_moves;
  for (int flag = 0; flag < 2; ++flag)
    for (int m = 0; m < (1 << kBuilderBits); ++m) {
      std::string name;
      for (int i = 0; i < kBuilderBits; ++i) name += (m >> i & 1) ? '1' : '0';
      builder_moves.push_back(name + "_" + std::to_string(flag));
    }
  // challenger move: error bit plus the loop flag read in init, s1, s2
  for (int flag = 0; flag < 2; ++flag)
    for (int e = 0; e < 2; ++e) challenger_moves.push_back("e" + std::to_string(e) + "_" + std::to_string(flag));
  const int builder = b.add_agent(kBuilderAgent, 0, builder_moves);
  const int challenger = b.add_agent(kChallengerAgent, 0, challenger_moves);

  std::vector<int> region(1 << kRegionBits);
  for (int m = 0; m < (1 << kRegionBits); ++m) {
    std::vector<std::string> label;
    for (int i = 0; i < kRegionBits; ++i)
      if (m >> i & 1) label.push_back(kRegionProps[i]);
    region[m] = b.add_state(region_name(m), label);
  }
  const int init = b.add_state("init");
  const int s1 = b.add_state("s1");
  const int s2 = b.add_state("s2");
  const int s3 = b.add_state("s3", {cp::kErrorStart});
  const int s4 = b.add_state("s4");
  const int start = region[0b000111];

  auto builder_props = [&](int mv) { return mv % (1 << kBuilderBits); };
  auto builder_flag = [&](int mv) { return mv >= (1 << kBuilderBits); };
  auto challenger_error = [&](int mv) { return mv % 2; };
  auto challenger_flag = [&](int mv) { return mv >= 2; };

  for (int m = 0; m < (1 << kRegionBits); ++m)
    b.set_transitions(region[m], [&, builder, challenger](const std::vector<int>& mv) {
      return region[builder_props(mv[builder]) | challenger_error(mv[challenger]) << kBuilderBits];
    });
  b.set_transitions(init, [&, challenger](const std::vector<int>& mv) {
    return challenger_flag(mv[challenger]) ? s1 : s2;
  });
  b.set_transitions(s1, [&, challenger](const std::vector<int>& mv) {
    return challenger_flag(mv[challenger]) ? s1 : start;
  });
  b.set_transitions(s2, [&, challenger](const std::vector<int>& mv) {
    return challenger_flag(mv[challenger]) ? s2 : s3;
  });
  b.set_transitions(s3, [s4](const std::vector<int>&) { return s4; });
  b.set_transitions(s4, [&, builder](const std::vector<int>& mv) {
    return builder_flag(mv[builder]) ? s4 : start;
  });
  b.set_initial(init);
  return b.build();
}

int counter_state(const GameStructure& g, const CounterColumn& c) {
  int s = g.state_index(region_name(column_mask(c)));
  if (s < 0) throw std::invalid_argument("structure has no counter region state");
  return s;
}

std::string counter_var(int level) { return "c" + std::to_string(level); }

namespace {

// strictly before the first psi, phi holds
FormulaPtr before(FormulaPtr phi, FormulaPtr psi) { return until(neg(psi), conj(phi, neg(psi))); }
FormulaPtr exactly_once(FormulaPtr psi) {
  return until(neg(psi), conj(psi, next(globally(neg(psi)))));
}
// at the next occurrence of phi, psi holds
FormulaPtr next_occurrence(FormulaPtr phi, FormulaPtr psi) { return until(neg(phi), conj(phi, psi)); }

struct Props {
  FormulaPtr bit, cfg, reset, a, b, error, error_start;
  explicit Props(const std::string& v)
      : bit(atom(cp::kBitStart, v)),
        cfg(atom(cp::kCfgStart, v)),
        reset(atom(cp::kReset, v)),
        a(atom(cp::kA, v)),
        b(atom(cp::kB, v)),
        error(atom(cp::kError, v)),
        error_start(atom(cp::kErrorStart, v)) {}
};

// cfgstart exactly at bit starts whose a-configuration is zero; ctrstart
// exactly at configuration starts whose b-configuration is zero.
FormulaPtr marker_rules(const Props& p) {
  FormulaPtr zero_a = conj(p.bit, conj(neg(p.a), next(until(neg(p.a), p.bit))));
  FormulaPtr zero_b = conj(p.cfg, conj(neg(p.b), next(until(implies(p.bit, neg(p.b)), p.cfg))));
  return conj(globally(iff(p.cfg, zero_a)), globally(iff(p.reset, zero_b)));
}

FormulaPtr correct_base(int n) {
  const Props p(counter_var(1));
  FormulaPtr layout = globally(conj_all({implies(p.reset, p.cfg), implies(p.cfg, p.bit), iff(p.bit, next_n(p.bit, n))}));
  // a bit equals the same bit of the next configuration iff a less
  // significant zero follows within the configuration
  FormulaPtr a_counter = globally(iff(iff(p.a, next_n(p.a, n)), next(before(neg(p.a), p.bit))));

  std::vector<FormulaPtr> same_a;
  for (int i = 0; i < n; ++i) same_a.push_back(iff(next_n(p.a, i), globally(implies(p.error, next_n(p.a, i)))));
  FormulaPtr prev_pos = conj_all({p.bit, until(neg(p.cfg), conj(p.cfg, next(until(neg(p.cfg), p.error)))), conj_all(same_a)});
  FormulaPtr false_alarm =
      iff(iff(globally(implies(prev_pos, p.b)), globally(implies(p.error, p.b))),
          globally(implies(prev_pos, next(before(conj(p.bit, neg(p.b)), p.cfg)))));
  FormulaPtr b_counter = implies(conj(exactly_once(p.error), globally(implies(p.error, p.bit))), false_alarm);

  return weak_until(neg(p.reset), conj_all({p.reset, layout, marker_rules(p), a_counter, b_counter}));
}

FormulaPtr correct_step(int level) {
  const Props p(counter_var(level));
  const Props q(counter_var(level - 1));  // the shorter yardstick
  FormulaPtr layout = globally(conj(implies(p.reset, p.cfg), implies(p.cfg, p.bit)));
  FormulaPtr spacing = globally(implies(conj(q.reset, p.bit),
                                        next(until(conj(neg(p.bit), neg(q.reset)), conj(p.bit, q.reset)))));
  auto at_next_tick = [&](FormulaPtr f) { return next(next_occurrence(q.reset, f)); };
  FormulaPtr zero_follows = next(before(neg(p.a), p.bit));
  FormulaPtr ones_follow = next(until(p.a, p.bit));
  FormulaPtr a_counter = conj_all({
      globally(implies(conj_all({p.a, q.reset, at_next_tick(p.a)}), zero_follows)),
      globally(implies(conj_all({neg(p.a), q.reset, at_next_tick(neg(p.a))}), zero_follows)),
      globally(implies(conj_all({neg(p.a), q.reset, at_next_tick(p.a)}), ones_follow)),
      globally(implies(conj_all({p.a, q.reset, at_next_tick(neg(p.a))}), ones_follow)),
  });

  FormulaPtr count_correct =
      iff(iff(globally(implies(q.error_start, p.b)), globally(implies(p.error, p.b))),
          globally(implies(q.error_start, next(before(conj(p.bit, neg(p.b)), p.cfg)))));
  FormulaPtr wrong_count =
      globally(implies(q.error_start, neg(until(neg(p.cfg), conj(p.cfg, next(until(neg(p.cfg), p.error)))))));
  FormulaPtr counter_started = globally(implies(q.error_start, next(before(q.reset, p.bit))));
  FormulaPtr found_discrepancy = xor_(globally(implies(q.error_start, next_occurrence(q.reset, p.a))),
                                      globally(implies(p.error, next_occurrence(q.reset, p.a))));
  FormulaPtr false_alarm = disj_all({count_correct, wrong_count, conj(counter_started, found_discrepancy)});
  FormulaPtr b_counter = implies(conj(exactly_once(p.error), exactly_once(q.error_start)), false_alarm);

  return weak_until(neg(p.reset), conj_all({p.reset, layout, spacing, marker_rules(p), a_counter, b_counter}));
}

}  // namespace

FormulaPtr counter_correct(int level, int n) {
  if (level < 1 || n < 1) throw std::invalid_argument("counter level and width must be positive");
  return level == 1 ? correct_base(n) : correct_step(level);
}

FormulaPtr counter_spec(int n, int k) {
  std::vector<FormulaPtr> parts;
  for (int i = 1; i <= k; ++i) parts.push_back(counter_correct(i, n));
  FormulaPtr f = conj_all(parts);
  for (int i = 1; i <= k; ++i) f = quant(strat_q({kBuilderAgent}, counter_var(i)), f);
  return f;
}

std::optional<std::uint64_t> counter_period(int k, int n) {
  if (k < 1 || n < 1) throw std::invalid_argument("counter level and width must be positive");
  // C(1,n) = 2^(2^n) * 2^n * n and C(k+1,n) = 2^(2^C) * 2^C * C with C = C(k,n)
  std::optional<std::uint64_t> c = static_cast<std::uint64_t>(n);
  for (int level = 1; level <= k; ++level) {
    const std::uint64_t x = *c;
    if (x >= 6) return std::nullopt;  // 2^(2^6) alone overflows
    const std::uint64_t inner = 1ull << x;         // 2^x
    if (inner + x >= 64) return std::nullopt;
    const std::uint64_t prod = (1ull << inner) * inner;  // 2^(2^x) * 2^x
    if (prod > UINT64_MAX / x) return std::nullopt;
    c = prod * x;
  }
  return c;
}

std::string counter_period_text(int k, int n) {
  std::string x = std::to_string(n);
  for (int level = 1; level <= k; ++level) {
    std::string next = "2^(2^" + x + ")*2^" + x + "*" + x;
    if (level < k) {
      auto value = counter_period(level, n);
      x = value ? std::to_string(*value) : "(" + next + ")";
    } else {
      x = next;
    }
  }
  return x;
}

std::vector<CounterColumn> canonical_counter(int n, std::size_t length) {
  if (n < 1 || n > 5) throw std::invalid_argument("canonical counter supports 1 <= n <= 5");
  const std::uint64_t a_values = 1ull << n;                  // a-configurations per b-configuration
  const std::uint64_t b_len = static_cast<std::uint64_t>(n) * a_values;  // steps per b-configuration
  const std::uint64_t period = *counter_period(1, n);
  std::vector<CounterColumn> out(length);
  for (std::size_t t = 0; t < length; ++t) {
    const std::uint64_t pos = t % period;
    const std::uint64_t bit = pos % n;  // 0 is the most significant a-bit
    const std::uint64_t a_value = (pos / n) % a_values;
    const std::uint64_t b_value = pos / b_len;  // < 2^(2^n)
    CounterColumn& c = out[t];
    c.bit_start = bit == 0;
    c.cfg_start = pos % b_len == 0;
    c.reset = pos == 0;
    c.a = (a_value >> (n - 1 - bit)) & 1;
    // the b-bit at a bit start is indexed by that a-configuration's value
    c.b = c.bit_start && ((b_value >> (a_values - 1 - a_value)) & 1);
  }
  return out;
}

ZippedWord counter_lasso(const GameStructure& g, const std::vector<CounterColumn>& prefix,
                         const std::vector<CounterColumn>& period) {
  if (period.empty()) throw std::invalid_argument("counter lasso needs a non-empty period");
  ZippedWord w;
  w.prefix.push_back({g.state_index("init")});
  w.prefix.push_back({g.state_index("s1")});
  for (const auto& c : prefix) w.prefix.push_back({counter_state(g, c)});
  for (const auto& c : period) w.period.push_back({counter_state(g, c)});
  return w;
}

CounterFixture gen_counter(int n, int k) {
  if (n < 1 || k < 1) throw std::invalid_argument("gen_counter needs n >= 1 and k >= 1");
  CounterFixture f;
  f.n = n;
  f.k = k;
  f.game = counter_game();
  for (int i = 1; i <= k; ++i) f.correct.push_back(counter_correct(i, n));
  f.spec = counter_spec(n, k);
  f.period = counter_period(k, n);
  return f;
}

}  // namespace stratmc
