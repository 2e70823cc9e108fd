#include <doctest.h>

#include "stratmc/counter.hpp"
#include "stratmc/tables.hpp"
#include "support.hpp"

using namespace stratmc;
using namespace stratmc::testing;

namespace {

std::vector<TableResult> rows_of(const std::string& instance) {
  std::vector<TableResult> out;
  for (const auto& c : table_checks())
    if (c.instance == instance) out.push_back(run_table_check(c, STRATMC_CORPUS_DIR));
  return out;
}

std::string verdicts(const std::vector<TableResult>& rs) {
  std::string s;
  for (const auto& r : rs) s += r.holds ? (*r.holds ? '+' : '-') : '?';
  return s;
}

}  // namespace

TEST_CASE("counter periods") {
  CHECK(counter_period(1, 1) == 8u);
  CHECK(counter_period(1, 2) == 128u);
  CHECK_FALSE(counter_period(3, 2).has_value());
  CHECK(counter_period_text(1, 2) == "2^(2^2)*2^2*2");
}

TEST_CASE("canonical counter: first columns for n = 2") {
  auto cols = canonical_counter(2, 19);
  REQUIRE(cols.size() == 19);
  const char* bitstart = "#.#.#.#.#.#.#.#.#.#";
  const char* cfgstart = "#.......#.......#..";
  const char* a = "...##.##...##.##...";
  for (int t = 0; t < 19; ++t) {
    CHECK(cols[t].bit_start == (bitstart[t] == '#'));
    CHECK(cols[t].cfg_start == (cfgstart[t] == '#'));
    CHECK(cols[t].a == (a[t] == '#'));
    CHECK(cols[t].reset == (t == 0));
    CHECK_FALSE(cols[t].error);
  }
  // b is only meaningful at bit starts; the only set one among the first 19 is at 14
  for (int t = 0; t < 19; t += 2) CHECK(cols[t].b == (t == 14));
}

TEST_CASE("canonical counter: the reset recurs exactly at the period") {
  for (int n : {1, 2}) {
    const std::size_t period = *counter_period(1, n);
    auto cols = canonical_counter(n, 2 * period + 1);
    for (std::size_t t = 0; t < cols.size(); ++t) CHECK(cols[t].reset == (t % period == 0));
  }
}

TEST_CASE("counter game: valid, every column has a state") {
  GameStructure g = counter_game();
  CHECK(validate(g).ok());
  for (const auto& c : canonical_counter(2, 128)) {
    const int s = counter_state(g, c);
    REQUIRE(s >= 0);
    CHECK(g.has_prop(s, g.prop_id(counter_props::kBitStart)) == c.bit_start);
    CHECK(g.has_prop(s, g.prop_id(counter_props::kB)) == c.b);
  }
}

TEST_CASE("gen_counter: fixture shape and a printed form that reparses") {
  CounterFixture fx = gen_counter(2, 2);
  CHECK(validate(fx.game).ok());
  REQUIRE(fx.correct.size() == 2);
  CHECK(fx.period == counter_period(2, 2));
  CHECK(to_string(parse_formula(to_string(fx.spec))) == to_string(fx.spec));
}

TEST_CASE("table rows: P1 and P4 info-flow verdicts") {
  CHECK(verdicts(rows_of("P1")) == "++++");
  CHECK(verdicts(rows_of("P4")) == "---+");
}

TEST_CASE("table rows: Q1 at width 1") {
  auto rs = rows_of("Q1");
  CHECK(verdicts(rs) == "-++");
  for (const auto& r : rs) CHECK(r.matches());
}

TEST_CASE("table rows: a missing program is reported, not thrown") {
  TableCheck c = table_checks().front();
  c.program = "no_such_program.bw";
  TableResult r = run_table_check(c, STRATMC_CORPUS_DIR);
  CHECK_FALSE(r.holds.has_value());
  CHECK_FALSE(r.error.empty());
}

TEST_CASE("batch_tables: the parallel path reproduces the serial reference") {
  auto serial = batch_tables(STRATMC_CORPUS_DIR, 1);
  auto parallel = batch_tables(STRATMC_CORPUS_DIR, 4);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].check.instance == parallel[i].check.instance);
    CHECK(serial[i].check.property == parallel[i].check.property);
    CHECK(serial[i].holds == parallel[i].holds);
    CHECK(serial[i].matches());
  }
  CHECK(render_tables(serial).find("P4") != std::string::npos);
}
