#include "stratmc/tables.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace stratmc {

std::vector<TableCheck> table_checks() {
  std::vector<TableCheck> out;
  const char* info_cols[] = {"OD", "NI", "simSec", "sGNI"};
  const struct {
    const char* name;
    const char* file;
    bool row[4];
  } info[] = {
      {"P1", "p1.bw", {true, true, true, true}},
      {"P2", "p2.bw", {false, true, true, true}},
      {"P3", "p3.bw", {false, false, true, true}},
      {"P4", "p4.bw", {false, false, false, true}},
  };
  const int lookahead[] = {0, 0, 1, kGniLookahead};
  for (const auto& r : info)
    for (int c = 0; c < 4; ++c)
      out.push_back({"info-flow", r.name, r.file, 1, info_cols[c], r.row[c], false, lookahead[c]});

  const char* async_cols[] = {"OD", "OD_async", "NI_async"};
  const struct {
    const char* name;
    const char* file;
    int bits;
    bool row[3];
    bool reconstructed;
  } async[] = {
      {"Q1", "q1.bw", 1, {false, true, true}, false},
      {"Q1/w2", "q1.bw", 2, {false, true, true}, false},
      {"Q1/w3", "q1.bw", 3, {false, true, true}, false},
      {"Q2", "q2.bw", 1, {false, false, true}, true},
  };
  for (const auto& r : async)
    for (int c = 0; c < 3; ++c)
      out.push_back({"async", r.name, r.file, r.bits, async_cols[c], r.row[c], r.reconstructed});
  return out;
}

Program load_program(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

TemplateParams params_for(const GameStructure& g) {
  if (!g.roles) throw std::invalid_argument("structure declares no roles");
  TemplateParams p;
  p.high = g.roles->high;
  p.low = g.roles->low;
  p.out = g.roles->out;
  return p;
}

TableResult run_table_check(const TableCheck& c, const std::string& corpus_dir, const CheckOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  TableResult r;
  r.check = c;
  try {
    Program prog = load_program(corpus_dir + "/programs/" + c.program);
    prog.bits = c.bits;
    auto g = std::make_shared<const GameStructure>(compile_to_cgs(prog));
    SystemEnv env;
    std::string tmpl;
    if (c.property == "OD") {
      env.main = g;
      tmpl = "od";
    } else if (c.property == "NI") {
      env.main = g;
      tmpl = "ni";
    } else if (c.property == "simSec" || c.property == "sGNI") {
      env.main = g;
      env.named["shifted"] = std::make_shared<const GameStructure>(shift(*g, c.lookahead));
      tmpl = c.property == "simSec" ? "simni" : "aproxgni(" + std::to_string(c.lookahead) + ")";
    } else if (c.property == "OD_async" || c.property == "NI_async") {
      env.main = std::make_shared<const GameStructure>(stutterize(*g));
      tmpl = c.property == "OD_async" ? "od_async" : "ni_async";
    } else {
      throw std::invalid_argument("unknown property column " + c.property);
    }
    Verdict v = mc_fragment(env, make_template(tmpl, params_for(*g)), opts);
    r.holds = v.holds;
    r.stats = v.stats;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<TableResult> batch_tables(const std::string& corpus_dir, int workers, const CheckOptions& opts) {
  const auto checks = table_checks();
  std::vector<TableResult> out(checks.size());
  const int n = static_cast<int>(checks.size());
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) out[i] = run_table_check(checks[i], corpus_dir, opts);
    return out;
  }
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (int i = 0; i < n; ++i) out[i] = run_table_check(checks[i], corpus_dir, opts);
  return out;
}

std::string render_tables(const std::vector<TableResult>& results) {
  std::ostringstream out;
  std::string table;
  for (const auto& r : results) {
    if (r.check.table != table) {
      table = r.check.table;
      out << "== " << table << " ==\n";
    }
    const char* got = !r.holds ? "error" : *r.holds ? "holds" : "fails";
    const char* want = r.check.expected ? "holds" : "fails";
    std::string status = r.matches() ? "ok" : r.check.reconstructed ? "FLAG (reconstructed program)" : "MISMATCH";
    std::string column = r.check.property;
    if (r.check.property == "sGNI") column += "/n=" + std::to_string(r.check.lookahead);
    out << std::left << std::setw(7) << r.check.instance << std::setw(11) << column << " got "
        << std::setw(6) << got << " expected " << std::setw(6) << want << std::setw(10) << status << std::fixed
        << std::setprecision(3) << r.seconds << "s  nodes=" << r.stats.game_nodes;
    if (!r.error.empty()) out << "  error: " << r.error;
    out << "\n";
  }
  return out.str();
}

}  // namespace stratmc
