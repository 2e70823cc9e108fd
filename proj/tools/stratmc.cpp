// Command-line frontend: model checking, prefix cost, fixture generation,
// table reproduction and structure dumps. Exit codes: 0 holds / success,
// 1 fails / mismatch, 2 error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "stratmc/checker.hpp"
#include "stratmc/counter.hpp"
#include "stratmc/paritygame.hpp"
#include "stratmc/program.hpp"
#include "stratmc/tables.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace stratmc;

namespace {

constexpr int kExitHolds = 0;
constexpr int kExitFails = 1;
constexpr int kExitError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Formula files may carry whole-line `//` comments.
std::string strip_comment_lines(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first != std::string::npos && line.compare(first, 2, "//") == 0) continue;
    out += line + "\n";
  }
  return out;
}

struct SystemOptions {
  std::string path;
  std::vector<std::string> named;  // NAME=FILE
  int bits = 0;                    // override for programs
  bool stutter = false;
  int shift = -1;                  // binds "shifted" when >= 0
};

// Programs (.bw) are compiled; anything else is read as a game file.
GameStructure load_system(const std::string& path, int bits) {
  std::string text;
  try {
    text = read_file(path);
    if (fs::path(path).extension() == ".bw") {
      Program p = parse_program(text);
      if (bits > 0) p.bits = bits;
      return compile_to_cgs(p);
    }
    GameStructure g = parse_game(text);
    auto diag = validate(g);
    if (!diag.ok()) throw std::runtime_error(diag.errors.front());
    return g;
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

struct LoadedEnv {
  SystemEnv env;
  GamePtr plain;  // main system before stuttering (roles source)
};

LoadedEnv load_env(const SystemOptions& o, int default_shift) {
  LoadedEnv out;
  out.plain = std::make_shared<const GameStructure>(load_system(o.path, o.bits));
  out.env.main = o.stutter ? std::make_shared<const GameStructure>(stutterize(*out.plain)) : out.plain;
  for (const auto& entry : o.named) {
    auto eq = entry.find('=');
    if (eq == std::string::npos) throw std::runtime_error("--system-ref expects NAME=FILE, got " + entry);
    out.env.named[entry.substr(0, eq)] = std::make_shared<const GameStructure>(load_system(entry.substr(eq + 1), o.bits));
  }
  const int shift_by = o.shift >= 0 ? o.shift : default_shift;
  if (shift_by >= 0 && !out.env.named.count("shifted"))
    out.env.named["shifted"] = std::make_shared<const GameStructure>(shift(*out.env.main, shift_by));
  return out;
}

// Lookahead a template needs on the "shifted" system, or -1.
int template_shift(const std::string& name, int lookahead) {
  if (name == "simni") return 1;
  if (name.rfind("aproxgni", 0) == 0) {
    if (auto open = name.find('('); open != std::string::npos) return std::stoi(name.substr(open + 1));
    return lookahead;
  }
  return -1;
}

json stats_json(const Stats& s) {
  return {{"automaton_states", s.automaton_states},
          {"game_nodes", s.game_nodes},
          {"game_edges", s.game_edges},
          {"colors", s.colors},
          {"seconds", s.seconds}};
}

int run_check(const SystemOptions& sys, const std::string& formula_text, const std::string& formula_file,
              const std::string& tmpl, int lookahead, const std::string& engine_name_in, const CheckOptions& opts,
              bool as_json) {
  int default_shift = -1;
  if (!tmpl.empty()) default_shift = template_shift(tmpl, lookahead);
  LoadedEnv le = load_env(sys, default_shift);

  FormulaPtr f;
  const auto systems = le.env.names();
  if (!tmpl.empty()) {
    TemplateParams params = params_for(*le.plain);
    params.lookahead = lookahead;
    f = make_template(tmpl, params);
  } else {
    const std::string text = formula_file.empty() ? formula_text : strip_comment_lines(read_file(formula_file));
    f = parse_formula(text, &systems);
  }
  if (!free_vars(f).empty()) throw std::runtime_error("formula is open: every path variable must be quantified");

  Engine engine = Engine::Auto;
  if (engine_name_in == "fragment") engine = Engine::Fragment;
  else if (engine_name_in == "full") engine = Engine::Full;
  else if (engine_name_in != "auto") throw std::runtime_error("unknown engine " + engine_name_in);

  Verdict v = model_check(le.env, f, engine, opts);
  if (as_json) {
    json j = {{"holds", v.holds}, {"engine", engine_name(v.engine)}, {"formula", to_string(f)},
              {"stats", stats_json(v.stats)}};
    if (v.witness) j["witness"] = *v.witness;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << (v.holds ? "holds" : "fails") << " (" << engine_name(v.engine) << " engine, ";
    if (v.engine == Engine::Fragment) {
      std::cout << v.stats.game_nodes << " game nodes";
    } else {
      std::cout << "automaton stages";
      for (std::size_t n : v.stats.automaton_states) std::cout << " " << n;
    }
    std::cout << ", " << v.stats.seconds << "s)\n";
    if (v.witness) std::cout << *v.witness;
  }
  return v.holds ? kExitHolds : kExitFails;
}

std::vector<QuantKind> parse_prefix(const std::string& text) {
  std::vector<QuantKind> out;
  for (char c : text) {
    switch (c) {
      case 'E': out.push_back(QuantKind::Exists); break;
      case 'A': out.push_back(QuantKind::Forall); break;
      case 'S': out.push_back(QuantKind::Strategic); break;
      case 'D': out.push_back(QuantKind::DualStrategic); break;
      case ',': case ' ': break;
      default: throw std::runtime_error(std::string("prefix letters are E, A, S, D; got '") + c + "'");
    }
  }
  return out;
}

int run_cost(const std::string& prefix, const std::string& formula, const std::vector<std::string>& agents,
             bool as_json) {
  CostReport r;
  std::vector<QuantKind> kinds;
  if (!prefix.empty()) {
    kinds = parse_prefix(prefix);
    r = prefix_cost(kinds);
  } else {
    FormulaPtr f = parse_formula(formula);
    const std::set<std::string> universe(agents.begin(), agents.end());
    r = prefix_cost(f, universe);
    kinds = classify(f, universe).kinds;
  }
  if (as_json) {
    std::vector<std::string> names;
    for (auto k : kinds) names.push_back(kind_name(k));
    std::cout << json{{"prefix", names}, {"d_spec", r.d_spec}, {"d_sys", r.d_sys}, {"pair_costs", r.pair_costs}}.dump(2)
              << "\n";
  } else {
    std::cout << "d_spec " << r.d_spec << "\nd_sys " << r.d_sys << "\npairs";
    for (int c : r.pair_costs) std::cout << " " << c;
    std::cout << "\n";
  }
  return kExitHolds;
}

int run_gen_counter(int n, int k, const std::string& out_dir, bool check, std::size_t budget) {
  CounterFixture fx = gen_counter(n, k);
  const std::string game_text = serialize_game(fx.game);
  const std::string spec_text = to_string(fx.spec);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream(fs::path(out_dir) / "counter.game") << game_text;
    std::ofstream(fs::path(out_dir) / "counter.hatl") << spec_text << "\n";
    std::cout << "wrote " << (fs::path(out_dir) / "counter.game").string() << " and "
              << (fs::path(out_dir) / "counter.hatl").string() << "\n";
  } else {
    std::cout << game_text << "\n# specification\n" << spec_text << "\n";
  }
  std::cout << "period C(" << k << "," << n << ") = "
            << (fx.period ? std::to_string(*fx.period) : counter_period_text(k, n)) << "\n";
  if (!check) return kExitHolds;
  SystemEnv env;
  env.main = std::make_shared<const GameStructure>(fx.game);
  CheckOptions opts;
  opts.automaton_states = budget;
  opts.game_nodes = budget * 4;
  Verdict v = model_check(env, fx.spec, Engine::Auto, opts);
  std::cout << "builder wins: " << (v.holds ? "yes" : "no") << " (" << v.stats.game_nodes << " game nodes)\n";
  return v.holds ? kExitHolds : kExitFails;
}

int run_batch(const std::string& corpus, int workers, bool as_json) {
  auto results = batch_tables(corpus, workers);
  bool all_ok = true;
  for (const auto& r : results)
    if (!r.matches() && !r.check.reconstructed) all_ok = false;
  if (as_json) {
    json rows = json::array();
    for (const auto& r : results)
      rows.push_back({{"table", r.check.table},
                      {"instance", r.check.instance},
                      {"property", r.check.property},
                      {"expected", r.check.expected},
                      {"holds", r.holds ? json(*r.holds) : json(nullptr)},
                      {"matches", r.matches()},
                      {"reconstructed", r.check.reconstructed},
                      {"error", r.error},
                      {"stats", stats_json(r.stats)}});
    std::cout << rows.dump(2) << "\n";
  } else {
    std::cout << render_tables(results);
    std::cout << (all_ok ? "all verdicts match\n" : "verdict mismatch\n");
  }
  return all_ok ? kExitHolds : kExitFails;
}

int run_dump_game(const SystemOptions& sys) {
  LoadedEnv le = load_env(sys, -1);
  GameStructure g = *le.env.main;
  if (sys.shift > 0) g = shift(g, sys.shift);
  std::cout << serialize_game(g);
  return kExitHolds;
}

// Explores the reachable part of an automaton and lists its transitions.
std::string describe_automaton(const ParityAutomaton& a, const std::vector<Letter>& letters, std::size_t budget) {
  std::ostringstream out;
  out << "mode " << mode_name(a.mode()) << "\ninitial " << a.initial() << "\n";
  std::vector<int> order{a.initial()};
  std::set<int> seen{a.initial()};
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order.size() > budget) throw BudgetExceeded("automaton dump exceeded " + std::to_string(budget) + " states");
    const int q = order[i];
    out << "state " << q << " color " << a.color(q) << " " << a.state_name(q) << "\n";
    for (const auto& l : letters) {
      PosBool d = a.delta(q, l);
      out << "  [";
      for (std::size_t c = 0; c < l.size(); ++c) out << (c ? "," : "") << l[c];
      out << "] " << d.to_string() << "\n";
      d.map_leaves([&](int leaf) {
        if (seen.insert(leaf).second) order.push_back(leaf);
        return PosBool::leaf(leaf);
      });
    }
  }
  return out.str();
}

int run_dump_automaton(const SystemOptions& sys, const std::string& formula_text, const std::string& stage,
                       std::size_t budget) {
  LoadedEnv le = load_env(sys, -1);
  const auto systems = le.env.names();
  FormulaPtr f = to_nnf(parse_formula(formula_text, &systems));
  auto prefix = split_prefix(f);
  if (!prefix) throw std::runtime_error("dump-automaton needs a quantifier prefix followed by an LTL body");
  std::vector<std::string> vars;
  Alphabet alphabet;
  for (const auto& q : prefix->quants) {
    vars.push_back(q.var);
    alphabet.components.push_back(le.env.resolve(q.system));
  }
  AutPtr a = ltl_body_to_apa(prefix->body, vars, alphabet);
  if (stage == "nba" || stage == "dpa") a = to_nondeterministic(a, budget);
  if (stage == "dpa") a = determinize(a, budget);
  else if (stage != "apa" && stage != "nba") throw std::runtime_error("stage must be apa, nba or dpa");
  std::cout << describe_automaton(*a, all_letters(alphabet), budget);
  return kExitHolds;
}

void add_system_options(CLI::App* cmd, SystemOptions& o) {
  cmd->add_option("--system", o.path, "System file (.bw program or game file)")->required();
  cmd->add_option("--system-ref", o.named, "Additional named system NAME=FILE");
  cmd->add_option("--bits", o.bits, "Bit width override for programs");
  cmd->add_flag("--stutter", o.stutter, "Apply the stutter transformation to the main system");
  cmd->add_option("--shift", o.shift, "Bind system 'shifted' to the main system shifted by N steps");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explicit-state model checker for strategic hyperproperties"};
  app.require_subcommand(1);

  SystemOptions sys;
  std::string formula, formula_file, tmpl, engine = "auto", prefix, stage = "dpa", corpus = "corpus", out_dir;
  int lookahead = 1, workers = 1, n = 2, k = 1;
  bool as_json = false, witness = false, counter_check = false;
  std::vector<std::string> agents;
  CheckOptions opts;

  auto* check = app.add_subcommand("check", "Model check a formula or property template");
  add_system_options(check, sys);
  auto* fopt = check->add_option("--formula", formula, "Formula text");
  auto* ffile = check->add_option("--formula-file", formula_file, "Formula file");
  auto* topt = check->add_option("--template", tmpl, "Property template (od, ni, gni, stratni, aproxgni(N), simni, nds, od-async, ni-async)");
  fopt->excludes(ffile)->excludes(topt);
  ffile->excludes(topt);
  check->add_option("--lookahead", lookahead, "Lookahead for aproxgni");
  check->add_option("--engine", engine, "auto, fragment or full");
  check->add_option("--max-automaton-states", opts.automaton_states);
  check->add_option("--max-game-nodes", opts.game_nodes);
  check->add_flag("--witness", witness, "Print the winning strategy or lasso");
  check->add_flag("--json", as_json);

  auto* cost = app.add_subcommand("cost", "Alternation cost of a quantifier prefix");
  auto* popt = cost->add_option("--prefix", prefix, "Prefix letters: E exists, A forall, S strategic, D dual");
  auto* cfopt = cost->add_option("--formula", formula, "Formula whose prefix is measured");
  popt->excludes(cfopt);
  cost->add_option("--agents", agents, "Agent universe for --formula")->delimiter(',');
  cost->add_flag("--json", as_json);

  auto* gen = app.add_subcommand("gen-counter", "Generate the counter game and its specification");
  gen->add_option("--n", n, "Bits of the innermost a-counter")->check(CLI::PositiveNumber);
  gen->add_option("--k", k, "Number of nested counters")->check(CLI::PositiveNumber);
  gen->add_option("--out-dir", out_dir, "Write counter.game and counter.hatl here");
  gen->add_flag("--check", counter_check, "Also model check the specification (expensive)");
  gen->add_option("--max-automaton-states", opts.automaton_states);

  auto* batch = app.add_subcommand("batch-tables", "Reproduce the reference verdict tables");
  batch->add_option("--corpus", corpus, "Corpus directory containing programs/");
  batch->add_option("--workers", workers, "Worker threads; 1 runs the serial reference path");
  batch->add_flag("--json", as_json);

  auto* dgame = app.add_subcommand("dump-game", "Print a system in the game text format");
  add_system_options(dgame, sys);

  auto* daut = app.add_subcommand("dump-automaton", "Print the automaton for a formula body");
  add_system_options(daut, sys);
  daut->add_option("--formula", formula, "Closed formula: prefix plus LTL body")->required();
  daut->add_option("--stage", stage, "apa, nba or dpa");
  daut->add_option("--max-automaton-states", opts.automaton_states);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitError;
  }

  try {
    opts.witness = witness;
    if (check->parsed()) {
      if (formula.empty() && formula_file.empty() && tmpl.empty())
        throw std::runtime_error("check needs --formula, --formula-file or --template");
      return run_check(sys, formula, formula_file, tmpl, lookahead, engine, opts, as_json);
    }
    if (cost->parsed()) {
      if (prefix.empty() && formula.empty()) throw std::runtime_error("cost needs --prefix or --formula");
      return run_cost(prefix, formula, agents, as_json);
    }
    if (gen->parsed()) return run_gen_counter(n, k, out_dir, counter_check, opts.automaton_states);
    if (batch->parsed()) return run_batch(corpus, workers, as_json);
    if (dgame->parsed()) return run_dump_game(sys);
    if (daut->parsed()) return run_dump_automaton(sys, formula, stage, opts.automaton_states);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
