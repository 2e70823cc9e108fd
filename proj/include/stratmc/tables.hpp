#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stratmc/checker.hpp"
#include "stratmc/program.hpp"

namespace stratmc {

// One expected verdict of the reference result tables.
struct TableCheck {
  std::string table;     // "info-flow" or "async"
  std::string instance;  // e.g. "P3", "Q1/w2"
  std::string program;   // corpus file name under programs/
  int bits = 1;
  std::string property;  // column label: OD, NI, simSec, sGNI, OD_async, NI_async
  bool expected = false;
  bool reconstructed = false;  // expectation concerns a reconstructed program
  int lookahead = 0;           // shift of the witness copy (simSec, sGNI)
};

// The branch choice in P4 precedes its high read by one step, so the sGNI
// witness needs two steps of lookahead; one step refutes it.
inline constexpr int kGniLookahead = 2;

struct TableResult {
  TableCheck check;
  std::optional<bool> holds;  // empty when the check raised an error
  std::string error;
  Stats stats;
  double seconds = 0;

  bool matches() const { return holds && *holds == check.expected; }
};

std::vector<TableCheck> table_checks();

// Runs one check against programs under `corpus_dir/programs`.
TableResult run_table_check(const TableCheck& c, const std::string& corpus_dir, const CheckOptions& opts = {});

// `workers` <= 1 runs the serial reference path; otherwise checks are
// distributed over OpenMP threads. Result order follows table_checks().
std::vector<TableResult> batch_tables(const std::string& corpus_dir, int workers,
                                      const CheckOptions& opts = {});

std::string render_tables(const std::vector<TableResult>& results);

// Role-driven template parameters for a compiled program.
TemplateParams params_for(const GameStructure& g);

Program load_program(const std::string& path);

}  // namespace stratmc
