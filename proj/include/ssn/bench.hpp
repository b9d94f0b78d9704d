#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssn/baselines.hpp"
#include "ssn/newton.hpp"
#include "ssn/problems.hpp"

namespace ssn {

enum class SolverKind { assn, ssnp, aslb, fbs, drs };

struct SolverChoice {
  SolverKind kind = SolverKind::assn;
  std::size_t memory = 1;  // aslb only

  /// "assn", "ssnp", "aslb(2)", "fbs", "drs"
  std::string name() const;
};

/// Accepts assn, ssnp, fbs, drs and aslb, aslb2, aslb(2), aslb-2.
SolverChoice parse_solver(const std::string& s);

enum class StopRule {
  residual,   // ||F|| <= eps
  objective,  // relative objective gap of ASSN at ||F|| <= eps (lasso only)
};

const char* to_string(StopRule r);
StopRule parse_stop_rule(const std::string& s);

struct RunConfig {
  InstanceSpec instance;
  std::vector<SolverChoice> solvers{SolverChoice{}};
  AssnParams params;
  FixedPointParams fixed_point;
  double step = kDefaultStep;  // t of the splitting
  int warm_start = 0;  // first-order steps before a second-order solver
  std::vector<double> tolerances{1e0, 1e-1, 1e-2, 1e-4, 1e-6};
  std::vector<double> dynamic_ranges{20.0};
  int repetitions = 1;  // seeds instance.seed, instance.seed + 1, ...
  StopRule stop = StopRule::residual;
  double reference_epsilon = 1e-12;
  std::string output_dir = ".";
  int workers = 0;  // 0: hardware concurrency, capped by SSN_WORKERS

  void validate() const;
  /// Everything that affects results; excludes output_dir and workers.
  std::string canonical_json() const;
  /// FNV-1a of canonical_json(), 16 hex digits.
  std::string hash() const;
};

/// One (solver, instance, tolerance) cell entry.
struct RunRecord {
  std::string config_hash;
  std::string solver;
  std::string problem;
  Index n = 0, m = 0, k = 0;
  double d_db = 0.0;
  double mu = 0.0;
  double epsilon = 0.0;
  int rep = 0;
  std::uint64_t seed = 0;
  int iters = 0;
  int newton_steps = 0;
  int proj_steps = 0;
  int unsuccessful = 0;
  std::uint64_t n_a = 0;
  double time_s = 0.0;
  double final_res = 0.0;
  double rerr = 0.0;
  bool converged = false;
  std::string rerr_reference;  // "oracle", "reference" or "xbar"
  std::string error;
};

/// One solver run on one instance, with the records cut out of it at each
/// tolerance (first iterate that meets it).
struct RunResult {
  std::string solver;
  double d_db = 0.0;
  int rep = 0;
  std::uint64_t seed = 0;
  std::vector<double> residual_trace;
  std::vector<std::uint64_t> n_a_trace;
  std::vector<RunRecord> records;  // one per tolerance, in config order
  std::vector<std::string> warnings;
};

/// Reference point for rerr and the objective rule.
struct Reference {
  Vector x;
  double objective = 0.0;
  std::string kind;
  std::vector<double> newt_objective;  // f at ASSN's first ||F|| <= eps_i
};

Reference make_reference(const ProblemInstance& inst, const RunConfig& cfg);

/// Runs one solver on `inst` down to the smallest tolerance.
RunResult run_solver(const ProblemInstance& inst, const SolverChoice& solver, const RunConfig& cfg,
                     const Reference& ref, int rep);

struct BenchResult {
  std::vector<RunResult> runs;  // ordered by (d, rep, solver)
  /// Flattened records, same order, tolerance innermost.
  std::vector<RunRecord> records() const;
};

/// Every (d, rep, solver) run; repetitions go to parallel workers.
BenchResult run_bench(const RunConfig& cfg);

int effective_workers(int requested);

std::string csv_header();
std::string csv_row(const RunRecord& r);

/// Writes runs.csv, records.json, one table_<problem>_d<d>.csv per dynamic
/// range (mean time and N_A per solver and tolerance) and summary.json.
void write_bench_outputs(const RunConfig& cfg, const BenchResult& result);

/// Mean over repetitions of one table cell.
struct CellSummary {
  std::string solver;
  double d_db = 0.0;
  double epsilon = 0.0;
  int count = 0;
  int failures = 0;  // not converged or errored
  double mean_time_s = 0.0;
  double mean_n_a = 0.0;
  double mean_rerr = 0.0;
};

std::vector<CellSummary> summarize(const RunConfig& cfg, const std::vector<RunRecord>& records);

/// Residual-vs-N_A and residual-vs-iteration series: columns iteration, n_a,
/// residual; iterations + 1 rows.
std::string trace_csv(const std::vector<double>& residual, const std::vector<std::uint64_t>& n_a);

std::string records_to_json(const RunConfig& cfg, const BenchResult& result);
/// Reads back what records_to_json wrote (runs with traces and records).
BenchResult records_from_json(const std::string& text);

}  // namespace ssn
