// ssn: generate instances, run solvers, sweep benchmarks, dump traces.
//
// Exit status: 0 converged / ok, 1 usage, 2 budget exhausted, 3 diverged,
// 4 I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssn/bench.hpp"
#include "ssn/instance_io.hpp"

using namespace ssn;

namespace {

enum Exit { kOk = 0, kUsage = 1, kBudget = 2, kDiverged = 3, kIo = 4 };

struct InstanceFlags {
  std::string problem = "lasso";
  std::string op = "dct";
  bool paper_scale = false;
};

void add_instance_flags(CLI::App* app, InstanceSpec& s, InstanceFlags& f) {
  app->add_option("--problem", f.problem, "lasso or bp")->check(CLI::IsMember({"lasso", "bp"}));
  app->add_option("--operator", f.op, "dct or dense")->check(CLI::IsMember({"dct", "dense"}));
  app->add_option("--n", s.n, "signal length");
  app->add_option("--m", s.m, "number of measurements");
  app->add_option("--k", s.k, "sparsity");
  app->add_option("--d", s.d_db, "dynamic range in dB");
  app->add_option("--mu", s.mu, "lasso weight; <= 0 uses mu-scale * ||A^T b||_inf");
  app->add_option("--mu-scale", s.mu_scale);
  app->add_option("--sigma", s.sigma, "noise level (lasso)");
  app->add_option("--seed", s.seed);
  app->add_flag("--paper-scale", f.paper_scale, "n = 512^2, m = n/8, k = 5553");
}

InstanceSpec resolve(InstanceSpec s, const InstanceFlags& f) {
  s.kind = parse_problem_kind(f.problem);
  s.op = parse_operator_kind(f.op);
  if (f.paper_scale) {
    const InstanceSpec p = paper_scale_spec(s.kind, s.d_db, s.seed);
    s.n = p.n;
    s.m = p.m;
    s.k = p.k;
  }
  return s;
}

void add_param_flags(CLI::App* app, AssnParams& p, FixedPointParams& fp, double& step) {
  app->add_option("--tau", p.tau);
  app->add_option("--nu", p.nu);
  app->add_option("--eta1", p.eta1);
  app->add_option("--eta2", p.eta2);
  app->add_option("--gamma1", p.gamma1);
  app->add_option("--gamma2", p.gamma2);
  app->add_option("--lambda-min", p.lambda_min);
  app->add_option("--lambda0", p.lambda0);
  app->add_option("--max-iters", p.max_iters);
  app->add_option("--cg-max-iters", p.cg_max_iters);
  app->add_option("--fp-max-iters", fp.max_iters, "iteration budget of fbs/drs");
  app->add_option("--t", step, "step size of the splitting");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

int cmd_gen(const InstanceSpec& spec, const std::string& out) {
  const ProblemInstance inst = generate(spec);
  save_instance(inst, out);
  std::printf("wrote %s: %s n=%lld m=%lld k=%lld d=%g mu=%.6g seed=%llu\n", out.c_str(), to_string(spec.kind),
              static_cast<long long>(spec.n), static_cast<long long>(spec.m), static_cast<long long>(spec.k),
              spec.d_db, inst.mu, static_cast<unsigned long long>(spec.seed));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semi-smooth Newton solvers for FBS/DRS residuals"};
  app.require_subcommand(1);
  // key = value file; options of a subcommand go under its [section]
  app.set_config("--config", "", "read options from a config file");

  // gen
  InstanceSpec gen_spec;
  InstanceFlags gen_flags;
  std::string gen_out = "instance.json";
  auto* gen = app.add_subcommand("gen", "generate an instance file");
  add_instance_flags(gen, gen_spec, gen_flags);
  gen->add_option("-o,--out", gen_out, "output file");

  // solve
  InstanceSpec solve_spec;
  InstanceFlags solve_flags;
  RunConfig solve_cfg;
  std::string solve_instance, solve_solver = "assn", solve_trace, solve_record;
  double solve_eps = 1e-6;
  auto* solve = app.add_subcommand("solve", "run one solver on one instance");
  solve->add_option("-i,--instance", solve_instance, "instance file (otherwise generated from flags)");
  add_instance_flags(solve, solve_spec, solve_flags);
  solve->add_option("-s,--solver", solve_solver, "assn, ssnp, aslb(m), fbs, drs");
  solve->add_option("-e,--eps", solve_eps, "tolerance on ||F||");
  solve->add_option("--warm-start", solve_cfg.warm_start, "first-order steps before the solver");
  add_param_flags(solve, solve_cfg.params, solve_cfg.fixed_point, solve_cfg.step);
  solve->add_option("--trace", solve_trace, "write the residual trace CSV here");
  solve->add_option("--record", solve_record, "write the run record JSON here");

  // bench
  InstanceSpec bench_spec;
  InstanceFlags bench_flags;
  RunConfig bench_cfg;
  std::vector<std::string> bench_solvers{"assn", "ssnp", "aslb(1)", "aslb(2)"};
  std::string bench_stop = "residual";
  auto* bench = app.add_subcommand("bench", "tolerance and dynamic-range sweep");
  add_instance_flags(bench, bench_spec, bench_flags);
  add_param_flags(bench, bench_cfg.params, bench_cfg.fixed_point, bench_cfg.step);
  bench->add_option("--solvers", bench_solvers)->delimiter(',');
  bench->add_option("--tolerances", bench_cfg.tolerances)->delimiter(',');
  bench->add_option("--dynamic-ranges", bench_cfg.dynamic_ranges)->delimiter(',');
  bench->add_option("--reps", bench_cfg.repetitions, "repetitions (seeds seed, seed+1, ...)");
  bench->add_option("--stop", bench_stop, "residual or objective")->check(CLI::IsMember({"residual", "objective"}));
  bench->add_option("--reference-eps", bench_cfg.reference_epsilon);
  bench->add_option("--warm-start", bench_cfg.warm_start);
  bench->add_option("--workers", bench_cfg.workers, "0: all cores (SSN_WORKERS caps)");
  bench->add_option("-o,--out", bench_cfg.output_dir, "output directory");

  // trace
  std::string trace_records = "records.json", trace_out = ".";
  auto* trace = app.add_subcommand("trace", "emit residual series from records.json");
  trace->add_option("-r,--records", trace_records);
  trace->add_option("-o,--out", trace_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_gen(resolve(gen_spec, gen_flags), gen_out);

    if (*solve) {
      ProblemInstance inst = solve_instance.empty() ? generate(resolve(solve_spec, solve_flags))
                                                    : load_instance(solve_instance);
      RunConfig& cfg = solve_cfg;
      cfg.instance = inst.spec;
      cfg.solvers = {parse_solver(solve_solver)};
      cfg.tolerances = {solve_eps};
      cfg.dynamic_ranges = {inst.spec.d_db};
      cfg.validate();
      Reference ref;
      if (inst.spec.op == OperatorKind::dense && inst.spec.n <= kOracleMaxDim && inst.spec.m < inst.spec.n) {
        ref = make_reference(inst, cfg);
      } else {
        ref.x = inst.xbar;
        ref.kind = "xbar";
      }
      const RunResult run = run_solver(inst, cfg.solvers[0], cfg, ref, 0);
      const RunRecord& r = run.records[0];
      if (!r.error.empty()) {
        std::fprintf(stderr, "diverged: %s\n", r.error.c_str());
        return kDiverged;
      }
      std::printf("%s\n%s\n", csv_header().c_str(), csv_row(r).c_str());
      for (const auto& w : run.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      if (!solve_trace.empty()) write_text(solve_trace, trace_csv(run.residual_trace, run.n_a_trace));
      if (!solve_record.empty()) {
        BenchResult br;
        br.runs.push_back(run);
        write_text(solve_record, records_to_json(cfg, br) + "\n");
      }
      return r.converged ? kOk : kBudget;
    }

    if (*bench) {
      RunConfig& cfg = bench_cfg;
      cfg.instance = resolve(bench_spec, bench_flags);
      cfg.solvers.clear();
      for (const auto& s : bench_solvers) cfg.solvers.push_back(parse_solver(s));
      cfg.stop = parse_stop_rule(bench_stop);
      cfg.validate();
      const BenchResult res = run_bench(cfg);
      write_bench_outputs(cfg, res);
      int failed = 0;
      for (const auto& c : summarize(cfg, res.records())) {
        failed += c.failures;
        std::printf("%-8s d=%-4g eps=%-7.0e N_A=%9.1f time=%8.3fs rerr=%.2e%s\n", c.solver.c_str(), c.d_db,
                    c.epsilon, c.mean_n_a, c.mean_time_s, c.mean_rerr,
                    c.failures ? " (failures)" : "");
      }
      std::printf("wrote %s/{runs.csv,records.json,summary.json,table_*.csv}\n", cfg.output_dir.c_str());
      return failed ? kBudget : kOk;
    }

    if (*trace) {
      std::ifstream in(trace_records);
      if (!in) throw IoError("cannot open '" + trace_records + "'");
      std::ostringstream ss;
      ss << in.rdbuf();
      const BenchResult res = records_from_json(ss.str());
      std::error_code ec;
      std::filesystem::create_directories(trace_out, ec);
      if (ec) throw IoError("cannot create '" + trace_out + "'");
      for (const auto& run : res.runs) {
        char name[128];
        std::snprintf(name, sizeof name, "trace_%s_d%g_rep%d.csv", run.solver.c_str(), run.d_db, run.rep);
        write_text((std::filesystem::path(trace_out) / name).string(), trace_csv(run.residual_trace, run.n_a_trace));
      }
      std::printf("wrote %zu trace files to %s\n", res.runs.size(), trace_out.c_str());
      return kOk;
    }
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kIo;
  } catch (const ContractError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kUsage;
  } catch (const DivergedError& e) {
    std::fprintf(stderr, "diverged: %s\n", e.what());
    return kDiverged;
  }
  return kUsage;
}
