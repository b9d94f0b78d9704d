#include "ssn/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ssn/instance_io.hpp"
#include "ssn/kernels.hpp"
#include "ssn/lbfgs.hpp"

namespace ssn {

using nlohmann::json;

std::string SolverChoice::name() const {
  switch (kind) {
    case SolverKind::assn:
      return "assn";
    case SolverKind::ssnp:
      return "ssnp";
    case SolverKind::aslb:
      return "aslb(" + std::to_string(memory) + ")";
    case SolverKind::fbs:
      return "fbs";
    case SolverKind::drs:
      return "drs";
  }
  return "?";
}

SolverChoice parse_solver(const std::string& raw) {
  std::string s;
  for (char c : raw) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "assn") return {SolverKind::assn, 1};
  if (s == "ssnp") return {SolverKind::ssnp, 1};
  if (s == "fbs") return {SolverKind::fbs, 1};
  if (s == "drs") return {SolverKind::drs, 1};
  if (s.rfind("aslb", 0) == 0) {
    std::string rest = s.substr(4);
    if (rest.empty()) return {SolverKind::aslb, 1};
    if (rest.front() == '(' && rest.back() == ')') rest = rest.substr(1, rest.size() - 2);
    else if (rest.front() == '-' || rest.front() == ':') rest = rest.substr(1);
    if (!rest.empty() && std::all_of(rest.begin(), rest.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      const unsigned long mem = std::stoul(rest);
      if (mem >= 1 && mem <= 64) return {SolverKind::aslb, static_cast<std::size_t>(mem)};
    }
  }
  throw ContractError("unknown solver '" + raw + "'");
}

const char* to_string(StopRule r) { return r == StopRule::residual ? "residual" : "objective"; }

StopRule parse_stop_rule(const std::string& s) {
  if (s == "residual") return StopRule::residual;
  if (s == "objective") return StopRule::objective;
  throw ContractError("unknown stop rule '" + s + "'");
}

void RunConfig::validate() const {
  instance.validate();
  params.validate();
  fixed_point.validate();
  require(!solvers.empty(), "RunConfig: no solvers");
  require(step > 0 && step <= 2, "RunConfig: step t must lie in (0, 2]");
  require(warm_start >= 0, "RunConfig: warm_start must be nonnegative");
  require(!tolerances.empty(), "RunConfig: no tolerances");
  for (double e : tolerances) require(e > 0 && std::isfinite(e), "RunConfig: tolerances must be positive");
  require(!dynamic_ranges.empty(), "RunConfig: no dynamic ranges");
  for (double d : dynamic_ranges) require(d >= 0, "RunConfig: dynamic ranges must be nonnegative");
  require(repetitions >= 1, "RunConfig: repetitions must be positive");
  require(reference_epsilon > 0, "RunConfig: reference_epsilon must be positive");
  require(workers >= 0, "RunConfig: workers must be nonnegative");
  for (const auto& s : solvers) {
    if (s.kind == SolverKind::fbs)
      require(instance.kind == ProblemKind::lasso, "RunConfig: fbs needs a lasso problem");
    if (s.kind == SolverKind::drs)
      require(instance.kind == ProblemKind::bp, "RunConfig: drs needs a bp problem");
  }
}

std::string RunConfig::canonical_json() const {
  json j;
  j["problem"] = to_string(instance.kind);
  j["operator"] = to_string(instance.op);
  j["n"] = instance.n;
  j["m"] = instance.m;
  j["k"] = instance.k;
  j["mu"] = instance.mu;
  j["mu_scale"] = instance.mu_scale;
  j["sigma"] = instance.sigma;
  j["seed"] = instance.seed;
  std::vector<std::string> names;
  for (const auto& s : solvers) names.push_back(s.name());
  j["solvers"] = names;
  j["tau"] = params.tau;
  j["nu"] = params.nu;
  j["eta1"] = params.eta1;
  j["eta2"] = params.eta2;
  j["gamma1"] = params.gamma1;
  j["gamma2"] = params.gamma2;
  j["lambda_min"] = params.lambda_min;
  j["lambda0"] = params.lambda0;
  j["max_iters"] = params.max_iters;
  j["cg_max_iters"] = params.cg_max_iters;
  j["fp_max_iters"] = fixed_point.max_iters;
  j["step"] = step;
  j["warm_start"] = warm_start;
  j["tolerances"] = tolerances;
  j["dynamic_ranges"] = dynamic_ranges;
  j["repetitions"] = repetitions;
  j["stop"] = to_string(stop);
  j["reference_epsilon"] = reference_epsilon;
  return j.dump();  // object keys are sorted
}

std::string RunConfig::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical_json()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------

namespace {

bool oracle_eligible(const ProblemInstance& inst) {
  return inst.spec.op == OperatorKind::dense && inst.spec.n <= kOracleMaxDim && inst.spec.m < inst.spec.n;
}

double rel_gap(double f, double fstar) { return uniform_stop_threshold(f, fstar); }

}  // namespace

Reference make_reference(const ProblemInstance& inst, const RunConfig& cfg) {
  Reference ref;
  const bool oracle = oracle_eligible(inst);
  const bool need_run = !oracle || cfg.stop == StopRule::objective;
  SolveReport run;
  if (need_run) {
    auto F = make_residual(inst, cfg.step);
    AssnParams p = cfg.params;
    p.epsilon = cfg.reference_epsilon;
    run = assn_solve(*F, Vector::Zero(F->dim()), p);
  }
  if (oracle) {
    const OracleSolution o = inst.spec.kind == ProblemKind::lasso
                                 ? oracle_lasso(inst.dense, inst.b, inst.mu)
                                 : oracle_bp(inst.dense, inst.b);
    ref.x = o.x;
    ref.objective = o.objective;
    ref.kind = "oracle";
  } else {
    ref.x = run.solution;
    ref.objective = run.objective_trace.empty() ? 0.0 : run.objective_trace.back();
    ref.kind = "reference";
  }
  if (need_run) {
    for (double eps : cfg.tolerances) {
      double f = run.objective_trace.back();
      for (std::size_t i = 0; i < run.residual_trace.size(); ++i) {
        if (run.residual_trace[i] <= eps) {
          f = run.objective_trace[i];
          break;
        }
      }
      ref.newt_objective.push_back(f);
    }
  }
  return ref;
}

namespace {

/// Marks, for every tolerance, the first iterate that meets it.
struct CrossingTracker {
  std::vector<double> eps;
  std::vector<double> thresholds;  // objective rule; empty for the residual rule
  double fstar = 0.0;
  const ResidualMap* F = nullptr;
  const Vector* xref = nullptr;
  std::vector<long> index;
  std::vector<double> rerr;
  int pending = 0;

  void init(std::size_t n) {
    index.assign(n, -1);
    rerr.assign(n, std::numeric_limits<double>::quiet_NaN());
    pending = static_cast<int>(n);
  }

  bool met(std::size_t i, double residual, double objective) const {
    if (residual <= eps[i]) return true;
    return !thresholds.empty() && std::isfinite(objective) && rel_gap(objective, fstar) <= thresholds[i];
  }

  void update(long k, double residual, double objective, const Vector& z) {
    if (pending == 0) return;
    bool any = false;
    for (std::size_t i = 0; i < eps.size(); ++i)
      if (index[i] < 0 && met(i, residual, objective)) any = true;
    if (!any) return;
    const double r = relative_error(F->primal(z), *xref);
    for (std::size_t i = 0; i < eps.size(); ++i) {
      if (index[i] < 0 && met(i, residual, objective)) {
        index[i] = k;
        rerr[i] = r;
        --pending;
      }
    }
  }

  bool done() const { return pending == 0; }
};

}  // namespace

RunResult run_solver(const ProblemInstance& inst, const SolverChoice& solver, const RunConfig& cfg,
                     const Reference& ref, int rep) {
  RunResult out;
  out.solver = solver.name();
  out.d_db = inst.spec.d_db;
  out.rep = rep;
  out.seed = inst.spec.seed;

  auto F = make_residual(inst, cfg.step);
  const Vector z0 = Vector::Zero(F->dim());

  CrossingTracker tr;
  tr.eps = cfg.tolerances;
  tr.F = F.get();
  tr.xref = &ref.x;
  tr.fstar = ref.objective;
  if (cfg.stop == StopRule::objective && inst.spec.kind == ProblemKind::lasso) {
    for (double f : ref.newt_objective) tr.thresholds.push_back(rel_gap(f, ref.objective));
  }
  tr.init(cfg.tolerances.size());

  const double eps_min = *std::min_element(cfg.tolerances.begin(), cfg.tolerances.end());
  AssnParams p = cfg.params;
  p.epsilon = eps_min;
  FixedPointParams fp = cfg.fixed_point;
  fp.epsilon = eps_min;

  long offset = 0;
  long iter_count = 0;
  bool seen_start = false;
  SolveOptions opts;
  opts.stop = [&](const Evaluation& e) {
    if (!seen_start) {
      seen_start = true;
      tr.update(0, e.norm, e.objective, z0);
    }
    return tr.done();
  };
  opts.observer = [&](const StepEvent& ev) {
    iter_count = offset + ev.k + 1;
    tr.update(iter_count, ev.residual_after, ev.objective_after, *ev.z_after);
  };
  SolveOptions second = opts;
  second.stop = [&](const Evaluation&) { return tr.done(); };

  auto second_order = [&](const Vector& start, const SolveOptions& o) -> SolveReport {
    switch (solver.kind) {
      case SolverKind::assn:
        return assn_solve(*F, start, p, o);
      case SolverKind::ssnp:
        return ssnp_solve(*F, start, p, o);
      case SolverKind::aslb:
        return aslb_solve(*F, start, solver.memory, p, o);
      default:
        return fixed_point_iterate(*F, start, fp, o);
    }
  };

  RunRecord base;
  base.config_hash = cfg.hash();
  base.solver = out.solver;
  base.problem = to_string(inst.spec.kind);
  base.n = inst.spec.n;
  base.m = inst.spec.m;
  base.k = inst.spec.k;
  base.d_db = inst.spec.d_db;
  base.mu = inst.mu;
  base.rep = rep;
  base.seed = inst.spec.seed;
  base.rerr_reference = ref.kind;

  SolveReport rep_;
  try {
    const bool first_order = solver.kind == SolverKind::fbs || solver.kind == SolverKind::drs;
    if (cfg.warm_start > 0 && !first_order) {
      SolveOptions first = opts;
      rep_ = warm_started(*F, z0, cfg.warm_start,
                          [&](const Vector& start) {
                            offset = iter_count;
                            return second_order(start, second);
                          },
                          first);
    } else {
      rep_ = second_order(z0, opts);
    }
  } catch (const DivergedError& e) {
    for (double eps : cfg.tolerances) {
      RunRecord r = base;
      r.epsilon = eps;
      r.error = e.what();
      r.final_res = std::numeric_limits<double>::quiet_NaN();
      r.rerr = std::numeric_limits<double>::quiet_NaN();
      out.records.push_back(r);
    }
    return out;
  }

  out.residual_trace = rep_.residual_trace;
  out.n_a_trace = rep_.n_a_trace;
  out.warnings = rep_.warnings;
  const long last = static_cast<long>(rep_.residual_trace.size()) - 1;
  for (std::size_t i = 0; i < cfg.tolerances.size(); ++i) {
    RunRecord r = base;
    r.epsilon = cfg.tolerances[i];
    const bool hit = tr.index[i] >= 0;
    const long idx = hit ? tr.index[i] : last;
    r.converged = hit;
    r.iters = static_cast<int>(idx);
    r.n_a = rep_.n_a_trace[static_cast<std::size_t>(idx)];
    r.final_res = rep_.residual_trace[static_cast<std::size_t>(idx)];
    r.time_s = idx > 0 ? rep_.history[static_cast<std::size_t>(idx - 1)].time_s : 0.0;
    for (long k = 0; k < idx; ++k) {
      switch (rep_.history[static_cast<std::size_t>(k)].step) {
        case StepType::newton:
          ++r.newton_steps;
          break;
        case StepType::projection:
          ++r.proj_steps;
          break;
        case StepType::unsuccessful:
          ++r.unsuccessful;
          break;
        case StepType::fixed_point:
          break;
      }
    }
    r.rerr = hit ? tr.rerr[i] : relative_error(rep_.solution, ref.x);
    out.records.push_back(r);
  }
  return out;
}

std::vector<RunRecord> BenchResult::records() const {
  std::vector<RunRecord> all;
  for (const auto& run : runs) all.insert(all.end(), run.records.begin(), run.records.end());
  return all;
}

int effective_workers(int requested) {
  int w = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("SSN_WORKERS")) {
    const int c = std::atoi(cap);
    if (c > 0) w = std::min(w, c);
  }
  return std::max(w, 1);
}

BenchResult run_bench(const RunConfig& cfg) {
  cfg.validate();
  struct Task {
    double d;
    int rep;
  };
  std::vector<Task> tasks;
  for (double d : cfg.dynamic_ranges)
    for (int r = 0; r < cfg.repetitions; ++r) tasks.push_back({d, r});

  std::vector<std::vector<RunResult>> slots(tasks.size());
  std::vector<std::string> errors(tasks.size());

  auto work = [&](std::size_t i) {
    InstanceSpec spec = cfg.instance;
    spec.d_db = tasks[i].d;
    spec.seed = cfg.instance.seed + static_cast<std::uint64_t>(tasks[i].rep);
    const ProblemInstance inst = generate(spec);
    const Reference ref = make_reference(inst, cfg);
    for (const auto& s : cfg.solvers) slots[i].push_back(run_solver(inst, s, cfg, ref, tasks[i].rep));
  };

  const int nw = std::min<int>(effective_workers(cfg.workers), static_cast<int>(tasks.size()));
  if (nw <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) {
      pool.emplace_back([&] {
        kernels::set_threads(1);
        for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
          try {
            work(i);
          } catch (const std::exception& e) {
            errors[i] = e.what();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (!e.empty()) throw std::runtime_error("bench worker failed: " + e);
  }

  BenchResult res;
  for (auto& s : slots)
    for (auto& r : s) res.runs.push_back(std::move(r));
  return res;
}

// ---------------------------------------------------------------------------

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + p.string() + "' failed");
}

json record_json(const RunRecord& r) {
  json j;
  j["config_hash"] = r.config_hash;
  j["solver"] = r.solver;
  j["problem"] = r.problem;
  j["n"] = r.n;
  j["m"] = r.m;
  j["k"] = r.k;
  j["d_db"] = r.d_db;
  j["mu"] = r.mu;
  j["epsilon"] = r.epsilon;
  j["rep"] = r.rep;
  j["seed"] = r.seed;
  j["iters"] = r.iters;
  j["newton_steps"] = r.newton_steps;
  j["proj_steps"] = r.proj_steps;
  j["unsuccessful"] = r.unsuccessful;
  j["N_A"] = r.n_a;
  j["time_s"] = r.time_s;
  // NaN has no JSON spelling
  j["final_res"] = std::isfinite(r.final_res) ? json(r.final_res) : json(nullptr);
  j["rerr"] = std::isfinite(r.rerr) ? json(r.rerr) : json(nullptr);
  j["converged"] = r.converged;
  j["rerr_reference"] = r.rerr_reference;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

double num_or_nan(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

RunRecord record_from(const json& j) {
  RunRecord r;
  r.config_hash = j.at("config_hash").get<std::string>();
  r.solver = j.at("solver").get<std::string>();
  r.problem = j.at("problem").get<std::string>();
  r.n = j.at("n").get<Index>();
  r.m = j.at("m").get<Index>();
  r.k = j.at("k").get<Index>();
  r.d_db = j.at("d_db").get<double>();
  r.mu = j.at("mu").get<double>();
  r.epsilon = j.at("epsilon").get<double>();
  r.rep = j.at("rep").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.iters = j.at("iters").get<int>();
  r.newton_steps = j.at("newton_steps").get<int>();
  r.proj_steps = j.at("proj_steps").get<int>();
  r.unsuccessful = j.at("unsuccessful").get<int>();
  r.n_a = j.at("N_A").get<std::uint64_t>();
  r.time_s = j.at("time_s").get<double>();
  r.final_res = num_or_nan(j.at("final_res"));
  r.rerr = num_or_nan(j.at("rerr"));
  r.converged = j.at("converged").get<bool>();
  r.rerr_reference = j.at("rerr_reference").get<std::string>();
  r.error = j.value("error", "");
  return r;
}

std::string eps_label(double e) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0e", e);
  return buf;
}

}  // namespace

std::string csv_header() {
  return "solver,problem,n,m,k,d_db,mu,epsilon,rep,seed,iters,newton_steps,proj_steps,unsuccessful,N_A,time_s,"
         "final_res,rerr";
}

std::string csv_row(const RunRecord& r) {
  std::ostringstream s;
  s << r.solver << ',' << r.problem << ',' << r.n << ',' << r.m << ',' << r.k << ',' << num(r.d_db) << ','
    << num(r.mu) << ',' << num(r.epsilon) << ',' << r.rep << ',' << r.seed << ',' << r.iters << ','
    << r.newton_steps << ',' << r.proj_steps << ',' << r.unsuccessful << ',' << r.n_a << ',' << num(r.time_s)
    << ',' << num(r.final_res) << ',' << num(r.rerr);
  return s.str();
}

std::vector<CellSummary> summarize(const RunConfig& cfg, const std::vector<RunRecord>& records) {
  std::vector<CellSummary> cells;
  for (double d : cfg.dynamic_ranges) {
    for (const auto& s : cfg.solvers) {
      for (double eps : cfg.tolerances) {
        CellSummary c;
        c.solver = s.name();
        c.d_db = d;
        c.epsilon = eps;
        for (const auto& r : records) {
          if (r.solver != c.solver || r.d_db != d || r.epsilon != eps) continue;
          ++c.count;
          if (!r.converged) ++c.failures;
          c.mean_time_s += r.time_s;
          c.mean_n_a += static_cast<double>(r.n_a);
          c.mean_rerr += r.rerr;
        }
        if (c.count > 0) {
          c.mean_time_s /= c.count;
          c.mean_n_a /= c.count;
          c.mean_rerr /= c.count;
        }
        cells.push_back(c);
      }
    }
  }
  return cells;
}

std::string trace_csv(const std::vector<double>& residual, const std::vector<std::uint64_t>& n_a) {
  require(residual.size() == n_a.size(), "trace_csv: series lengths differ");
  std::ostringstream s;
  s << "iteration,n_a,residual\n";
  char buf[32];
  for (std::size_t i = 0; i < residual.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", residual[i]);
    s << i << ',' << n_a[i] << ',' << buf << '\n';
  }
  return s.str();
}

std::string records_to_json(const RunConfig& cfg, const BenchResult& result) {
  json j;
  j["config_hash"] = cfg.hash();
  j["config"] = json::parse(cfg.canonical_json());
  json runs = json::array();
  for (const auto& run : result.runs) {
    json r;
    r["solver"] = run.solver;
    r["d_db"] = run.d_db;
    r["rep"] = run.rep;
    r["seed"] = run.seed;
    r["residual_trace"] = run.residual_trace;
    r["n_a_trace"] = run.n_a_trace;
    r["warnings"] = run.warnings;
    json recs = json::array();
    for (const auto& rec : run.records) recs.push_back(record_json(rec));
    r["records"] = recs;
    runs.push_back(r);
  }
  j["runs"] = runs;
  return j.dump(1);
}

BenchResult records_from_json(const std::string& text) {
  BenchResult res;
  try {
    const json j = json::parse(text);
    for (const auto& r : j.at("runs")) {
      RunResult run;
      run.solver = r.at("solver").get<std::string>();
      run.d_db = r.at("d_db").get<double>();
      run.rep = r.at("rep").get<int>();
      run.seed = r.at("seed").get<std::uint64_t>();
      run.residual_trace = r.at("residual_trace").get<std::vector<double>>();
      run.n_a_trace = r.at("n_a_trace").get<std::vector<std::uint64_t>>();
      run.warnings = r.value("warnings", std::vector<std::string>{});
      for (const auto& rec : r.at("records")) run.records.push_back(record_from(rec));
      res.runs.push_back(std::move(run));
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("records file: ") + e.what());
  }
  return res;
}

void write_bench_outputs(const RunConfig& cfg, const BenchResult& result) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  const auto records = result.records();
  std::ostringstream csv;
  csv << csv_header() << '\n';
  for (const auto& r : records) csv << csv_row(r) << '\n';
  write_file(dir / "runs.csv", csv.str());
  write_file(dir / "records.json", records_to_json(cfg, result) + "\n");

  const auto cells = summarize(cfg, records);
  const std::string problem = to_string(cfg.instance.kind);
  const bool with_rerr = cfg.instance.kind == ProblemKind::bp;
  for (double d : cfg.dynamic_ranges) {
    std::ostringstream t;
    t << "method";
    for (double eps : cfg.tolerances) {
      t << ",time eps=" << eps_label(eps) << ",N_A eps=" << eps_label(eps);
      if (with_rerr) t << ",rerr eps=" << eps_label(eps);
    }
    t << '\n';
    for (const auto& s : cfg.solvers) {
      t << s.name();
      for (const auto& c : cells) {
        if (c.solver != s.name() || c.d_db != d) continue;
        char buf[96];
        std::snprintf(buf, sizeof buf, ",%.3g,%.1f", c.mean_time_s, c.mean_n_a);
        t << buf;
        if (with_rerr) {
          std::snprintf(buf, sizeof buf, ",%.2e", c.mean_rerr);
          t << buf;
        }
      }
      t << '\n';
    }
    char name[64];
    std::snprintf(name, sizeof name, "table_%s_d%g.csv", problem.c_str(), d);
    write_file(dir / name, t.str());
  }

  json sum;
  sum["config_hash"] = cfg.hash();
  sum["config"] = json::parse(cfg.canonical_json());
  json jc = json::array();
  for (const auto& c : cells) {
    jc.push_back({{"solver", c.solver},
                  {"d_db", c.d_db},
                  {"epsilon", c.epsilon},
                  {"count", c.count},
                  {"failures", c.failures},
                  {"mean_time_s", c.mean_time_s},
                  {"mean_N_A", c.mean_n_a},
                  {"mean_rerr", std::isfinite(c.mean_rerr) ? json(c.mean_rerr) : json(nullptr)}});
  }
  sum["cells"] = jc;
  write_file(dir / "summary.json", sum.dump(1) + "\n");
}

}  // namespace ssn
