#include "ssn/baselines.hpp"

#include <chrono>

namespace ssn {

void FixedPointParams::validate() const {
  require(epsilon >= 0, "FixedPointParams: epsilon must be nonnegative");
  require(max_iters >= 0, "FixedPointParams: max_iters must be nonnegative");
}

SolveReport fixed_point_iterate(const ResidualMap& F, const Vector& z0,
                                const FixedPointParams& params, const SolveOptions& options) {
  params.validate();
  require(z0.size() == F.dim(), "fixed_point_iterate: z0 has wrong dimension");
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const std::uint64_t base = F.op().count();

  SolveReport rep;
  Vector z = z0;
  Evaluation e = F.evaluate(z);
  rep.residual_trace.push_back(e.norm);
  rep.n_a_trace.push_back(F.op().count() - base);
  rep.objective_trace.push_back(e.objective);
  auto reached = [&] { return e.norm <= params.epsilon || (options.stop && options.stop(e)); };

  int k = 0;
  while (!reached() && k < params.max_iters) {
    Vector before;
    if (options.observer) before = z;
    z -= e.value;
    e = F.evaluate(z);
    if (!e.value.allFinite()) throw DivergedError("fixed_point_iterate: non-finite residual");
    ++k;
    IterationRecord rec;
    rec.step = StepType::fixed_point;
    rec.residual = e.norm;
    rec.n_a = F.op().count() - base;
    rec.time_s = std::chrono::duration<double>(clock::now() - start).count();
    rep.history.push_back(rec);
    rep.residual_trace.push_back(e.norm);
    rep.n_a_trace.push_back(rec.n_a);
    rep.objective_trace.push_back(e.objective);
    if (options.observer) {
      StepEvent ev;
      ev.k = k - 1;
      ev.step = StepType::fixed_point;
      ev.z_before = &before;
      ev.z_after = &z;
      ev.residual_after = e.norm;
      ev.objective_after = e.objective;
      options.observer(ev);
    }
  }
  rep.converged = reached();
  rep.iterations = k;
  rep.residual = e.norm;
  rep.n_a = F.op().count() - base;
  rep.time_s = std::chrono::duration<double>(clock::now() - start).count();
  rep.solution = F.primal(z);
  rep.z = std::move(z);
  return rep;
}

SolveReport fbs_iterate(const FbsResidual& F, const Vector& x0, const FixedPointParams& params,
                        const SolveOptions& options) {
  return fixed_point_iterate(F, x0, params, options);
}

SolveReport drs_iterate(const DrsResidual& F, const Vector& z0, const FixedPointParams& params,
                        const SolveOptions& options) {
  return fixed_point_iterate(F, z0, params, options);
}

SolveReport warm_started(const ResidualMap& F, const Vector& z0, int first_order_steps,
                         const std::function<SolveReport(const Vector&)>& second_order,
                         const SolveOptions& options) {
  require(first_order_steps >= 0, "warm_started: negative step count");
  if (first_order_steps == 0) return second_order(z0);
  FixedPointParams fp;
  fp.epsilon = 0.0;
  fp.max_iters = first_order_steps;
  SolveReport first = fixed_point_iterate(F, z0, fp, options);
  SolveReport second = second_order(first.z);

  SolveReport merged = std::move(second);
  const std::uint64_t na0 = first.n_a;
  const double t0 = first.time_s;
  for (auto& rec : merged.history) {
    rec.n_a += na0;
    rec.time_s += t0;
  }
  for (auto& na : merged.n_a_trace) na += na0;
  // The second phase starts where the first ended; drop its duplicate head.
  std::vector<double> res = first.residual_trace;
  res.insert(res.end(), merged.residual_trace.begin() + 1, merged.residual_trace.end());
  std::vector<std::uint64_t> nas = first.n_a_trace;
  nas.insert(nas.end(), merged.n_a_trace.begin() + 1, merged.n_a_trace.end());
  std::vector<double> objs = first.objective_trace;
  objs.insert(objs.end(), merged.objective_trace.begin() + 1, merged.objective_trace.end());
  std::vector<IterationRecord> hist = first.history;
  hist.insert(hist.end(), merged.history.begin(), merged.history.end());
  merged.residual_trace = std::move(res);
  merged.n_a_trace = std::move(nas);
  merged.objective_trace = std::move(objs);
  merged.history = std::move(hist);
  merged.iterations += first.iterations;
  merged.n_a += na0;
  merged.time_s += t0;
  return merged;
}

}  // namespace ssn
