#include "ssn/newton.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "ssn/cg.hpp"
#include "ssn/kernels.hpp"

namespace ssn {

void AssnParams::validate() const {
  require(tau > 0 && tau < 1, "AssnParams: tau must lie in (0, 1)");
  require(nu > 0 && nu < 1, "AssnParams: nu must lie in (0, 1)");
  require(eta1 > 0 && eta1 <= eta2 && eta2 < 1, "AssnParams: need 0 < eta1 <= eta2 < 1");
  require(gamma1 > 1 && gamma1 <= gamma2, "AssnParams: need 1 < gamma1 <= gamma2");
  require(lambda_min > 0, "AssnParams: lambda_min must be positive");
  require(lambda0 >= lambda_min, "AssnParams: lambda0 must be >= lambda_min");
  require(epsilon >= 0, "AssnParams: epsilon must be nonnegative");
  require(max_iters >= 0, "AssnParams: max_iters must be nonnegative");
  require(cg_max_iters >= 1, "AssnParams: cg_max_iters must be positive");
}

const char* to_string(StepType s) {
  switch (s) {
    case StepType::newton:
      return "newton";
    case StepType::projection:
      return "projection";
    case StepType::unsuccessful:
      return "unsuccessful";
    case StepType::fixed_point:
      return "fixed_point";
  }
  return "?";
}

DirectionResult regularized_newton_direction(const std::function<Vector(const Vector&)>& jacobian,
                                             const Vector& F, double lambda, double tau,
                                             int cg_max_iters) {
  const double fnorm = kernels::norm(view(F));
  require(fnorm > 0, "regularized_newton_direction: F must be nonzero");
  const double mu = lambda * fnorm;
  auto apply = [&](const Vector& v) -> Vector {
    Vector out = jacobian(v);
    kernels::axpy(mu, view(v), view(out));
    return out;
  };
  auto accept = [&](const Vector& d, double rnorm) {
    const double dn = kernels::norm(view(d));
    return dn > 0 && rnorm <= tau * std::min(1.0, mu * dn);
  };
  CgResult cg = conjugate_gradient(apply, -F, accept, cg_max_iters);
  DirectionResult out;
  out.r = apply(cg.x) + F;
  out.d = std::move(cg.x);
  out.cg_iterations = cg.iterations;
  out.budget_exhausted = !cg.satisfied;
  return out;
}

double step_ratio(const Vector& F_u, const Vector& d) {
  const double dd = kernels::squared_norm(view(d));
  require(dd > 0, "step_ratio: zero direction");
  return -kernels::dot(view(F_u), view(d)) / dd;
}

Vector projection_step(const Vector& z, const Vector& u, const Vector& F_u) {
  const double ff = kernels::squared_norm(view(F_u));
  if (ff == 0.0) return u;
  const Vector diff = z - u;
  Vector v = z;
  kernels::axpy(-kernels::dot(view(F_u), view(diff)) / ff, view(F_u), view(v));
  return v;
}

double update_lambda(double lambda, double rho, const AssnParams& params) {
  if (rho >= params.eta2) {
    // any point of (lambda_min, lambda) would do; keep it deterministic
    return std::max(params.lambda_min * (1.0 + 1e-6), lambda / params.gamma1);
  }
  if (rho >= params.eta1) return lambda;
  return params.gamma2 * lambda;
}

namespace {

bool finite(const Vector& v) { return v.allFinite(); }

class NewtonSource final : public DirectionSource {
 public:
  NewtonSource(const ResidualMap& F, const AssnParams& p) : F_(F), p_(p) {}

  DirectionResult direction(const SolverState& st, double mu) override {
    NewtonDirection nd = F_.regularized_direction(st.eval, mu, p_.tau, p_.cg_max_iters);
    DirectionResult out;
    out.d = std::move(nd.d);
    out.cg_iterations = nd.inner_iterations;
    out.budget_exhausted = !nd.satisfied;
    return out;
  }

 private:
  const ResidualMap& F_;
  const AssnParams& p_;
};

}  // namespace

SolveReport solve_adaptive(const ResidualMap& F, const Vector& z0, const AssnParams& params,
                           DirectionSource& source, bool projection_only,
                           const SolveOptions& options) {
  params.validate();
  require(z0.size() == F.dim(), "solve: z0 has wrong dimension");
  require(finite(z0), "solve: z0 must be finite");

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const std::uint64_t base = F.op().count();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  SolverState st;
  st.z = z0;
  st.eval = F.evaluate(st.z);
  if (!finite(st.eval.value)) throw DivergedError("solve: F(z0) is not finite");
  st.lambda = params.lambda0;
  st.ubar = z0;
  st.ubar_residual = st.eval.norm;

  SolveReport rep;
  rep.residual_trace.push_back(st.eval.norm);
  rep.n_a_trace.push_back(F.op().count() - base);
  rep.objective_trace.push_back(st.eval.objective);

  auto reached = [&] {
    return st.eval.norm <= params.epsilon || (options.stop && options.stop(st.eval));
  };
  bool zero_direction = false;

  while (!reached() && st.k < params.max_iters) {
    const double mu = st.lambda * st.eval.norm;
    DirectionResult dir = source.direction(st, mu);

    IterationRecord rec;
    rec.inner_iterations = dir.cg_iterations;
    StepType step = StepType::unsuccessful;
    double rho = -std::numeric_limits<double>::infinity();
    double residual_u = std::numeric_limits<double>::quiet_NaN();
    const double lambda_before = st.lambda;
    const double ubar_before = st.ubar_residual;
    Vector z_before;
    if (options.observer) z_before = st.z;
    Vector u;

    if (!dir.budget_exhausted) {
      if (kernels::squared_norm(view(dir.d)) == 0.0) {
        zero_direction = true;
        break;
      }
      u = st.z + dir.d;
      if (!finite(u)) throw DivergedError("solve: trial point is not finite");
      Evaluation Fu = F.evaluate(u);
      if (!finite(Fu.value)) throw DivergedError("solve: F(u) is not finite");
      residual_u = Fu.norm;
      rho = step_ratio(Fu.value, dir.d);
      if (rho >= params.eta1) {
        const bool newton_ok = !projection_only && Fu.norm <= params.nu * st.ubar_residual;
        source.record(dir.d, st.eval.value, Fu.value);
        if (newton_ok) {
          step = StepType::newton;
          st.z = u;
          st.ubar = u;
          st.ubar_residual = Fu.norm;
          st.eval = std::move(Fu);
        } else {
          step = StepType::projection;
          if (Fu.norm == 0.0) {
            st.z = u;
            st.eval = std::move(Fu);
          } else {
            st.z = projection_step(st.z, u, Fu.value);
            if (!finite(st.z)) throw DivergedError("solve: projected point is not finite");
            st.eval = F.evaluate(st.z);
            if (!finite(st.eval.value)) throw DivergedError("solve: F(v) is not finite");
          }
        }
      }
    }

    st.lambda = update_lambda(st.lambda, rho, params);
    ++st.k;
    switch (step) {
      case StepType::newton:
        ++rep.newton_steps;
        break;
      case StepType::projection:
        ++rep.projection_steps;
        break;
      case StepType::unsuccessful:
        ++rep.unsuccessful_steps;
        break;
      case StepType::fixed_point:
        break;
    }
    rec.step = step;
    rec.residual = st.eval.norm;
    rec.rho = rho;
    rec.lambda = st.lambda;
    rec.n_a = F.op().count() - base;
    rec.time_s = elapsed();
    st.history.push_back(rec);
    rep.residual_trace.push_back(st.eval.norm);
    rep.n_a_trace.push_back(rec.n_a);
    rep.objective_trace.push_back(st.eval.objective);

    if (options.observer) {
      StepEvent ev;
      ev.k = st.k - 1;
      ev.step = step;
      ev.z_before = &z_before;
      ev.z_after = &st.z;
      ev.u = u.size() ? &u : nullptr;
      ev.rho = rho;
      ev.lambda_before = lambda_before;
      ev.lambda_after = st.lambda;
      ev.residual_u = residual_u;
      ev.residual_after = st.eval.norm;
      ev.objective_after = st.eval.objective;
      ev.ubar_residual_before = ubar_before;
      options.observer(ev);
    }
  }

  rep.converged = zero_direction || reached();
  rep.iterations = st.k;
  rep.residual = st.eval.norm;
  rep.n_a = F.op().count() - base;
  rep.time_s = elapsed();
  rep.solution = F.primal(st.z);
  rep.z = std::move(st.z);
  rep.history = std::move(st.history);

  if (rep.converged && !projection_only) {
    // Near a BD-regular solution only Newton steps should be taken.
    const double tail = 10.0 * rep.residual;
    for (std::size_t k = 0; k < rep.history.size(); ++k) {
      if (rep.history[k].step == StepType::projection && rep.residual_trace[k] <= tail) {
        rep.warnings.push_back("projection step at iteration " + std::to_string(k) +
                               " inside the final residual decade");
        break;
      }
    }
  }
  return rep;
}

SolveReport assn_solve(const ResidualMap& F, const Vector& z0, const AssnParams& params,
                       const SolveOptions& options) {
  NewtonSource source(F, params);
  return solve_adaptive(F, z0, params, source, false, options);
}

SolveReport ssnp_solve(const ResidualMap& F, const Vector& z0, const AssnParams& params,
                       const SolveOptions& options) {
  NewtonSource source(F, params);
  return solve_adaptive(F, z0, params, source, true, options);
}

}  // namespace ssn
