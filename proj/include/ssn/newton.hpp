#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ssn/residual.hpp"
#include "ssn/types.hpp"

namespace ssn {

/// Parameters of the adaptive regularized semi-smooth Newton method.
struct AssnParams {
  double tau = 0.1;      // inexactness factor, (0, 1)
  double nu = 0.9;       // Newton-step residual contraction, (0, 1)
  double eta1 = 1e-8;     // success threshold on rho
  double eta2 = 0.5;    // very-successful threshold, eta1 <= eta2 < 1
  double gamma1 = 1.5;   // 1 < gamma1 <= gamma2
  double gamma2 = 2.0;
  double lambda_min = 1e-6;
  double lambda0 = 0.1;
  double epsilon = 1e-6;  // stop when ||F(z)|| <= epsilon
  int max_iters = 10000;
  int cg_max_iters = 100;

  /// Throws ContractError when any range above is violated.
  void validate() const;
};

enum class StepType { newton, projection, unsuccessful, fixed_point };

const char* to_string(StepType s);

struct IterationRecord {
  StepType step = StepType::unsuccessful;
  double residual = 0.0;  // ||F(z^{k+1})||
  double rho = 0.0;
  double lambda = 0.0;    // lambda_{k+1}
  std::uint64_t n_a = 0;  // cumulative operator applications
  double time_s = 0.0;    // wall time since the solve started
  int inner_iterations = 0;
};

/// Mutable state of one solve. `ubar` only moves on Newton steps.
struct SolverState {
  Vector z;
  Evaluation eval;  // F at z
  double lambda = 0.0;
  Vector ubar;
  double ubar_residual = 0.0;  // ||F(ubar)||
  int k = 0;
  std::vector<IterationRecord> history;
};

struct SolveReport {
  Vector z;         // final iterate of the residual equation
  Vector solution;  // corresponding point of the original problem
  double residual = 0.0;
  int iterations = 0;
  std::uint64_t n_a = 0;
  int newton_steps = 0;
  int projection_steps = 0;
  int unsuccessful_steps = 0;
  bool converged = false;
  double time_s = 0.0;
  std::vector<double> residual_trace;       // iterations + 1 entries
  std::vector<std::uint64_t> n_a_trace;     // iterations + 1 entries
  std::vector<double> objective_trace;      // Evaluation::objective per iterate
  std::vector<IterationRecord> history;     // iterations entries
  std::vector<std::string> warnings;
};

/// Everything an observer may inspect about one iteration.
struct StepEvent {
  int k = 0;
  StepType step = StepType::unsuccessful;
  const Vector* z_before = nullptr;
  const Vector* z_after = nullptr;
  const Vector* u = nullptr;  // null when the trial point was not formed
  double rho = 0.0;
  double lambda_before = 0.0;
  double lambda_after = 0.0;
  double residual_u = 0.0;
  double residual_after = 0.0;  // ||F(z_after)||
  double objective_after = 0.0;
  double ubar_residual_before = 0.0;
};

struct SolveOptions {
  /// Extra stopping rule checked alongside ||F|| <= epsilon.
  std::function<bool(const Evaluation&)> stop;
  std::function<void(const StepEvent&)> observer;
};

/// Result of the inexact regularized Newton solve.
struct DirectionResult {
  Vector d;
  Vector r;  // (J + mu I) d + F, only filled by regularized_newton_direction
  int cg_iterations = 0;
  bool budget_exhausted = false;
};

/// CG on (J + mu I) d = -F with mu = lambda ||F||, stopped as soon as
/// ||r|| <= tau min(1, lambda ||F|| ||d||). `jacobian` must be symmetric PSD.
DirectionResult regularized_newton_direction(const std::function<Vector(const Vector&)>& jacobian,
                                             const Vector& F, double lambda, double tau,
                                             int cg_max_iters);

/// rho = -<F(u), d> / ||d||^2.
double step_ratio(const Vector& F_u, const Vector& d);

/// Projection of z onto {w : <F(u), w - u> = 0}. Returns u when F(u) = 0.
Vector projection_step(const Vector& z, const Vector& u, const Vector& F_u);

/// Self-adaptive regularization update: lambda / gamma1 (kept above
/// lambda_min) when rho >= eta2, unchanged when eta1 <= rho < eta2, and
/// gamma2 lambda otherwise.
double update_lambda(double lambda, double rho, const AssnParams& params);

/// Source of trial directions for the generic adaptive driver.
class DirectionSource {
 public:
  virtual ~DirectionSource() = default;
  virtual DirectionResult direction(const SolverState& state, double mu) = 0;
  /// Called after every successful iteration with the trial step.
  virtual void record(const Vector& /*d*/, const Vector& /*F_z*/, const Vector& /*F_u*/) {}
};

/// The shared accept/project/reject loop. With `projection_only` every
/// successful iteration takes the hyperplane projection step.
SolveReport solve_adaptive(const ResidualMap& F, const Vector& z0, const AssnParams& params,
                           DirectionSource& source, bool projection_only,
                           const SolveOptions& options = {});

SolveReport assn_solve(const ResidualMap& F, const Vector& z0, const AssnParams& params,
                       const SolveOptions& options = {});

SolveReport ssnp_solve(const ResidualMap& F, const Vector& z0, const AssnParams& params,
                       const SolveOptions& options = {});

}  // namespace ssn
