#pragma once

#include <functional>

#include "ssn/newton.hpp"
#include "ssn/residual.hpp"

namespace ssn {

struct FixedPointParams {
  double epsilon = 1e-6;
  int max_iters = 100000;

  void validate() const;
};

/// z <- z - F(z) = T(z) until ||F(z)|| <= epsilon. Each iteration costs one
/// residual evaluation. Step counts in the report stay zero.
SolveReport fixed_point_iterate(const ResidualMap& F, const Vector& z0,
                                const FixedPointParams& params, const SolveOptions& options = {});

/// Forward-backward splitting for the Lasso residual.
SolveReport fbs_iterate(const FbsResidual& F, const Vector& x0, const FixedPointParams& params,
                        const SolveOptions& options = {});

/// Douglas-Rachford for basis pursuit; `solution` is shrink(z, t).
SolveReport drs_iterate(const DrsResidual& F, const Vector& z0, const FixedPointParams& params,
                        const SolveOptions& options = {});

/// Runs `first_order_steps` fixed-point iterations and hands the result to
/// `second_order`. The merged report accounts for both phases.
/// `options` applies to the first phase only.
SolveReport warm_started(const ResidualMap& F, const Vector& z0, int first_order_steps,
                         const std::function<SolveReport(const Vector&)>& second_order,
                         const SolveOptions& options = {});

}  // namespace ssn
