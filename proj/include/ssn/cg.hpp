#pragma once

#include <functional>

#include "ssn/types.hpp"

namespace ssn {

struct CgResult {
  Vector x;
  double residual_norm = 0.0;
  int iterations = 0;
  bool satisfied = false;  // the caller's stopping test accepted x
};

/// Conjugate gradient for a symmetric positive definite map, started at 0.
/// `accept(x, residual_norm)` is checked before the first iteration and after
/// every update; CG stops as soon as it returns true or after `max_iters`
/// iterations.
CgResult conjugate_gradient(const std::function<Vector(const Vector&)>& apply, const Vector& rhs,
                            const std::function<bool(const Vector&, double)>& accept,
                            int max_iters);

}  // namespace ssn
