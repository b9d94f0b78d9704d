#include "ssn/cg.hpp"

#include <cmath>

#include "ssn/kernels.hpp"

namespace ssn {

CgResult conjugate_gradient(const std::function<Vector(const Vector&)>& apply, const Vector& rhs,
                            const std::function<bool(const Vector&, double)>& accept,
                            int max_iters) {
  CgResult out;
  out.x = Vector::Zero(rhs.size());
  Vector r = rhs;
  double rr = kernels::squared_norm(view(r));
  out.residual_norm = std::sqrt(rr);
  if (accept(out.x, out.residual_norm)) {
    out.satisfied = true;
    return out;
  }
  Vector p = r;
  for (int it = 0; it < max_iters; ++it) {
    const Vector q = apply(p);
    const double pq = kernels::dot(view(p), view(q));
    if (!(pq > 0.0)) break;  // lost positive definiteness numerically
    const double alpha = rr / pq;
    kernels::axpy(alpha, view(p), view(out.x));
    kernels::axpy(-alpha, view(q), view(r));
    const double rr_next = kernels::squared_norm(view(r));
    out.iterations = it + 1;
    out.residual_norm = std::sqrt(rr_next);
    if (accept(out.x, out.residual_norm)) {
      out.satisfied = true;
      return out;
    }
    kernels::axpby(1.0, view(r), rr_next / rr, view(p));
    rr = rr_next;
  }
  return out;
}

}  // namespace ssn
