#include "ssn/prox.hpp"

#include <algorithm>

#include "ssn/kernels.hpp"

namespace ssn {

Vector shrink(const Vector& x, double threshold) {
  require(threshold > 0, "shrink: threshold must be positive");
  Vector out(x.size());
  kernels::shrink(view(x), threshold, view(out), {});
  return out;
}

Index DiagonalJacobian::active_count() const {
  return static_cast<Index>(std::count(active.begin(), active.end(), std::uint8_t{1}));
}

Vector DiagonalJacobian::apply(const Vector& v) const {
  require(v.size() == size(), "DiagonalJacobian::apply: dimension mismatch");
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out[i] = active[static_cast<std::size_t>(i)] ? v[i] : 0.0;
  return out;
}

DiagonalJacobian shrink_jacobian(const Vector& x, double threshold) {
  require(threshold > 0, "shrink_jacobian: threshold must be positive");
  DiagonalJacobian jac;
  jac.active.resize(static_cast<std::size_t>(x.size()));
  kernels::shrink(view(x), threshold, {}, jac.active);
  return jac;
}

AffineProjectionProx::AffineProjectionProx(OperatorPtr op, Vector b)
    : op_(std::move(op)), b_(std::move(b)) {
  require(op_ != nullptr, "AffineProjectionProx: null operator");
  require(b_.size() == op_->rows(), "AffineProjectionProx: b has wrong length");
}

Vector AffineProjectionProx::apply(const Vector& z) const {
  Vector r = op_->apply(z);
  r -= b_;
  Vector out = z;
  kernels::axpy(-1.0, view(op_->apply_adjoint(r)), view(out));
  return out;
}

}  // namespace ssn
