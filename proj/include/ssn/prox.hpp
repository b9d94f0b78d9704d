#pragma once

#include <cstdint>
#include <vector>

#include "ssn/operator.hpp"
#include "ssn/types.hpp"

namespace ssn {

/// Soft thresholding, the prox of threshold * ||.||_1.
Vector shrink(const Vector& x, double threshold);

/// One element of the B-subdifferential of shrink: a 0/1 diagonal with
/// entry 1 exactly where |x_i| > threshold (ties go to 0).
struct DiagonalJacobian {
  std::vector<std::uint8_t> active;

  Index size() const { return static_cast<Index>(active.size()); }
  Index active_count() const;
  Vector apply(const Vector& v) const;
};

DiagonalJacobian shrink_jacobian(const Vector& x, double threshold);

/// Projection onto {x : A x = b} for an operator with A A^T = I:
/// z - A^T (A z - b). Every call costs two operator applications.
class AffineProjectionProx {
 public:
  AffineProjectionProx(OperatorPtr op, Vector b);

  Vector apply(const Vector& z) const;

  const LinearOperator& op() const { return *op_; }
  const Vector& b() const { return b_; }

 private:
  OperatorPtr op_;
  Vector b_;
};

inline Vector affine_project(const AffineProjectionProx& prox, const Vector& z) {
  return prox.apply(z);
}

}  // namespace ssn
