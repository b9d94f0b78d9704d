#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "ssn/operator.hpp"
#include "ssn/prox.hpp"
#include "ssn/types.hpp"

namespace ssn {

// Splitting step used when none is given. Larger than 1 keeps the Newton
// tail short; both residual maps stay monotone for t <= 2 with ||A|| <= 1.
inline constexpr double kDefaultStep = 1.8;

/// Partition of {0..n-1} into the indices where the shrinkage Jacobian is 1
/// (active) and where it is 0 (inactive).
struct ActiveStructure {
  std::vector<std::uint8_t> mask;
  std::vector<Index> active;
  std::vector<Index> inactive;

  static ActiveStructure from_mask(std::vector<std::uint8_t> mask);
  Index size() const { return static_cast<Index>(mask.size()); }
};

/// F(z) together with what the Newton solvers need at z.
struct Evaluation {
  Vector value;
  ActiveStructure structure;
  double norm = 0.0;
  /// Model objective at the primal point of z, when it comes for free with
  /// the residual; NaN otherwise.
  double objective = std::numeric_limits<double>::quiet_NaN();
};

/// Inexact solution of (J + mu I) d = -F.
struct NewtonDirection {
  Vector d;
  double residual_norm = 0.0;  // ||(J + mu I) d + F||
  int inner_iterations = 0;
  bool satisfied = false;  // ||r|| <= tau min(1, mu ||d||) was met
};

/// Monotone residual F(z) = z - T(z) of a fixed-point mapping T.
class ResidualMap {
 public:
  virtual ~ResidualMap() = default;

  virtual Index dim() const = 0;
  virtual const LinearOperator& op() const = 0;

  virtual Evaluation evaluate(const Vector& z) const = 0;

  /// J v for the B-subdifferential element selected by `s`.
  virtual Vector jacobian_apply(const ActiveStructure& s, const Vector& v) const = 0;

  /// Inexact regularized Newton direction at `at` with mu = lambda ||F||.
  /// The default runs CG on J + mu I through jacobian_apply, which is only
  /// sound when that matrix is symmetric.
  virtual NewtonDirection regularized_direction(const Evaluation& at, double mu, double tau,
                                                int max_inner) const;

  /// Point of the original problem associated with z.
  virtual Vector primal(const Vector& z) const { return z; }
};

/// FBS residual for mu ||x||_1 + 1/2 ||A x - b||^2:
///   F(x) = x - shrink(x - t A^T (A x - b), t mu).
class FbsResidual final : public ResidualMap {
 public:
  FbsResidual(OperatorPtr op, Vector b, double mu, double t = kDefaultStep);

  Index dim() const override { return op_->cols(); }
  const LinearOperator& op() const override { return *op_; }
  const Vector& b() const { return b_; }
  double mu() const { return mu_; }
  double t() const { return t_; }

  /// Two operator applications. The mask is taken at x - t grad h(x), and
  /// `objective` is filled with mu ||x||_1 + 1/2 ||A x - b||^2.
  Evaluation evaluate(const Vector& x) const override;

  /// Rows in the inactive set return v_i; active rows return t (A^T A v)_i.
  Vector jacobian_apply(const ActiveStructure& s, const Vector& v) const override;

  /// Reduced solve: s_O = -F_O / (1 + mu) in closed form, then CG on
  /// (t A_I^T A_I + mu I) s_I = -F_I - t (A^T A s_O)_I.
  NewtonDirection regularized_direction(const Evaluation& at, double mu, double tau,
                                        int max_inner) const override;

  double objective(const Vector& x) const;

 private:
  OperatorPtr op_;
  Vector b_;
  double mu_;
  double t_;
};

/// DRS residual for basis pursuit min ||x||_1 s.t. A x = b with A A^T = I:
///   F(z) = shrink(z, t) - P(2 shrink(z, t) - z),  P(w) = w - A^T (A w - b).
class DrsResidual final : public ResidualMap {
 public:
  DrsResidual(OperatorPtr op, Vector b, double t = kDefaultStep);

  Index dim() const override { return op_->cols(); }
  const LinearOperator& op() const override { return *op_; }
  const Vector& b() const { return b_; }
  double t() const { return t_; }

  /// Two operator applications. The mask is that of shrink(z, t) and
  /// `objective` is ||shrink(z, t)||_1.
  Evaluation evaluate(const Vector& z) const override;

  /// M v + (I - A^T A)(I - 2M) v.
  Vector jacobian_apply(const ActiveStructure& s, const Vector& v) const override;

  /// d = -(H^-1 F + H^-1 A^T y) where y solves the m x m SPD system
  /// (mu/(1+mu) I + A S A^T) y = A W H^-1 F by CG.
  NewtonDirection regularized_direction(const Evaluation& at, double mu, double tau,
                                        int max_inner) const override;

  Vector primal(const Vector& z) const override;

 private:
  OperatorPtr op_;
  Vector b_;
  double t_;
  AffineProjectionProx projection_;
};

}  // namespace ssn
