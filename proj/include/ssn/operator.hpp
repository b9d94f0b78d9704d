#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "ssn/types.hpp"

namespace ssn {

/// Matrix-free linear map A: R^cols -> R^rows.
///
/// Every forward or adjoint application bumps a shared counter by one; this
/// is the N_A cost measure reported by the solvers. Implementations are
/// immutable after construction and may be shared between threads.
class LinearOperator {
 public:
  LinearOperator(Index rows, Index cols);
  virtual ~LinearOperator() = default;

  LinearOperator(const LinearOperator&) = delete;
  LinearOperator& operator=(const LinearOperator&) = delete;

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  Vector apply(const Vector& x) const;
  Vector apply_adjoint(const Vector& y) const;

  std::uint64_t count() const { return count_.load(std::memory_order_relaxed); }

 protected:
  virtual void forward(const Vector& x, Vector& y) const = 0;
  virtual void adjoint(const Vector& y, Vector& x) const = 0;

 private:
  Index rows_;
  Index cols_;
  mutable std::atomic<std::uint64_t> count_{0};
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(Index n) : LinearOperator(n, n) {}

 protected:
  void forward(const Vector& x, Vector& y) const override { y = x; }
  void adjoint(const Vector& y, Vector& x) const override { x = y; }
};

/// Explicit m x n matrix. Small problems and test oracles only.
class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Matrix entries);

  const Matrix& entries() const { return entries_; }

 protected:
  void forward(const Vector& x, Vector& y) const override;
  void adjoint(const Vector& y, Vector& x) const override;

 private:
  Matrix entries_;
};

/// Orthonormal DCT-II, C with C C^T = I (scale sqrt(1/n) on k = 0, sqrt(2/n)
/// otherwise). O(n log n) through FFTW.
Vector dct_orthonormal(const Vector& x);
/// Inverse (= transpose) of dct_orthonormal, i.e. the orthonormal DCT-III.
Vector idct_orthonormal(const Vector& x);

/// O(n^2) direct sums of the same transforms. Reference path for tests.
Vector dct_orthonormal_naive(const Vector& x);
Vector idct_orthonormal_naive(const Vector& x);

/// A x = (dct(x))_J for a sorted, duplicate-free row set J. Its rows are rows
/// of an orthogonal matrix, so A A^T = I.
class SubsampledDctOperator final : public LinearOperator {
 public:
  /// `rows` is sorted and deduplicated on construction; entries must lie in
  /// [0, n).
  SubsampledDctOperator(Index n, std::vector<Index> rows, bool naive = false);

  Index n() const { return cols(); }
  const std::vector<Index>& row_indices() const { return rows_; }
  bool naive() const { return naive_; }

 protected:
  void forward(const Vector& x, Vector& y) const override;
  void adjoint(const Vector& y, Vector& x) const override;

 private:
  SubsampledDctOperator(Index n, std::vector<Index> sorted_rows, bool naive, int);

  std::vector<Index> rows_;
  bool naive_;
};

}  // namespace ssn
