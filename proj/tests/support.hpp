#pragma once

#include <cmath>
#include <memory>

#include <Eigen/QR>

#include "ssn/operator.hpp"
#include "ssn/problems.hpp"

namespace ssn::test {

inline Vector random_vector(Rng& rng, Index n, double scale = 1.0) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

/// m x n with orthonormal rows, so A A^T = I.
inline Matrix orthonormal_rows(Rng& rng, Index m, Index n) {
  Matrix g(n, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, m);
  return q.transpose();
}

inline std::shared_ptr<DenseOperator> dense_op(const Matrix& a) {
  return std::make_shared<DenseOperator>(a);
}

/// Small dense orthonormal Lasso or bp instance of the kind the oracles solve.
inline ProblemInstance tiny_instance(ProblemKind kind, Index n, Index m, Index k, std::uint64_t seed,
                                     double mu = 0.0) {
  InstanceSpec s;
  s.kind = kind;
  s.op = OperatorKind::dense;
  s.n = n;
  s.m = m;
  s.k = k;
  s.d_db = 20.0;
  s.seed = seed;
  s.mu = mu;
  return generate(s);
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace ssn::test
