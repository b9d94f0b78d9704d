#pragma once

#include <cstddef>
#include <deque>

#include "ssn/newton.hpp"
#include "ssn/types.hpp"

namespace ssn {

/// Up to `capacity` recent secant pairs (d, dF), oldest first.
class LbfgsMemory {
 public:
  struct Pair {
    Vector d;
    Vector dF;
    double curvature;  // <d, dF>
  };

  explicit LbfgsMemory(std::size_t capacity, double curvature_floor = 1e-12);

  /// Stores the pair unless <d, dF> <= floor ||d|| ||dF||. Evicts the oldest
  /// pair when full. Returns whether the pair was kept.
  bool push(const Vector& d, const Vector& dF);

  std::size_t size() const { return pairs_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<Pair>& pairs() const { return pairs_; }

  /// Scale of the initial approximation H0 = h0 I: <dF, dF> / <d, dF> of the
  /// newest pair, 1 when empty.
  double h0() const;

 private:
  std::size_t capacity_;
  double floor_;
  std::deque<Pair> pairs_;
};

/// Pieces of the compact representation
///   H = H0 - C V^-1 C^T,  C = [H0 D, DF],  V = [[D^T H0 D, L], [L^T, -S]]
/// and of the regularized inverse
///   (H + mu I)^-1 = Hbar^-1 + Hbar^-1 C R^-1 C^T Hbar^-1,  R = V - C^T Hbar^-1 C.
struct CompactFactors {
  double h0 = 1.0;
  double hbar = 1.0;  // h0 + mu
  Matrix L;           // strictly lower: L_ij = <d_i, dF_j>, i > j
  Vector S;           // S_ii = <d_i, dF_i>
  Matrix V;
  Matrix C;           // n x 2p
  Matrix R;

  static CompactFactors build(const LbfgsMemory& mem, double mu);
};

struct LbfgsDirection {
  Vector d;
  bool fallback = false;  // R was singular; d = -F / (h0 + mu)
};

/// d = -(H + mu I)^-1 F in O(p n + p^3) for p stored pairs.
LbfgsDirection lbfgs_direction(const LbfgsMemory& mem, const Vector& F, double mu);

/// The adaptive driver with regularized L-BFGS trial directions. Pairs
/// (d, F(u) - F(z)) are stored after successful iterations.
SolveReport aslb_solve(const ResidualMap& F, const Vector& z0, std::size_t memory,
                       const AssnParams& params, const SolveOptions& options = {});

}  // namespace ssn
