#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ssn/operator.hpp"
#include "ssn/residual.hpp"
#include "ssn/types.hpp"

namespace ssn {

/// Seeded generator with platform-independent output: std::mt19937_64 (fully
/// specified by the standard) plus hand-written transforms, since the
/// standard distributions are implementation-defined.
///   uniform():     (next() >> 11) * 2^-53
///   uniform_int(): rejection sampling on next() % bound
///   normal():      Marsaglia polar method on 2 uniform() - 1 pairs
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  std::uint64_t uniform_int(std::uint64_t bound);
  double normal();
  /// k distinct values of {0..n-1} by partial Fisher-Yates, returned sorted.
  std::vector<Index> sample_without_replacement(Index n, Index k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

enum class ProblemKind { lasso, bp };
enum class OperatorKind { dct, dense };

const char* to_string(ProblemKind k);
const char* to_string(OperatorKind k);
ProblemKind parse_problem_kind(const std::string& s);
OperatorKind parse_operator_kind(const std::string& s);

struct InstanceSpec {
  ProblemKind kind = ProblemKind::lasso;
  OperatorKind op = OperatorKind::dct;
  Index n = 4096;
  Index m = 512;
  Index k = 102;
  double d_db = 20.0;
  /// Lasso weight; a value <= 0 selects mu_scale * ||A^T b||_inf.
  double mu = 0.0;
  double mu_scale = 0.1;
  double sigma = 0.1;  // noise level, ignored for bp
  std::uint64_t seed = 1;

  void validate() const;
};

/// Instance sizes used in the large-scale experiments: n = 512^2,
/// m = n / 8, k = 5553.
InstanceSpec paper_scale_spec(ProblemKind kind, double d_db, std::uint64_t seed);

/// A generated test problem. Lasso: min mu ||x||_1 + 1/2 ||A x - b||^2 with
/// b = A xbar + noise. Basis pursuit: min ||x||_1 s.t. A x = b, b = A xbar.
///
/// Draw order from Rng(seed): support (k of n), then for each support index
/// in ascending order a sign (uniform_int(2): 0 -> -1) and eta2 = uniform();
/// then the operator (m of n DCT rows, or m*n row-major normals which are
/// orthonormalized by QR); then m noise normals scaled by sigma (lasso only).
/// xbar_i = sign_i 10^(d eta2_i / 20).
struct ProblemInstance {
  InstanceSpec spec;
  double mu = 0.0;  // resolved Lasso weight (0 for bp)
  std::vector<Index> rows;  // DCT row set J
  Matrix dense;             // dense operator entries
  std::vector<Index> support;
  std::vector<int> signs;
  std::vector<double> eta2;
  Vector xbar;
  Vector noise;
  Vector b;
  OperatorPtr op;

  /// Rebuilds `op` from `rows` or `dense`.
  void build_operator(bool naive_dct = false);
};

ProblemInstance gen_lasso(const InstanceSpec& spec);
ProblemInstance gen_bp(const InstanceSpec& spec);
ProblemInstance generate(const InstanceSpec& spec);

/// FBS residual for lasso instances, DRS residual for bp instances.
std::unique_ptr<ResidualMap> make_residual(const ProblemInstance& inst, double t = kDefaultStep);

/// Verified optimizer of a small problem.
struct OracleSolution {
  Vector x;
  double objective = 0.0;
  std::vector<Index> support;
  std::vector<int> signs;
  /// Largest violation of the optimality conditions at x.
  double certificate_residual = 0.0;
  /// An element s of the subdifferential of ||.||_1 at x that certifies
  /// optimality: -A^T (A x - b) / mu for lasso, A^T y for bp.
  Vector subgradient;
  Vector dual;  // bp: y with ||A^T y||_inf <= 1 and <b, y> = ||x||_1
  bool unique = true;
};

inline constexpr Index kOracleMaxDim = 16;

/// Enumerates every sign pattern in {-1, 0, 1}^n; n <= 16.
OracleSolution oracle_lasso(const Matrix& A, const Vector& b, double mu);
OracleSolution oracle_lasso(const DenseOperator& A, const Vector& b, double mu);

/// Enumerates primal basic solutions and dual vertices of the basis pursuit
/// LP; n <= 16, m < n.
OracleSolution oracle_bp(const Matrix& A, const Vector& b);
OracleSolution oracle_bp(const DenseOperator& A, const Vector& b);

/// ||x - x*|| / max(||x*||, 1)
double relative_error(const Vector& x, const Vector& xstar);

/// (f_newt - f_star) / max(f_star, 1)
double uniform_stop_threshold(double f_newt, double f_star);

double lasso_objective(const Matrix& A, const Vector& b, double mu, const Vector& x);

}  // namespace ssn
