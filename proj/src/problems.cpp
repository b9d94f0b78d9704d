#include "ssn/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/QR>

namespace ssn {

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::uniform_int(std::uint64_t bound) {
  require(bound > 0, "Rng::uniform_int: bound must be positive");
  const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
  for (;;) {
    const std::uint64_t x = next();
    if (x >= threshold) return x % bound;
  }
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::vector<Index> Rng::sample_without_replacement(Index n, Index k) {
  require(k >= 0 && k <= n, "sample_without_replacement: need 0 <= k <= n");
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    const auto j = i + static_cast<Index>(uniform_int(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

const char* to_string(ProblemKind k) { return k == ProblemKind::lasso ? "lasso" : "bp"; }
const char* to_string(OperatorKind k) { return k == OperatorKind::dct ? "dct" : "dense"; }

ProblemKind parse_problem_kind(const std::string& s) {
  if (s == "lasso") return ProblemKind::lasso;
  if (s == "bp") return ProblemKind::bp;
  throw ContractError("unknown problem kind '" + s + "'");
}

OperatorKind parse_operator_kind(const std::string& s) {
  if (s == "dct") return OperatorKind::dct;
  if (s == "dense") return OperatorKind::dense;
  throw ContractError("unknown operator kind '" + s + "'");
}

void InstanceSpec::validate() const {
  require(n >= 1, "InstanceSpec: n must be positive");
  require(m >= 1 && m <= n, "InstanceSpec: need 1 <= m <= n");
  require(k >= 0 && k <= n, "InstanceSpec: need 0 <= k <= n");
  require(d_db >= 0, "InstanceSpec: dynamic range must be nonnegative");
  require(sigma >= 0, "InstanceSpec: sigma must be nonnegative");
  require(mu > 0 || mu_scale > 0, "InstanceSpec: need mu > 0 or mu_scale > 0");
}

InstanceSpec paper_scale_spec(ProblemKind kind, double d_db, std::uint64_t seed) {
  InstanceSpec s;
  s.kind = kind;
  s.op = OperatorKind::dct;
  s.n = 512 * 512;
  s.m = s.n / 8;
  s.k = 5553;
  s.d_db = d_db;
  s.seed = seed;
  return s;
}

void ProblemInstance::build_operator(bool naive_dct) {
  if (spec.op == OperatorKind::dct)
    op = std::make_shared<SubsampledDctOperator>(spec.n, rows, naive_dct);
  else
    op = std::make_shared<DenseOperator>(dense);
}

namespace {

ProblemInstance draw(const InstanceSpec& spec, Rng& rng) {
  spec.validate();
  ProblemInstance inst;
  inst.spec = spec;

  inst.support = rng.sample_without_replacement(spec.n, spec.k);
  inst.xbar = Vector::Zero(spec.n);
  for (Index i : inst.support) {
    const int sign = rng.uniform_int(2) == 0 ? -1 : 1;
    const double e2 = rng.uniform();
    inst.signs.push_back(sign);
    inst.eta2.push_back(e2);
    inst.xbar[i] = sign * std::pow(10.0, spec.d_db * e2 / 20.0);
  }

  if (spec.op == OperatorKind::dct) {
    inst.rows = rng.sample_without_replacement(spec.n, spec.m);
  } else {
    Matrix g(spec.m, spec.n);
    for (Index r = 0; r < spec.m; ++r)
      for (Index c = 0; c < spec.n; ++c) g(r, c) = rng.normal();
    Eigen::HouseholderQR<Matrix> qr(g.transpose());
    const Matrix q = qr.householderQ() * Matrix::Identity(spec.n, spec.m);
    inst.dense = q.transpose();
  }
  inst.build_operator();
  inst.b = inst.op->apply(inst.xbar);
  return inst;
}

}  // namespace

ProblemInstance gen_lasso(const InstanceSpec& spec_in) {
  InstanceSpec spec = spec_in;
  spec.kind = ProblemKind::lasso;
  Rng rng(spec.seed);
  ProblemInstance inst = draw(spec, rng);
  inst.noise.resize(spec.m);
  for (Index i = 0; i < spec.m; ++i) inst.noise[i] = spec.sigma * rng.normal();
  inst.b += inst.noise;
  inst.mu = spec.mu > 0 ? spec.mu
                        : spec.mu_scale * inst.op->apply_adjoint(inst.b).lpNorm<Eigen::Infinity>();
  return inst;
}

ProblemInstance gen_bp(const InstanceSpec& spec_in) {
  InstanceSpec spec = spec_in;
  spec.kind = ProblemKind::bp;
  spec.sigma = 0.0;
  Rng rng(spec.seed);
  ProblemInstance inst = draw(spec, rng);
  inst.noise = Vector::Zero(spec.m);
  inst.mu = 0.0;
  return inst;
}

ProblemInstance generate(const InstanceSpec& spec) {
  return spec.kind == ProblemKind::lasso ? gen_lasso(spec) : gen_bp(spec);
}

std::unique_ptr<ResidualMap> make_residual(const ProblemInstance& inst, double t) {
  require(inst.op != nullptr, "make_residual: instance has no operator");
  if (inst.spec.kind == ProblemKind::lasso)
    return std::make_unique<FbsResidual>(inst.op, inst.b, inst.mu, t);
  return std::make_unique<DrsResidual>(inst.op, inst.b, t);
}

// ---------------------------------------------------------------------------

double lasso_objective(const Matrix& A, const Vector& b, double mu, const Vector& x) {
  return mu * x.lpNorm<1>() + 0.5 * (A * x - b).squaredNorm();
}

OracleSolution oracle_lasso(const Matrix& A, const Vector& b, double mu) {
  const Index n = A.cols();
  const Index m = A.rows();
  require(n >= 1 && n <= kOracleMaxDim, "oracle_lasso: need 1 <= n <= 16");
  require(b.size() == m, "oracle_lasso: b has wrong length");
  require(mu > 0, "oracle_lasso: mu must be positive");

  const double tol = 1e-9;
  OracleSolution best;
  bool found = false;
  int verified = 0;

  for (std::uint32_t set = 0; set < (1u << n); ++set) {
    std::vector<Index> S;
    for (Index i = 0; i < n; ++i)
      if (set & (1u << i)) S.push_back(i);
    const auto p = static_cast<Index>(S.size());
    if (p > m) continue;

    Matrix AS(m, p);
    for (Index j = 0; j < p; ++j) AS.col(j) = A.col(S[static_cast<std::size_t>(j)]);
    Eigen::FullPivLU<Matrix> lu;
    Vector Atb_S;
    if (p > 0) {
      lu.compute(AS.transpose() * AS);
      if (lu.rank() < p) continue;
      Atb_S = AS.transpose() * b;
    }

    for (std::uint32_t signs = 0; signs < (1u << p); ++signs) {
      Vector s_S(p);
      for (Index j = 0; j < p; ++j) s_S[j] = (signs & (1u << j)) ? 1.0 : -1.0;
      Vector x = Vector::Zero(n);
      if (p > 0) {
        const Vector xs = lu.solve(Atb_S - mu * s_S);
        bool consistent = true;
        for (Index j = 0; j < p; ++j) consistent = consistent && xs[j] * s_S[j] > 0;
        if (!consistent) continue;
        for (Index j = 0; j < p; ++j) x[S[static_cast<std::size_t>(j)]] = xs[j];
      }
      const Vector g = A.transpose() * (A * x - b);
      double viol = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (x[i] != 0.0)
          viol = std::max(viol, std::abs(g[i] + mu * (x[i] > 0 ? 1.0 : -1.0)));
        else
          viol = std::max(viol, std::abs(g[i]) - mu);
      }
      if (viol > tol * std::max(1.0, mu)) continue;
      ++verified;
      const double obj = lasso_objective(A, b, mu, x);
      if (!found || obj < best.objective) {
        found = true;
        best.x = x;
        best.objective = obj;
        best.certificate_residual = std::max(0.0, viol);
        best.subgradient = -g / mu;
      }
    }
  }
  if (!found) throw std::runtime_error("oracle_lasso: no sign pattern satisfies the KKT conditions");
  best.unique = verified == 1;
  for (Index i = 0; i < n; ++i) {
    if (best.x[i] != 0.0) {
      best.support.push_back(i);
      best.signs.push_back(best.x[i] > 0 ? 1 : -1);
    }
  }
  return best;
}

OracleSolution oracle_lasso(const DenseOperator& A, const Vector& b, double mu) {
  return oracle_lasso(A.entries(), b, mu);
}

namespace {

// All size-k subsets of {0..n-1} in lexicographic order.
template <class Fn>
void for_each_subset(Index n, Index k, Fn&& fn) {
  std::vector<Index> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (;;) {
    fn(idx);
    Index i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace

OracleSolution oracle_bp(const Matrix& A, const Vector& b) {
  const Index n = A.cols();
  const Index m = A.rows();
  require(n >= 1 && n <= kOracleMaxDim, "oracle_bp: need 1 <= n <= 16");
  require(m >= 1 && m < n, "oracle_bp: need 1 <= m < n");
  require(b.size() == m, "oracle_bp: b has wrong length");

  // Primal: basic solutions A_T x_T = b over all m-column bases.
  OracleSolution best;
  bool found = false;
  std::vector<Vector> ties;
  for_each_subset(n, m, [&](const std::vector<Index>& T) {
    Matrix AT(m, m);
    for (Index j = 0; j < m; ++j) AT.col(j) = A.col(T[static_cast<std::size_t>(j)]);
    Eigen::FullPivLU<Matrix> lu(AT);
    if (!lu.isInvertible()) return;
    const Vector xt = lu.solve(b);
    Vector x = Vector::Zero(n);
    for (Index j = 0; j < m; ++j) x[T[static_cast<std::size_t>(j)]] = xt[j];
    const double obj = x.lpNorm<1>();
    if (!found || obj < best.objective - 1e-12 * std::max(1.0, obj)) {
      found = true;
      best.x = x;
      best.objective = obj;
      ties.clear();
    } else if (std::abs(obj - best.objective) <= 1e-9 * std::max(1.0, obj) &&
               (x - best.x).norm() > 1e-9 * std::max(1.0, best.x.norm())) {
      ties.push_back(x);
    }
  });
  if (!found) throw std::runtime_error("oracle_bp: A has no nonsingular basis");
  // Snap round-off zeros so the support is exact.
  for (Index i = 0; i < n; ++i)
    if (std::abs(best.x[i]) <= 1e-13 * std::max(1.0, best.objective)) best.x[i] = 0.0;
  best.unique = ties.empty();

  // Dual: max <b, y> s.t. ||A^T y||_inf <= 1, over the polytope's vertices.
  Vector y_best = Vector::Zero(m);
  double dual_best = 0.0;
  for_each_subset(n, m, [&](const std::vector<Index>& T) {
    Matrix AT(m, m);
    for (Index j = 0; j < m; ++j) AT.col(j) = A.col(T[static_cast<std::size_t>(j)]);
    Eigen::FullPivLU<Matrix> lu(AT.transpose());
    if (!lu.isInvertible()) return;
    for (std::uint32_t signs = 0; signs < (1u << m); ++signs) {
      Vector sigma(m);
      for (Index j = 0; j < m; ++j) sigma[j] = (signs & (1u << j)) ? 1.0 : -1.0;
      const Vector y = lu.solve(sigma);
      if ((A.transpose() * y).lpNorm<Eigen::Infinity>() > 1.0 + 1e-12) continue;
      const double val = b.dot(y);
      if (val > dual_best) {
        dual_best = val;
        y_best = y;
      }
    }
  });

  best.dual = y_best;
  best.subgradient = A.transpose() * y_best;
  double viol = std::abs(dual_best - best.objective);
  viol = std::max(viol, best.subgradient.lpNorm<Eigen::Infinity>() - 1.0);
  viol = std::max(viol, (A * best.x - b).lpNorm<Eigen::Infinity>());
  for (Index i = 0; i < n; ++i) {
    if (best.x[i] != 0.0) {
      best.support.push_back(i);
      best.signs.push_back(best.x[i] > 0 ? 1 : -1);
      viol = std::max(viol, std::abs(best.subgradient[i] - best.signs.back()));
    }
  }
  best.certificate_residual = std::max(0.0, viol);
  return best;
}

OracleSolution oracle_bp(const DenseOperator& A, const Vector& b) {
  return oracle_bp(A.entries(), b);
}

double relative_error(const Vector& x, const Vector& xstar) {
  require(x.size() == xstar.size(), "relative_error: dimension mismatch");
  return (x - xstar).norm() / std::max(xstar.norm(), 1.0);
}

double uniform_stop_threshold(double f_newt, double f_star) {
  return (f_newt - f_star) / std::max(f_star, 1.0);
}

}  // namespace ssn
