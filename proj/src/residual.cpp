#include "ssn/residual.hpp"

#include <cmath>

#include "ssn/cg.hpp"
#include "ssn/kernels.hpp"

namespace ssn {

ActiveStructure ActiveStructure::from_mask(std::vector<std::uint8_t> mask) {
  ActiveStructure s;
  s.mask = std::move(mask);
  for (std::size_t i = 0; i < s.mask.size(); ++i)
    (s.mask[i] ? s.active : s.inactive).push_back(static_cast<Index>(i));
  return s;
}

namespace {

double inexact_bound(double tau, double mu, double dnorm) {
  return tau * std::min(1.0, mu * dnorm);
}

}  // namespace

NewtonDirection ResidualMap::regularized_direction(const Evaluation& at, double mu, double tau,
                                                   int max_inner) const {
  const auto& s = at.structure;
  const Vector rhs = -at.value;
  auto apply = [&](const Vector& v) -> Vector {
    Vector out = jacobian_apply(s, v);
    kernels::axpy(mu, view(v), view(out));
    return out;
  };
  auto accept = [&](const Vector& d, double rnorm) {
    const double dn = kernels::norm(view(d));
    return dn > 0.0 && rnorm <= inexact_bound(tau, mu, dn);
  };
  CgResult cg = conjugate_gradient(apply, rhs, accept, max_inner);
  return {std::move(cg.x), cg.residual_norm, cg.iterations, cg.satisfied};
}

// ---------------------------------------------------------------------------

FbsResidual::FbsResidual(OperatorPtr op, Vector b, double mu, double t)
    : op_(std::move(op)), b_(std::move(b)), mu_(mu), t_(t) {
  require(op_ != nullptr, "FbsResidual: null operator");
  require(b_.size() == op_->rows(), "FbsResidual: b has wrong length");
  require(mu_ > 0, "FbsResidual: mu must be positive");
  require(t_ > 0, "FbsResidual: t must be positive");
}

Evaluation FbsResidual::evaluate(const Vector& x) const {
  require(x.size() == dim(), "FbsResidual::evaluate: dimension mismatch");
  Vector res = op_->apply(x);
  res -= b_;
  Vector shifted = x;
  kernels::axpy(-t_, view(op_->apply_adjoint(res)), view(shifted));

  Evaluation e;
  e.value.resize(x.size());
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(x.size()));
  kernels::shrink(view(shifted), t_ * mu_, view(e.value), mask);
  // F = x - prox
  kernels::axpby(1.0, view(x), -1.0, view(e.value));
  e.structure = ActiveStructure::from_mask(std::move(mask));
  e.norm = kernels::norm(view(e.value));
  e.objective = mu_ * x.lpNorm<1>() + 0.5 * kernels::squared_norm(view(res));
  return e;
}

Vector FbsResidual::jacobian_apply(const ActiveStructure& s, const Vector& v) const {
  require(v.size() == dim() && s.size() == dim(), "FbsResidual::jacobian_apply: dimension mismatch");
  Vector out = v;
  if (s.active.empty()) return out;
  const Vector w = op_->apply_adjoint(op_->apply(v));
  for (Index i : s.active) out[i] = t_ * w[i];
  return out;
}

NewtonDirection FbsResidual::regularized_direction(const Evaluation& at, double mu, double tau,
                                                   int max_inner) const {
  const Vector& F = at.value;
  const auto& act = at.structure.active;
  const auto& inact = at.structure.inactive;
  const Index n = dim();

  NewtonDirection out;
  out.d = Vector::Zero(n);
  double so_sq = 0.0;
  for (Index i : inact) {
    out.d[i] = -F[i] / (1.0 + mu);
    so_sq += out.d[i] * out.d[i];
  }
  if (act.empty()) {
    out.satisfied = true;
    return out;
  }

  const auto na = static_cast<Index>(act.size());
  Vector rhs(na);
  for (Index j = 0; j < na; ++j) rhs[j] = -F[act[static_cast<std::size_t>(j)]];
  if (so_sq > 0.0) {
    const Vector w = op_->apply_adjoint(op_->apply(out.d));
    for (Index j = 0; j < na; ++j) rhs[j] -= t_ * w[act[static_cast<std::size_t>(j)]];
  }

  Vector full(n);
  auto apply = [&](const Vector& p) -> Vector {
    full.setZero();
    for (Index j = 0; j < na; ++j) full[act[static_cast<std::size_t>(j)]] = p[j];
    const Vector w = op_->apply_adjoint(op_->apply(full));
    Vector q(na);
    for (Index j = 0; j < na; ++j) q[j] = t_ * w[act[static_cast<std::size_t>(j)]] + mu * p[j];
    return q;
  };
  auto accept = [&](const Vector& s_active, double rnorm) {
    const double dn = std::sqrt(so_sq + kernels::squared_norm(view(s_active)));
    return dn > 0.0 && rnorm <= inexact_bound(tau, mu, dn);
  };
  CgResult cg = conjugate_gradient(apply, rhs, accept, max_inner);
  for (Index j = 0; j < na; ++j) out.d[act[static_cast<std::size_t>(j)]] = cg.x[j];
  out.residual_norm = cg.residual_norm;
  out.inner_iterations = cg.iterations;
  out.satisfied = cg.satisfied;
  return out;
}

double FbsResidual::objective(const Vector& x) const {
  Vector res = op_->apply(x);
  res -= b_;
  return mu_ * x.lpNorm<1>() + 0.5 * res.squaredNorm();
}

// ---------------------------------------------------------------------------

DrsResidual::DrsResidual(OperatorPtr op, Vector b, double t)
    : op_(std::move(op)), b_(std::move(b)), t_(t), projection_(op_, b_) {
  require(t_ > 0, "DrsResidual: t must be positive");
}

Evaluation DrsResidual::evaluate(const Vector& z) const {
  require(z.size() == dim(), "DrsResidual::evaluate: dimension mismatch");
  Evaluation e;
  Vector p(z.size());
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(z.size()));
  kernels::shrink(view(z), t_, view(p), mask);
  Vector w = z;
  kernels::axpby(2.0, view(p), -1.0, view(w));  // w = 2p - z
  const Vector q = projection_.apply(w);
  e.value = p - q;
  e.structure = ActiveStructure::from_mask(std::move(mask));
  e.norm = kernels::norm(view(e.value));
  e.objective = p.lpNorm<1>();
  return e;
}

Vector DrsResidual::jacobian_apply(const ActiveStructure& s, const Vector& v) const {
  require(v.size() == dim() && s.size() == dim(), "DrsResidual::jacobian_apply: dimension mismatch");
  Vector w = v;  // (I - 2M) v
  for (Index i : s.active) w[i] = -v[i];
  Vector out = w - op_->apply_adjoint(op_->apply(w));
  for (Index i : s.active) out[i] += v[i];
  return out;
}

NewtonDirection DrsResidual::regularized_direction(const Evaluation& at, double mu, double tau,
                                                   int max_inner) const {
  const Vector& F = at.value;
  const auto& mask = at.structure.mask;
  const Index n = dim();

  // H = W + M + mu I is diagonal: mu on active entries, 1 + mu elsewhere.
  Vector hinv(n), s_diag(n), w_hinv_f(n);
  const double s_active = 1.0 / mu + 1.0 / (1.0 + mu);
  for (Index i = 0; i < n; ++i) {
    const bool a = mask[static_cast<std::size_t>(i)] != 0;
    hinv[i] = a ? 1.0 / mu : 1.0 / (1.0 + mu);
    s_diag[i] = a ? s_active : 0.0;
    w_hinv_f[i] = (a ? -1.0 : 1.0) * hinv[i] * F[i];
  }
  const Vector hinv_f = hinv.cwiseProduct(F);
  const double c = mu / (1.0 + mu);

  // CG on K y = g, K = c I + A S A^T. A^T y is carried along so that the
  // full direction, and its norm for the inexactness test, cost nothing
  // extra. Since A A^T = I, ||(J + mu I) d + F|| = ||g - K y||.
  const Vector g = op_->apply(w_hinv_f);
  Vector y = Vector::Zero(g.size());
  Vector at_y = Vector::Zero(n);
  Vector r = g;
  Vector d(n);

  auto direction = [&] {
    for (Index i = 0; i < n; ++i) d[i] = -(hinv_f[i] + hinv[i] * at_y[i]);
  };
  auto accept = [&](double rnorm) {
    const double dn = kernels::norm(view(d));
    return dn > 0.0 && rnorm <= inexact_bound(tau, mu, dn);
  };

  NewtonDirection out;
  double rr = kernels::squared_norm(view(r));
  direction();
  out.residual_norm = std::sqrt(rr);
  if (accept(out.residual_norm)) {
    out.d = d;
    out.satisfied = true;
    return out;
  }
  Vector p = r;
  for (int it = 0; it < max_inner; ++it) {
    const Vector at_p = op_->apply_adjoint(p);
    Vector q = op_->apply(s_diag.cwiseProduct(at_p));
    kernels::axpy(c, view(p), view(q));
    const double pq = kernels::dot(view(p), view(q));
    if (!(pq > 0.0)) break;
    const double alpha = rr / pq;
    kernels::axpy(alpha, view(p), view(y));
    kernels::axpy(alpha, view(at_p), view(at_y));
    kernels::axpy(-alpha, view(q), view(r));
    const double rr_next = kernels::squared_norm(view(r));
    out.inner_iterations = it + 1;
    out.residual_norm = std::sqrt(rr_next);
    direction();
    if (accept(out.residual_norm)) {
      out.satisfied = true;
      break;
    }
    kernels::axpby(1.0, view(r), rr_next / rr, view(p));
    rr = rr_next;
  }
  out.d = d;
  return out;
}

Vector DrsResidual::primal(const Vector& z) const { return shrink(z, t_); }

}  // namespace ssn
