#include "ssn/lbfgs.hpp"

#include <cmath>

#include <Eigen/LU>

#include "ssn/kernels.hpp"

namespace ssn {

LbfgsMemory::LbfgsMemory(std::size_t capacity, double curvature_floor)
    : capacity_(capacity), floor_(curvature_floor) {
  require(capacity >= 1, "LbfgsMemory: capacity must be positive");
}

bool LbfgsMemory::push(const Vector& d, const Vector& dF) {
  require(d.size() == dF.size(), "LbfgsMemory::push: dimension mismatch");
  const double curv = kernels::dot(view(d), view(dF));
  const double scale = kernels::norm(view(d)) * kernels::norm(view(dF));
  if (!(curv > floor_ * scale) || scale == 0.0) return false;
  if (pairs_.size() == capacity_) pairs_.pop_front();
  pairs_.push_back({d, dF, curv});
  return true;
}

double LbfgsMemory::h0() const {
  if (pairs_.empty()) return 1.0;
  const Pair& p = pairs_.back();
  return kernels::squared_norm(view(p.dF)) / p.curvature;
}

CompactFactors CompactFactors::build(const LbfgsMemory& mem, double mu) {
  CompactFactors f;
  f.h0 = mem.h0();
  f.hbar = f.h0 + mu;
  const auto p = static_cast<Index>(mem.size());
  if (p == 0) return f;
  const Index n = mem.pairs().front().d.size();

  Matrix D(n, p), DF(n, p);
  for (Index j = 0; j < p; ++j) {
    D.col(j) = mem.pairs()[static_cast<std::size_t>(j)].d;
    DF.col(j) = mem.pairs()[static_cast<std::size_t>(j)].dF;
  }
  const Matrix DtDF = D.transpose() * DF;
  f.L = DtDF.triangularView<Eigen::StrictlyLower>();
  f.S = DtDF.diagonal();

  f.V.resize(2 * p, 2 * p);
  f.V.topLeftCorner(p, p) = f.h0 * (D.transpose() * D);
  f.V.topRightCorner(p, p) = f.L;
  f.V.bottomLeftCorner(p, p) = f.L.transpose();
  f.V.bottomRightCorner(p, p) = -Matrix(f.S.asDiagonal());

  f.C.resize(n, 2 * p);
  f.C.leftCols(p) = f.h0 * D;
  f.C.rightCols(p) = DF;
  f.R = f.V - (f.C.transpose() * f.C) / f.hbar;
  return f;
}

LbfgsDirection lbfgs_direction(const LbfgsMemory& mem, const Vector& F, double mu) {
  require(mu > 0, "lbfgs_direction: mu must be positive");
  LbfgsDirection out;
  const CompactFactors f = CompactFactors::build(mem, mu);
  out.d = -F / f.hbar;
  if (mem.size() == 0) return out;
  require(f.C.rows() == F.size(), "lbfgs_direction: dimension mismatch");

  Eigen::FullPivLU<Matrix> lu(f.R);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) {
    out.d = -F / f.hbar;
    out.fallback = true;
    return out;
  }
  const Vector ctf = f.C.transpose() * F;
  const Vector w = lu.solve(ctf);
  out.d.noalias() -= f.C * w / (f.hbar * f.hbar);
  if (!out.d.allFinite()) {
    out.d = -F / f.hbar;
    out.fallback = true;
  }
  return out;
}

namespace {

class LbfgsSource final : public DirectionSource {
 public:
  explicit LbfgsSource(std::size_t memory) : mem_(memory) {}

  DirectionResult direction(const SolverState& st, double mu) override {
    LbfgsDirection ld = lbfgs_direction(mem_, st.eval.value, mu);
    DirectionResult out;
    out.d = std::move(ld.d);
    return out;
  }

  void record(const Vector& d, const Vector& F_z, const Vector& F_u) override {
    mem_.push(d, F_u - F_z);
  }

 private:
  LbfgsMemory mem_;
};

}  // namespace

SolveReport aslb_solve(const ResidualMap& F, const Vector& z0, std::size_t memory,
                       const AssnParams& params, const SolveOptions& options) {
  LbfgsSource source(memory);
  return solve_adaptive(F, z0, params, source, false, options);
}

}  // namespace ssn
