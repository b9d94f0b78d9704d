#include "ssn/operator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

namespace ssn {

LinearOperator::LinearOperator(Index rows, Index cols) : rows_(rows), cols_(cols) {
  require(rows >= 0 && cols >= 0, "LinearOperator: negative dimension");
}

Vector LinearOperator::apply(const Vector& x) const {
  if (x.size() != cols_)
    throw ContractError("apply: expected length " + std::to_string(cols_) + ", got " +
                        std::to_string(x.size()));
  Vector y(rows_);
  forward(x, y);
  count_.fetch_add(1, std::memory_order_relaxed);
  return y;
}

Vector LinearOperator::apply_adjoint(const Vector& y) const {
  if (y.size() != rows_)
    throw ContractError("apply_adjoint: expected length " + std::to_string(rows_) + ", got " +
                        std::to_string(y.size()));
  Vector x(cols_);
  adjoint(y, x);
  count_.fetch_add(1, std::memory_order_relaxed);
  return x;
}

DenseOperator::DenseOperator(Matrix entries)
    : LinearOperator(entries.rows(), entries.cols()), entries_(std::move(entries)) {}

void DenseOperator::forward(const Vector& x, Vector& y) const { y.noalias() = entries_ * x; }

void DenseOperator::adjoint(const Vector& y, Vector& x) const {
  x.noalias() = entries_.transpose() * y;
}

namespace {

// FFTW planning is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(double* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<double, FftwFree>;

FftwBuffer fftw_buffer(Index n) {
  auto* p = static_cast<double*>(fftw_malloc(sizeof(double) * static_cast<std::size_t>(n)));
  if (!p) throw std::bad_alloc();
  return FftwBuffer(p);
}

struct DctPlans {
  fftw_plan forward = nullptr;  // REDFT10: Y_k = 2 sum_j x_j cos(pi (j + 1/2) k / n)
  fftw_plan inverse = nullptr;  // REDFT01: Y_j = X_0 + 2 sum_k X_k cos(pi (j + 1/2) k / n)
};

// Plans use FFTW_ESTIMATE so the chosen algorithm, and hence the rounding,
// is identical from run to run.
const DctPlans& plans_for(Index n) {
  static std::map<Index, DctPlans> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto in = fftw_buffer(n);
  auto out = fftw_buffer(n);
  DctPlans p;
  const int len = static_cast<int>(n);
  p.forward = fftw_plan_r2r_1d(len, in.get(), out.get(), FFTW_REDFT10, FFTW_ESTIMATE);
  p.inverse = fftw_plan_r2r_1d(len, in.get(), out.get(), FFTW_REDFT01, FFTW_ESTIMATE);
  if (!p.forward || !p.inverse) throw std::runtime_error("FFTW planning failed");
  return cache.emplace(n, p).first->second;
}

}  // namespace

Vector dct_orthonormal(const Vector& x) {
  const Index n = x.size();
  require(n >= 1, "dct_orthonormal: empty input");
  const DctPlans& p = plans_for(n);
  auto in = fftw_buffer(n);
  auto out = fftw_buffer(n);
  std::copy(x.data(), x.data() + n, in.get());
  fftw_execute_r2r(p.forward, in.get(), out.get());
  Vector y(n);
  const double s0 = 0.5 * std::sqrt(1.0 / static_cast<double>(n));
  const double sk = 0.5 * std::sqrt(2.0 / static_cast<double>(n));
  y[0] = out.get()[0] * s0;
  for (Index k = 1; k < n; ++k) y[k] = out.get()[k] * sk;
  return y;
}

Vector idct_orthonormal(const Vector& x) {
  const Index n = x.size();
  require(n >= 1, "idct_orthonormal: empty input");
  const DctPlans& p = plans_for(n);
  auto in = fftw_buffer(n);
  auto out = fftw_buffer(n);
  const double s0 = std::sqrt(1.0 / static_cast<double>(n));
  const double sk = 0.5 * std::sqrt(2.0 / static_cast<double>(n));
  in.get()[0] = x[0] * s0;
  for (Index k = 1; k < n; ++k) in.get()[k] = x[k] * sk;
  fftw_execute_r2r(p.inverse, in.get(), out.get());
  return Eigen::Map<const Vector>(out.get(), n);
}

namespace {

double dct_entry(Index k, Index j, Index n) {
  const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
  return scale * std::cos(std::numbers::pi * (j + 0.5) * static_cast<double>(k) / n);
}

}  // namespace

Vector dct_orthonormal_naive(const Vector& x) {
  const Index n = x.size();
  require(n >= 1, "dct_orthonormal_naive: empty input");
  Vector y = Vector::Zero(n);
  for (Index k = 0; k < n; ++k)
    for (Index j = 0; j < n; ++j) y[k] += dct_entry(k, j, n) * x[j];
  return y;
}

Vector idct_orthonormal_naive(const Vector& x) {
  const Index n = x.size();
  require(n >= 1, "idct_orthonormal_naive: empty input");
  Vector y = Vector::Zero(n);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k) y[j] += dct_entry(k, j, n) * x[k];
  return y;
}

namespace {

std::vector<Index> normalized_rows(Index n, std::vector<Index> rows) {
  require(n >= 1, "SubsampledDctOperator: n must be positive");
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  require(rows.empty() || (rows.front() >= 0 && rows.back() < n),
          "SubsampledDctOperator: row index out of range");
  return rows;
}

}  // namespace

SubsampledDctOperator::SubsampledDctOperator(Index n, std::vector<Index> rows, bool naive)
    : SubsampledDctOperator(n, normalized_rows(n, std::move(rows)), naive, 0) {}

SubsampledDctOperator::SubsampledDctOperator(Index n, std::vector<Index> sorted_rows, bool naive,
                                             int)
    : LinearOperator(static_cast<Index>(sorted_rows.size()), n),
      rows_(std::move(sorted_rows)),
      naive_(naive) {}

void SubsampledDctOperator::forward(const Vector& x, Vector& y) const {
  const Vector full = naive_ ? dct_orthonormal_naive(x) : dct_orthonormal(x);
  for (std::size_t i = 0; i < rows_.size(); ++i) y[static_cast<Index>(i)] = full[rows_[i]];
}

void SubsampledDctOperator::adjoint(const Vector& y, Vector& x) const {
  Vector full = Vector::Zero(cols());
  for (std::size_t i = 0; i < rows_.size(); ++i) full[rows_[i]] = y[static_cast<Index>(i)];
  x = naive_ ? idct_orthonormal_naive(full) : idct_orthonormal(full);
}

}  // namespace ssn
