#include "ssn/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <vector>

#include <omp.h>

namespace ssn::kernels {

namespace {

thread_local int tl_threads = 0;

inline void shrink_one(double xi, double threshold, double* out, std::uint8_t* mask) {
  const double a = std::fabs(xi);
  const bool active = a > threshold;
  if (out) *out = active ? std::copysign(a - threshold, xi) : 0.0;
  if (mask) *mask = active ? 1 : 0;
}

template <class BlockFn>
double blocked_sum(std::size_t n, BlockFn&& block, bool in_parallel) {
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  if (nblocks <= 1) return n == 0 ? 0.0 : block(0, n);
  std::vector<double> partial(nblocks);
  const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static) num_threads(threads()) if (in_parallel)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    partial[b] = block(lo, hi);
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

double blocked_dot(std::span<const double> x, std::span<const double> y, bool par) {
  return blocked_sum(
      x.size(),
      [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
        return s;
      },
      par);
}

double blocked_sq(std::span<const double> x, bool par) {
  return blocked_sum(
      x.size(),
      [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i] * x[i];
        return s;
      },
      par);
}

bool go_parallel(std::size_t n) { return n >= kParallelThreshold && threads() > 1; }

}  // namespace

int threads() {
  if (tl_threads <= 0) tl_threads = omp_get_max_threads();
  return tl_threads;
}

void set_threads(int n) { tl_threads = n < 1 ? 1 : n; }

namespace serial {

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b * y[i];
}

void shrink(std::span<const double> x, double threshold, std::span<double> out,
            std::span<std::uint8_t> mask) {
  double* o = out.empty() ? nullptr : out.data();
  std::uint8_t* m = mask.empty() ? nullptr : mask.data();
  for (std::size_t i = 0; i < x.size(); ++i)
    shrink_one(x[i], threshold, o ? o + i : nullptr, m ? m + i : nullptr);
}

}  // namespace serial

namespace parallel {

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return blocked_dot(x, y, true);
}

double squared_norm(std::span<const double> x) { return blocked_sq(x, true); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) num_threads(threads())
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
  assert(x.size() == y.size());
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) num_threads(threads())
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void shrink(std::span<const double> x, double threshold, std::span<double> out,
            std::span<std::uint8_t> mask) {
  double* o = out.empty() ? nullptr : out.data();
  std::uint8_t* m = mask.empty() ? nullptr : mask.data();
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) num_threads(threads())
  for (std::ptrdiff_t i = 0; i < n; ++i)
    shrink_one(x[i], threshold, o ? o + i : nullptr, m ? m + i : nullptr);
}

}  // namespace parallel

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return blocked_dot(x, y, go_parallel(x.size()));
}

double squared_norm(std::span<const double> x) { return blocked_sq(x, go_parallel(x.size())); }

double norm(std::span<const double> x) { return std::sqrt(squared_norm(x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (go_parallel(x.size()))
    parallel::axpy(a, x, y);
  else
    serial::axpy(a, x, y);
}

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
  if (go_parallel(x.size()))
    parallel::axpby(a, x, b, y);
  else
    serial::axpby(a, x, b, y);
}

void shrink(std::span<const double> x, double threshold, std::span<double> out,
            std::span<std::uint8_t> mask) {
  assert(out.empty() || out.size() == x.size());
  assert(mask.empty() || mask.size() == x.size());
  if (go_parallel(x.size()))
    parallel::shrink(x, threshold, out, mask);
  else
    serial::shrink(x, threshold, out, mask);
}

}  // namespace ssn::kernels
