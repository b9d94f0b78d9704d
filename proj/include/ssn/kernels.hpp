#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace ssn::kernels {

// Reductions are accumulated per fixed-size block and the block partials are
// summed in block order, so results do not depend on the thread count.
inline constexpr std::size_t kBlock = 4096;

// Vectors shorter than this run on the calling thread.
inline constexpr std::size_t kParallelThreshold = 1u << 15;

/// Threads used by the parallel kernels on the calling thread. Defaults to
/// omp_get_max_threads(); bench workers set 1 so that runs do not nest teams.
int threads();
void set_threads(int n);

namespace serial {

double dot(std::span<const double> x, std::span<const double> y);
double squared_norm(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);
void axpby(double a, std::span<const double> x, double b, std::span<double> y);
void shrink(std::span<const double> x, double threshold, std::span<double> out,
            std::span<std::uint8_t> mask);

}  // namespace serial

namespace parallel {

double dot(std::span<const double> x, std::span<const double> y);
double squared_norm(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);
void axpby(double a, std::span<const double> x, double b, std::span<double> y);
void shrink(std::span<const double> x, double threshold, std::span<double> out,
            std::span<std::uint8_t> mask);

}  // namespace parallel

// Entry points used by the library.
double dot(std::span<const double> x, std::span<const double> y);
double squared_norm(std::span<const double> x);
double norm(std::span<const double> x);
/// y += a x
void axpy(double a, std::span<const double> x, std::span<double> y);
/// y = a x + b y
void axpby(double a, std::span<const double> x, double b, std::span<double> y);
/// out_i = sign(x_i) max(|x_i| - threshold, 0); mask_i = |x_i| > threshold.
/// Either output may be empty to skip it.
void shrink(std::span<const double> x, double threshold, std::span<double> out,
            std::span<std::uint8_t> mask);

}  // namespace ssn::kernels
