#include <doctest.h>

#include <cmath>
#include <vector>

#include "ssn/kernels.hpp"
#include "support.hpp"

using namespace ssn;

TEST_SUITE("kernels") {

TEST_CASE("parallel kernels match the serial reference") {
  Rng rng(23);
  // below and above the parallel threshold, and a ragged tail block
  for (std::size_t n : {std::size_t{7}, std::size_t{5000}, kernels::kParallelThreshold + 12345}) {
    const Vector x = test::random_vector(rng, static_cast<Index>(n));
    const Vector y = test::random_vector(rng, static_cast<Index>(n));

    // the serial sum runs left to right, the parallel one by blocks
    const double scale = x.norm() * y.norm();
    CHECK(std::abs(kernels::parallel::dot(view(x), view(y)) - kernels::serial::dot(view(x), view(y))) <=
          1e-14 * scale);
    CHECK(kernels::parallel::squared_norm(view(x)) ==
          doctest::Approx(kernels::serial::squared_norm(view(x))).epsilon(1e-14));

    Vector a = y, b = y;
    kernels::serial::axpy(0.3, view(x), view(a));
    kernels::parallel::axpy(0.3, view(x), view(b));
    CHECK(a == b);

    a = y;
    b = y;
    kernels::serial::axpby(-1.5, view(x), 0.25, view(a));
    kernels::parallel::axpby(-1.5, view(x), 0.25, view(b));
    CHECK(a == b);

    Vector s1(x.size()), s2(x.size());
    std::vector<std::uint8_t> m1(n), m2(n);
    kernels::serial::shrink(view(x), 0.7, view(s1), m1);
    kernels::parallel::shrink(view(x), 0.7, view(s2), m2);
    CHECK(s1 == s2);
    CHECK(m1 == m2);
  }
}

TEST_CASE("results do not depend on the thread count") {
  Rng rng(29);
  const Index n = static_cast<Index>(kernels::kParallelThreshold) * 3 + 77;
  const Vector x = test::random_vector(rng, n);
  const Vector y = test::random_vector(rng, n);
  const int saved = kernels::threads();
  kernels::set_threads(1);
  const double one = kernels::dot(view(x), view(y));
  kernels::set_threads(3);
  const double three = kernels::dot(view(x), view(y));
  kernels::set_threads(saved);
  CHECK(one == three);
}

TEST_CASE("shrink kernel skips empty outputs") {
  Vector x(3);
  x << 2, -0.5, 0;
  std::vector<std::uint8_t> mask(3);
  kernels::shrink(view(x), 1.0, {}, mask);
  CHECK(mask == std::vector<std::uint8_t>{1, 0, 0});
  Vector out(3);
  kernels::shrink(view(x), 1.0, view(out), {});
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 0.0);
}

}
