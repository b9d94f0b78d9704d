#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ssn/prox.hpp"
#include "support.hpp"

using namespace ssn;

namespace {

Vector clamp_unit(const Vector& v) { return v.cwiseMax(-1.0).cwiseMin(1.0); }

}  // namespace

TEST_SUITE("prox") {

TEST_CASE("shrink examples") {
  Vector x(3);
  x << 2, -0.5, 0;
  Vector expect(3);
  expect << 1, 0, 0;
  CHECK(shrink(x, 1.0) == expect);
  CHECK(shrink(Vector::Zero(4), 0.3) == Vector::Zero(4));
  CHECK_THROWS_AS(shrink(x, 0.0), ContractError);
}

TEST_CASE("moreau decomposition of the l1 / linf-ball pair") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const double t = 0.1 + 2.0 * rng.uniform();
    const Vector x = test::random_vector(rng, 25, 2.0);
    const Vector gap = x - shrink(x, t) - t * clamp_unit(x / t);
    // x - (x - t) need not round to t, so allow a few ulps of max |x|
    CHECK(gap.lpNorm<Eigen::Infinity>() <= 4e-16 * std::max(1.0, x.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("shrink is nonexpansive and monotone") {
  Rng rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = test::random_vector(rng, 30);
    const Vector y = test::random_vector(rng, 30);
    const Vector px = shrink(x, 0.5), py = shrink(y, 0.5);
    CHECK((px - py).norm() <= (x - y).norm() + 1e-12);
    CHECK((x - y).dot(px - py) >= -1e-12);
  }
}

TEST_CASE("shrink jacobian mask") {
  Vector x(3);
  x << 2, -0.5, 0.3;
  CHECK(shrink_jacobian(x, 1.0).active == std::vector<std::uint8_t>{1, 0, 0});

  Vector big(4);
  big << 3, -2, 5, -1.5;
  const DiagonalJacobian all = shrink_jacobian(big, 1.0);
  CHECK(all.active_count() == 4);
  CHECK(all.apply(big) == big);

  // ties go to the inactive side
  Vector tie(2);
  tie << 1.0, -1.0;
  CHECK(shrink_jacobian(tie, 1.0).active_count() == 0);
}

TEST_CASE("jacobian is a 0/1 diagonal, hence psd") {
  Rng rng(41);
  const Vector x = test::random_vector(rng, 50);
  const DiagonalJacobian jac = shrink_jacobian(x, 0.8);
  for (auto a : jac.active) CHECK((a == 0 || a == 1));
  for (int trial = 0; trial < 20; ++trial) {
    const Vector v = test::random_vector(rng, 50);
    CHECK(v.dot(jac.apply(v)) >= 0.0);
  }
}

TEST_CASE("central differences of shrink match the mask") {
  Rng rng(43);
  const double threshold = 0.6, h = 1e-7;
  for (int trial = 0; trial < 50; ++trial) {
    Vector x = test::random_vector(rng, 20);
    // stay clear of the kinks so the difference quotient is exact up to rounding
    for (Index i = 0; i < x.size(); ++i)
      if (std::abs(std::abs(x[i]) - threshold) < 1e-3) x[i] += 0.01;
    const Vector d = test::random_vector(rng, 20);
    const Vector fd = (shrink(x + h * d, threshold) - shrink(x - h * d, threshold)) / (2 * h);
    const Vector md = shrink_jacobian(x, threshold).apply(d);
    CHECK((fd - md).norm() <= 1e-6 * std::max(md.norm(), 1.0));
  }
}

TEST_CASE("affine projection examples") {
  Matrix a(1, 2);
  a << 1, 0;
  AffineProjectionProx p(test::dense_op(a), Vector::Zero(1));
  Vector z(2);
  z << 1, 1;
  Vector expect(2);
  expect << 0, 1;
  CHECK((p.apply(z) - expect).norm() == 0.0);
  CHECK(p.op().count() == 2);

  Vector feasible(2);
  feasible << 0, 7;
  CHECK(affine_project(p, feasible) == feasible);
}

TEST_CASE("affine projection lands on the constraint set") {
  Rng rng(47);
  const Index n = 400, m = 50;
  auto op = std::make_shared<SubsampledDctOperator>(n, rng.sample_without_replacement(n, m));
  const Vector b = test::random_vector(rng, m);
  AffineProjectionProx p(op, b);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector z = test::random_vector(rng, n, 3.0);
    const Vector pz = p.apply(z);
    CHECK((op->apply(pz) - b).norm() <= 1e-10);
    // idempotent
    CHECK((p.apply(pz) - pz).norm() <= 1e-10);
  }
  // nonexpansive, as every projection is
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = test::random_vector(rng, n), y = test::random_vector(rng, n);
    const Vector px = p.apply(x), py = p.apply(y);
    CHECK((px - py).norm() <= (x - y).norm() + 1e-12);
    CHECK((x - y).dot(px - py) >= -1e-12);
  }
}

}
