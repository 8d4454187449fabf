#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "openset/errors.hpp"
#include "openset/matkernel.hpp"
#include "test_util.hpp"

using namespace openset;
using namespace openset::testing;

namespace {

// Stirling series with four correction terms; accurate to ~1e-15 relative
// for x >= 10 and entirely independent of std::lgamma.
double stirling_log_gamma(double x) {
  const double x2 = x * x;
  return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) +
         1.0 / (12.0 * x) - 1.0 / (360.0 * x * x2) + 1.0 / (1260.0 * x * x2 * x2) -
         1.0 / (1680.0 * x * x2 * x2 * x2);
}

}  // namespace

TEST_CASE("SymMatrix symmetrizes and rejects non-square input") {
  const SymMatrix s(mat2(1.0, 2.0, 4.0, 5.0));
  CHECK(s(0, 1) == 3.0);
  CHECK(s(1, 0) == 3.0);
  CHECK_THROWS_AS(SymMatrix(Matrix(2, 3)), ShapeMismatch);
  CHECK_THROWS_AS(SymMatrix(Matrix(0, 0)), EmptyDimension);
}

TEST_CASE("cholesky worked examples") {
  const CholeskyFactor id = cholesky(SymMatrix::identity(2));
  CHECK(id.lower() == Matrix::Identity(2, 2));

  const CholeskyFactor l = cholesky(SymMatrix(mat2(4, 2, 2, 3)));
  CHECK(l.lower()(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(l.lower()(0, 1) == 0.0);
  CHECK(l.lower()(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(l.lower()(1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  CHECK_THROWS_AS(cholesky(SymMatrix(mat2(1, 2, 2, 1))), NotPositiveDefinite);
}

TEST_CASE("cholesky pivot tolerance is relative to the largest diagonal entry") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1e6;
  m(1, 1) = 1e6 * 5e-13;
  CHECK_THROWS_AS(cholesky(SymMatrix(m)), NotPositiveDefinite);
  m(1, 1) = 1e6 * 5e-12;
  CHECK_NOTHROW(cholesky(SymMatrix(m)));
  CHECK_THROWS_AS(cholesky(SymMatrix::zero(3)), NotPositiveDefinite);
}

TEST_CASE("logdet examples") {
  CHECK(logdet(cholesky(SymMatrix::identity(3))) == 0.0);
  CHECK(logdet(cholesky(SymMatrix(mat2(4, 2, 2, 3)))) == doctest::Approx(std::log(8.0)).epsilon(1e-14));
  CHECK(logdet(cholesky(SymMatrix(mat2(2, 0, 0, 5)))) == doctest::Approx(std::log(10.0)).epsilon(1e-14));
}

TEST_CASE("solve examples") {
  const Vector a = solve(cholesky(SymMatrix::identity(2)), vec({3, 4}));
  CHECK(a(0) == 3.0);
  CHECK(a(1) == 4.0);
  const Vector b = solve(cholesky(SymMatrix(mat2(2, 0, 0, 5))), vec({2, 5}));
  CHECK(b(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b(1) == doctest::Approx(1.0).epsilon(1e-15));
  const Vector c = solve(cholesky(SymMatrix(mat2(4, 2, 2, 3))), vec({6, 5}));
  CHECK(c(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c(1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(solve(cholesky(SymMatrix::identity(2)), vec({1, 2, 3})), DimensionMismatch);
}

TEST_CASE("quadform examples") {
  CHECK(quadform(cholesky(SymMatrix::identity(2)), vec({3, 4})) == 25.0);
  CHECK(quadform(cholesky(SymMatrix(mat2(2, 0, 0, 5))), vec({2, 5})) ==
        doctest::Approx(7.0).epsilon(1e-15));
  CHECK(quadform(cholesky(SymMatrix(mat2(4, 2, 2, 3))), Vector::Zero(2)) == 0.0);
  CHECK_THROWS_AS(quadform(cholesky(SymMatrix::identity(3)), vec({1})), DimensionMismatch);
}

TEST_CASE("log_gamma anchors and domain") {
  CHECK(log_gamma(1.0) == doctest::Approx(0.0));
  CHECK(std::abs(log_gamma(1.0)) < 1e-15);
  CHECK(std::abs(log_gamma(5.0) - std::log(24.0)) < 1e-14);
  CHECK(std::abs(log_gamma(0.5) - 0.5 * std::log(std::numbers::pi)) < 1e-15);
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-1.5), DomainError);
  CHECK_THROWS_AS(log_gamma(std::nan("")), DomainError);
}

TEST_CASE("log_gamma satisfies the recurrence on a grid") {
  // log Gamma(x+1) = log x + log Gamma(x). Absolute error 1e-12 is reachable
  // while |log Gamma| stays below ~1e3; beyond that double precision only
  // supports a relative bound.
  for (double x = 1e-3; x < 1e6; x *= 1.37) {
    const double lhs = log_gamma(x + 1.0);
    const double rhs = std::log(x) + log_gamma(x);
    const double tol = std::max(1e-12, 4e-16 * std::abs(lhs));
    CHECK_MESSAGE(std::abs(lhs - rhs) < tol, "x = " << x);
  }
}

TEST_CASE("log_gamma agrees with an independent Stirling series") {
  for (double x = 10.0; x < 1e6; x *= 1.91) {
    const double expected = stirling_log_gamma(x);
    CHECK_MESSAGE(std::abs(log_gamma(x) - expected) < std::max(1e-12, 1e-15 * expected),
                  "x = " << x);
  }
}

TEST_CASE("log_multivariate_gamma examples") {
  for (double x : {0.3, 1.0, 2.5, 17.0}) {
    CHECK(log_multivariate_gamma(1, x) == log_gamma(x));
  }
  CHECK(std::abs(log_multivariate_gamma(2, 1.5) - std::log(std::numbers::pi / 2.0)) < 1e-14);
  // pi^{N(N-1)/4} = pi^{1/2}, times Gamma(1) Gamma(1/2) = pi^{1/2}
  CHECK(std::abs(log_multivariate_gamma(2, 1.0) - std::log(std::numbers::pi)) < 1e-14);
  CHECK_THROWS_AS(log_multivariate_gamma(2, 0.5), DomainError);
  CHECK_THROWS_AS(log_multivariate_gamma(3, 0.9), DomainError);
  CHECK_THROWS_AS(log_multivariate_gamma(0, 2.0), DomainError);
}

TEST_CASE("log_multivariate_gamma is increasing once every factor passes the lgamma minimum") {
  // lgamma bottoms out at 1.4616..., so the smallest argument must exceed it
  const double lgamma_min = 1.4616321449683623;
  for (std::size_t n = 1; n <= 6; ++n) {
    const double start = (static_cast<double>(n) - 1.0) / 2.0 + lgamma_min;
    double prev = log_multivariate_gamma(n, start);
    for (double x = start + 0.05; x < start + 40.0; x += 0.05) {
      const double cur = log_multivariate_gamma(n, x);
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("property: random SPD round trip, solve and quadform consistency") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 1 + trial % 8;
    const SymMatrix a = random_spd(rng, n);
    const CholeskyFactor l = cholesky(a);
    CHECK((l.lower().diagonal().array() > 0.0).all());
    CHECK(l.lower().isLowerTriangular(0.0));
    CHECK(rel_frobenius(l.lower() * l.lower().transpose(), a.matrix()) < 1e-10);

    const Vector b = random_matrix(rng, n, 1).col(0);
    const Vector x = solve(l, b);
    CHECK((a.matrix() * x - b).norm() / b.norm() < 1e-8);

    const double q = quadform(l, b);
    CHECK(q >= 0.0);
    CHECK(std::abs(q - b.dot(x)) <= 1e-10 * std::abs(q));

    CHECK(rel_frobenius(inverse(l) * a.matrix(), Matrix::Identity(n, n)) < 1e-8);
  }
}

TEST_CASE("property: 2x2 logdet matches the explicit determinant") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const SymMatrix a = random_spd(rng, 2);
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    CHECK(std::abs(logdet(cholesky(a)) - std::log(det)) < 1e-12 * std::max(1.0, std::abs(std::log(det))) + 1e-12);
  }
}

TEST_CASE("is_positive_semidefinite") {
  CHECK(is_positive_semidefinite(SymMatrix::zero(2)));
  CHECK(is_positive_semidefinite(SymMatrix(mat2(1, 1, 1, 1))));
  CHECK_FALSE(is_positive_semidefinite(SymMatrix(mat2(1, 2, 2, 1))));
}
