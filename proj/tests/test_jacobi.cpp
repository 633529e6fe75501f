#include <doctest.h>

#include <cmath>

#include "bcj/jacobi_poly.hpp"
#include "bcj/model.hpp"

using namespace bcj;

namespace {

// (alpha+1)_n / n! * 2F1(-n, n+alpha+beta+1; alpha+1; (1-x)/2)
double jacobi_series(int n, double a, double b, double x) {
  double pre = 1;
  for (int k = 1; k <= n; ++k) pre *= (a + k) / k;
  const double z = 0.5 * (1 - x);
  double term = 1, sum = 1;
  for (int k = 0; k < n; ++k) {
    term *= (-n + k) * (n + a + b + 1 + k) / ((a + 1 + k) * (k + 1.0)) * z;
    sum += term;
  }
  return pre * sum;
}

}  // namespace

TEST_CASE("eval_jacobi") {
  CHECK(eval_jacobi({0, 2.5, -0.3}, 0.7) == 1);
  CHECK(std::abs(eval_jacobi({1, 3, 3}, 0.0)) < 1e-15);
  CHECK(eval_jacobi({3, 0.5, 1.5}, 0.3) == doctest::Approx(jacobi_series(3, 0.5, 1.5, 0.3)).epsilon(1e-13));
  for (double x : {-0.95, -0.2, 0.4, 0.99})
    CHECK(eval_jacobi({7, 2.2, 0.4}, x) == doctest::Approx(jacobi_series(7, 2.2, 0.4, x)).epsilon(1e-11));
}

TEST_CASE("low degree zeros") {
  auto z = jacobi_zeros({1, 2, 5});
  REQUIRE(z.size() == 1);
  CHECK(z[0] == doctest::Approx(3.0 / 9.0));

  const double a = 3;
  z = jacobi_zeros({2, a, a});
  CHECK(z[0] == doctest::Approx(-1 / std::sqrt(2 * a + 3)).epsilon(1e-14));
  CHECK(z[1] == doctest::Approx(1 / std::sqrt(2 * a + 3)).epsilon(1e-14));
  const auto v = drift_compact({DomainKind::CompactAlcove, z}, a + 2, a + 2);
  CHECK(std::abs(v[0]) < 1e-12);
  CHECK(std::abs(v[1]) < 1e-12);
}

TEST_CASE("zeros bracketed by sign changes") {
  const JacobiParams jp{5, 5, 5};
  const auto z = jacobi_zeros(jp);
  REQUIRE(z.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(z[i] == doctest::Approx(-z[4 - i]).epsilon(1e-13));
  std::vector<double> changes;
  const int M = 20000;
  double prev = eval_jacobi(jp, -1);
  for (int k = 1; k <= M; ++k) {
    const double x = -1 + 2.0 * k / M;
    const double cur = eval_jacobi(jp, x);
    if ((prev < 0) != (cur < 0)) changes.push_back(x - 1.0 / M);
    prev = cur;
  }
  REQUIRE(changes.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(std::abs(z[i] - changes[i]) <= 1.0 / M + 1e-12);
}

TEST_CASE("zeros are stationary for large parameters") {
  // Large alpha makes the zeros cluster tightly; Newton polish must not fall back to bisection.
  for (int N : {50, 100, 400}) {
    const double p = double(N) * N, q = std::pow(N, 1.8);
    const auto z = jacobi_zeros({N, q - N, p - N});
    for (int i = 1; i < N; ++i) REQUIRE(z[i] > z[i - 1]);
    const auto v = drift_compact({DomainKind::CompactAlcove, z}, p, q);
    double worst = 0;
    for (double d : v) worst = std::max(worst, std::abs(d));
    CHECK(worst / (p + q) < 1e-9);
  }
}

TEST_CASE("relative residual is small at zeros") {
  const JacobiParams jp{30, 12.5, 40};
  for (double z : jacobi_zeros(jp)) CHECK(jacobi_relative_residual(jp, z) < 1e-10);
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS(jacobi_zeros({0, 1, 1}));
  CHECK_THROWS(jacobi_zeros({3, -1.5, 1}));
}

TEST_CASE("zeros interlace across degrees") {
  for (int n = 2; n <= 12; ++n) {
    const auto hi = jacobi_zeros({n, 1.5, 4.0}), lo = jacobi_zeros({n - 1, 1.5, 4.0});
    for (int i = 0; i < n - 1; ++i) {
      CHECK(hi[i] < lo[i]);
      CHECK(lo[i] < hi[i + 1]);
    }
  }
}
