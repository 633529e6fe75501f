#include <doctest.h>

#include <cmath>
#include <random>

#include "bcj/freeprob.hpp"
#include "bcj/jacobi_poly.hpp"
#include "bcj/moments.hpp"

using namespace bcj;

TEST_CASE("empirical moments") {
  const double a = 3, b = 0.25;
  auto m = empirical_moments({b, b, b}, a, b, 5);
  CHECK(m.m == std::vector<double>{1, 0, 0, 0, 0, 0});
  m = empirical_moments({b - 1 / a, b + 1 / a}, a, b, 6);
  for (int l = 0; l <= 6; ++l) CHECK(m[l] == doctest::Approx((1 + (l % 2 ? -1 : 1)) / 2.0));

  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> x(4);
  for (auto& v : x) v = u(g);
  m = empirical_moments(x, 1.3, -0.2, 10);
  for (int l = 0; l <= 10; ++l) {
    long double s = 0;
    for (double v : x) s += std::pow(1.3L * ((long double)v + 0.2L), l);
    CHECK(m[l] == doctest::Approx(double(s / 4)).epsilon(1e-14));
  }
}

TEST_CASE("first moment decays exponentially") {
  const double p = 8, q = 5, N = 3;
  const double a = 2, b = (p - q) / (p + q);
  const auto S0 = empirical_moments({-0.3, 0.2, 0.5}, a, b, 4);
  const std::vector<double> ts{0.1, 0.3};
  const auto S = moment_ode_oracle(S0, p, q, a, b, N, ts);
  for (size_t k = 0; k < ts.size(); ++k)
    CHECK(S[k][1] == doctest::Approx(S0[1] * std::exp(-(p + q) * ts[k])).epsilon(1e-10));
}

TEST_CASE("stationary moments do not move") {
  const int N = 6;
  const double p = 14, q = 9, a = 2.5, b = 0.1;
  const auto z = jacobi_zeros({N, q - N, p - N});
  const auto rhs = moment_ode_rhs(empirical_moments(z, a, b, 8).m, p, q, a, b, N);
  for (double v : rhs) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("Wigner stationary limit is a semicircle") {
  RegimeLimitSpec sp;
  sp.regime.kind = Regime::WignerStationary;
  sp.regime.k.C = 0.5;
  sp.t = 40;
  sp.mu0 = delta_moments(0, 8);
  const auto m = limit_recursion(sp);
  const auto sc = semicircle_moments(4 * std::pow(1.5, -1.5), 8);
  for (int l = 0; l <= 8; ++l) CHECK(std::abs(m[l] - sc[l]) < 1e-12);
}

TEST_CASE("local limit at time zero") {
  RegimeLimitSpec sp;
  sp.regime.kind = Regime::WignerLocal;
  sp.regime.k.B = 0.2;
  sp.t = 0;
  sp.mu0 = mp_moments(1.5, 0.7, 6);
  const auto m = limit_recursion(sp);
  for (int l = 0; l <= 6; ++l) CHECK(m[l] == doctest::Approx(sp.mu0[l]));
}

TEST_CASE("MP stationary first moment") {
  RegimeLimitSpec sp;
  sp.regime.kind = Regime::MPStationary;
  sp.regime.k.phat = 2.5;
  sp.mu0 = delta_moments(0, 4);
  for (double t : {0.01, 0.1, 1.0}) {
    sp.t = t;
    CHECK(limit_recursion(sp)[1] == doctest::Approx(2 * 2.5 * (1 - std::exp(-t))).epsilon(1e-12));
    CHECK(limit_recursion(sp, -1, LimitMethod::RK4, 1e-4)[1] ==
          doctest::Approx(2 * 2.5 * (1 - std::exp(-t))).epsilon(1e-10));
  }
}

TEST_CASE("moment growth bound") {
  CHECK(growth_bound_check(delta_moments(0, 12), 0.1));
  CHECK(growth_bound_check(semicircle_moments(2, 12), 1));
  MomentVector f;
  f.m = {1};
  double v = 1;
  for (int l = 1; l <= 12; ++l) f.m.push_back(v *= l * 10.0);
  CHECK_FALSE(growth_bound_check(f, 1));
}

TEST_CASE("consistency flags") {
  MomentVector m;
  m.m = {1, 2, 3};
  m.nonneg = true;
  CHECK_FALSE(m.consistent());
  m.m = {1, 1, 2};
  CHECK(m.consistent());
}
