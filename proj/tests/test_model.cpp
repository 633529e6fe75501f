#include <doctest.h>

#include <cmath>

#include "bcj/model.hpp"

using namespace bcj;

TEST_CASE("parameters from multiplicities") {
  auto a = params_from_multiplicities(0, 0, 1, 2);
  CHECK(a.kappa == 1);
  CHECK(a.q == doctest::Approx(1.5));
  CHECK(a.p == doctest::Approx(1.5));
  auto b = params_from_multiplicities(1, 0, 1, 2);
  CHECK(b.q == doctest::Approx(2.5));
  CHECK(b.p == doctest::Approx(1.5));
  // q = 2 + (1 - 0.2 + 0.4)/1, p = 2 + 1.4/1
  auto c = params_from_multiplicities(-0.1, 0.2, 0.5, 3);
  CHECK(c.q == doctest::Approx(3.2).epsilon(1e-14));
  CHECK(c.p == doctest::Approx(3.4).epsilon(1e-14));
  const auto m = multiplicities_from_params(c);
  CHECK(m.k1 == doctest::Approx(-0.1).epsilon(1e-14));
  CHECK(m.k2 == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(m.k3 == doctest::Approx(0.5));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(validate({1, 1.0, 5.0, 2}), ParamError);
  CHECK_THROWS_AS(validate({1, 5.0, 0.5, 2}), ParamError);
  CHECK_THROWS_AS(validate({0, 5.0, 5.0, 2}), ParamError);
  CHECK_NOTHROW(validate({1, 5.0, 5.0, 2}));
}

TEST_CASE("domain membership") {
  CHECK(in_domain({DomainKind::CompactAlcove, {-1, 0, 0, 1}}));
  CHECK_FALSE(in_domain({DomainKind::CompactAlcove, {0.2, 0.1}}));
  CHECK_FALSE(in_domain({DomainKind::CompactAlcove, {0.2, 1.1}}));
  CHECK(in_domain({DomainKind::NoncompactChamber, {1, 3}}));
  CHECK_FALSE(in_domain({DomainKind::NoncompactChamber, {0.9, 3}}));
  CHECK(is_interior({DomainKind::CompactAlcove, {-0.5, 0.5}}));
  CHECK_FALSE(is_interior({DomainKind::CompactAlcove, {-1, 0.5}}));
  CHECK_FALSE(is_interior({DomainKind::CompactAlcove, {0.5, 0.5}}));
}

TEST_CASE("compact drift") {
  const double p = 3, q = 2;
  auto v = drift_compact({DomainKind::CompactAlcove, {(p - q) / (p + q)}}, p, q);
  CHECK(std::abs(v[0]) < 1e-15);

  const double qq = 4, aa = 1 / std::sqrt(2 * qq - 1);
  v = drift_compact({DomainKind::CompactAlcove, {-aa, aa}}, qq, qq);
  CHECK(std::abs(v[0]) < 1e-13);
  CHECK(std::abs(v[1]) < 1e-13);

  const double x1 = -0.9, x2 = 0.9;
  v = drift_compact({DomainKind::CompactAlcove, {x1, x2}}, 3, 3);
  CHECK(v[0] == doctest::Approx(-6 * x1 + 2 * (1 - x1 * x2) / (x1 - x2)).epsilon(1e-14));
  CHECK(v[1] == doctest::Approx(-6 * x2 + 2 * (1 - x1 * x2) / (x2 - x1)).epsilon(1e-14));
  CHECK(v[0] == doctest::Approx(3.388888888888889));
}

TEST_CASE("noncompact drift is the negated compact formula") {
  const std::vector<double> x{1.1, 2.0, 3.5};
  const double p = 5, q = 4;
  const auto nc = drift_noncompact({DomainKind::NoncompactChamber, x}, p, q);
  std::vector<double> c(3);
  drift_compact_raw(x, p, q, c);
  for (int i = 0; i < 3; ++i) CHECK(nc[i] == doctest::Approx(-c[i]).epsilon(1e-14));

  const auto v = drift_noncompact({DomainKind::NoncompactChamber, {1.1, 2.0}}, 3, 3);
  CHECK(v[0] == doctest::Approx(6 * 1.1 + 2 * (1.1 * 2.0 - 1) / (1.1 - 2.0)));
  CHECK(v[1] == doctest::Approx(6 * 2.0 + 2 * (1.1 * 2.0 - 1) / (2.0 - 1.1)));

  const double eps = 1e-3;
  const auto w = drift_noncompact({DomainKind::NoncompactChamber, {1 + eps}}, 2, 3);
  CHECK(w[0] == doctest::Approx(1 + 5 * (1 + eps)));
  CHECK(w[0] > 0);
}

TEST_CASE("drift refuses ties") {
  CHECK_THROWS_AS(drift_compact({DomainKind::CompactAlcove, {0.1, 0.1}}, 3, 3), SingularConfiguration);
}

TEST_CASE("regime scalings") {
  const double p = 400, q = 300;
  const int N = 10;
  auto s = regime_scaling(Regime::WignerStationary, p, q, N);
  CHECK(s.a == doctest::Approx(q / std::sqrt(N * p)));
  CHECK(s.b == doctest::Approx((p - q) / (p + q)));
  CHECK(s.s == doctest::Approx(p + q));
  s = regime_scaling(Regime::MPStationary, p, q, N);
  CHECK(s.a == doctest::Approx(q / N));
  CHECK(s.b == -1);
  s = regime_scaling(Regime::NCMPTimeInverted, p, q, N);
  CHECK(s.a == doctest::Approx(p / N));
  CHECK(s.b == 1);
  for (auto r : {Regime::WignerStationary, Regime::MPLocal, Regime::NCWignerLocal})
    CHECK(parse_regime(regime_name(r)) == r);
}
