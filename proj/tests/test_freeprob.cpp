#include <doctest.h>

#include <cmath>
#include <random>

#include "bcj/freeprob.hpp"
#include "bcj/moments.hpp"

using namespace bcj;

namespace {

void check_close(const MomentVector& a, const MomentVector& b, double tol) {
  REQUIRE(a.L() == b.L());
  for (int l = 0; l <= a.L(); ++l) CHECK(std::abs(a[l] - b[l]) <= tol * std::max(1.0, std::abs(b[l])));
}

MomentVector bernoulli(int L) {
  MomentVector m;
  for (int l = 0; l <= L; ++l) m.m.push_back(l % 2 ? 0.0 : 1.0);
  return m;
}

}  // namespace

TEST_CASE("cumulants of the basic laws") {
  auto k = moments_to_cumulants(semicircle_moments(2, 8));
  CHECK(k[2] == doctest::Approx(1));
  for (int n : {1, 3, 4, 5, 6, 7, 8}) CHECK(std::abs(k[n]) < 1e-13);
  k = moments_to_cumulants(delta_moments(0.7, 6));
  CHECK(k[1] == doctest::Approx(0.7));
  for (int n = 2; n <= 6; ++n) CHECK(std::abs(k[n]) < 1e-13);
  const double c = 1.7, t = 0.6;
  k = moments_to_cumulants(mp_moments(c, t, 8));
  for (int n = 1; n <= 8; ++n) CHECK(k[n] == doctest::Approx(c * std::pow(t, n)).epsilon(1e-12));
}

TEST_CASE("moments from cumulants") {
  std::vector<double> k(7, 0.0);
  k[2] = 1;
  const auto m = cumulants_to_moments(k);
  const std::vector<double> cat{1, 0, 1, 0, 2, 0, 5};
  for (int l = 0; l <= 6; ++l) CHECK(m[l] == doctest::Approx(cat[l]));
  const double t = 0.8;
  std::vector<double> kt{0, t, t * t, t * t * t};
  const auto mt = cumulants_to_moments(kt);
  CHECK(mt[1] == doctest::Approx(t));
  CHECK(mt[2] == doctest::Approx(2 * t * t));
  CHECK(mt[3] == doctest::Approx(5 * t * t * t));
}

TEST_CASE("cumulant round trip") {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> k(11, 0.0);
    for (int n = 1; n <= 10; ++n) k[n] = u(g);
    const auto back = moments_to_cumulants(cumulants_to_moments(k));
    for (int n = 1; n <= 10; ++n) CHECK(std::abs(back[n] - k[n]) < 1e-12);
  }
}

TEST_CASE("free convolution") {
  const int L = 8;
  check_close(free_add(delta_moments(0.3, L), delta_moments(-1.1, L)), delta_moments(-0.8, L), 1e-13);
  check_close(free_add(mp_moments(0.5, 1.3, L), mp_moments(2.0, 1.3, L)), mp_moments(2.5, 1.3, L), 1e-12);
  check_close(free_add(semicircle_moments(1.5, L), semicircle_moments(2.0, L)), semicircle_moments(2.5, L), 1e-12);
}

TEST_CASE("dilation") {
  const int L = 8;
  const auto m = mp_moments(1.2, 0.9, L);
  check_close(scale_measure(1, m), m, 0);
  const auto sc = semicircle_moments(1.7, L);
  check_close(scale_measure(-1, sc), sc, 0);
  const double v = -1.6;
  const auto ka = moments_to_cumulants(scale_measure(v, m));
  const auto kb = moments_to_cumulants(m);
  for (int n = 1; n <= L; ++n) CHECK(ka[n] == doctest::Approx(std::pow(v, n) * kb[n]).epsilon(1e-11));
  check_close(scale_measure(0, m), delta_moments(0, L), 0);
}

TEST_CASE("even square root and square") {
  check_close(even_sqrt(delta_moments(1, 4)), bernoulli(8), 1e-15);
  check_close(even_sqrt(delta_moments(0, 4)), delta_moments(0, 8), 0);
  const auto es = even_sqrt(mp_moments(1, 1, 3));
  CHECK(es[2] == doctest::Approx(1));
  CHECK(es[4] == doctest::Approx(2));
  CHECK(es[6] == doctest::Approx(5));
  check_close(square_measure(bernoulli(8)), delta_moments(1, 4), 1e-15);
  for (double lam : {0.5, 2.0, 3.1}) check_close(square_measure(semicircle_moments(lam, 10)), mp_moments(1, lam * lam / 4, 5), 1e-12);
  const auto mu = mp_moments(2.2, 0.4, 5);
  check_close(square_measure(even_sqrt(mu)), mu, 1e-14);
  CHECK_THROWS(square_measure(mp_moments(1, 1, 6)));
  CHECK_THROWS(even_sqrt(semicircle_moments(2, 6)));
}

TEST_CASE("expression trees") {
  check_close(MeasureExpr::semicircle(0).evaluate(6), delta_moments(0, 6), 0);
  const auto e = MeasureExpr::free_add({MeasureExpr::dirac(1), MeasureExpr::scale(2, MeasureExpr::semicircle(1))});
  CHECK(e.evaluate(2)[1] == doctest::Approx(1));
  CHECK(e.evaluate(2)[2] == doctest::Approx(1 + 1));
  CHECK(MeasureExpr::marchenko_pastur(1, 1).nonneg());
}

TEST_CASE("limit predictions") {
  const int L = 8;
  const auto sym = bernoulli(L);
  ScalingRegime ws{Regime::WignerStationary, {}};
  ws.k.C = 0.4;
  check_close(predict_limit(ws, 0, sym, L), sym, 1e-13);

  ScalingRegime mps{Regime::MPStationary, {}};
  mps.k.phat = 1.5;
  for (double t : {0.2, 1.0, 4.0})
    check_close(predict_limit(mps, t, delta_moments(0, L), L), mp_moments(1.5, 2 * (1 - std::exp(-t)), L), 1e-11);

  // MP(r, s) under the local flow: MP(r, 2t + s) + MP(1 - r, 2t)
  ScalingRegime mpl{Regime::MPLocal, {}};
  mpl.k.phat = 1;
  const double r = 0.4, s = 1.5, t = 0.7;
  check_close(predict_limit(mpl, t, mp_moments(r, s, L), L),
              free_add(mp_moments(r, 2 * t + s, L), mp_moments(1 - r, 2 * t, L)), 1e-11);
}
