#include <doctest.h>

#include <cmath>

#include "bcj/freeprob.hpp"
#include "bcj/detflow.hpp"
#include "bcj/harness.hpp"
#include "bcj/jacobi_poly.hpp"
#include "bcj/moments.hpp"

using namespace bcj;

TEST_CASE("Dirac start sits at the center") {
  const Scaling sc{4, 0.3, 1};
  const auto s = make_start(7, sc, DomainKind::CompactAlcove, delta_moments(0, 8));
  for (double v : s.state.x) CHECK(v == doctest::Approx(0.3));
}

TEST_CASE("two-point start") {
  const Scaling sc{4, 0.3, 1};
  MomentVector two;
  for (int l = 0; l <= 8; ++l) two.m.push_back(l % 2 ? 0.0 : 1.0);
  const auto s = make_start(10, sc, DomainKind::CompactAlcove, two);
  for (int i = 0; i < 5; ++i) CHECK(s.state.x[i] == doctest::Approx(0.3 - 0.25));
  for (int i = 5; i < 10; ++i) CHECK(s.state.x[i] == doctest::Approx(0.3 + 0.25));
}

TEST_CASE("MP start reproduces the moments") {
  const int N = 500;
  const Scaling sc{N / 3.0, -1, 1};
  const auto mu = mp_moments(1, 1, 16);
  const auto s = make_start(N, sc, DomainKind::CompactAlcove, mu);
  const auto em = empirical_moments(s.state.x, sc.a, sc.b, 6);
  for (int l = 1; l <= 6; ++l) CHECK(std::abs(em[l] - mu[l]) < 0.02 * mu[l]);
}

TEST_CASE("start outside the domain is refused") {
  const Scaling sc{1, 0.9, 1};
  CHECK_THROWS_AS(make_start(4, sc, DomainKind::CompactAlcove, delta_moments(1, 8)), InfeasibleStartError);
}

TEST_CASE("Gauss rule from moments") {
  std::vector<double> x, w;
  gauss_rule_from_moments(semicircle_moments(2, 16), 4, x, w);
  REQUIRE(x.size() == 4);
  double sw = 0;
  for (double v : w) sw += v;
  CHECK(sw == doctest::Approx(1));
  const auto sc = semicircle_moments(2, 7);
  for (int l = 0; l <= 7; ++l) {
    double m = 0;
    for (size_t i = 0; i < x.size(); ++i) m += w[i] * std::pow(x[i], l);
    CHECK(std::abs(m - sc[l]) < 1e-12);
  }
}

TEST_CASE("hypotheses are checked before running") {
  Experiment e;
  e.regime.kind = Regime::WignerStationary;
  e.N_list = {10, 20, 40};
  e.rule.p = {2, 1, 0};
  e.rule.q = {2, 1, 0};
  e.t_list = {1};
  CHECK_FALSE(check_hypotheses(e).empty());
  CHECK_THROWS_AS(run_experiment(e), HypothesisError);
  e.rule.p = {1, 2, 0};
  e.rule.q = {1, 1.8, 0};
  CHECK(check_hypotheses(e).empty());
}

TEST_CASE("frozen Wigner gap shrinks") {
  Experiment e;
  e.regime.kind = Regime::WignerStationary;
  e.N_list = {50, 100, 200};
  e.rule.p = {1, 2, 0};
  e.rule.q = {1, 1.8, 0};
  e.rule.swap_pq = true;
  e.t_list = {1};
  e.L = 4;
  const auto rep = run_experiment(e);
  const double g50 = rep.find(50, 1, 2)->relgap, g100 = rep.find(100, 1, 2)->relgap, g200 = rep.find(200, 1, 2)->relgap;
  CHECK(g100 < g50);
  CHECK(g200 < g100);
  CHECK(g200 < 0.02);
}

TEST_CASE("stationary start stays put") {
  Experiment e;
  e.regime.kind = Regime::WignerStationary;
  e.N_list = {20};
  e.rule.p = {1, 2, 0};
  e.rule.q = {1, 1.8, 0};
  e.t_list = {0.5, 2.0};
  e.L = 4;
  // The limit law of the zeros is the stationary limit; compare the trajectories
  // started at the zeros with the zero moments directly.
  const auto [p, q] = e.rule.pq(20);
  const auto z = jacobi_zeros({20, q - 20, p - 20});
  const Scaling sc = regime_scaling(Regime::WignerStationary, p, q, 20);
  const auto m0 = empirical_moments(z, sc.a, sc.b, 4);
  IntegratorOptions o;
  o.output_times = {0.5 / sc.s, 2.0 / sc.s};
  const auto tr = integrate_interior({DomainKind::CompactAlcove, z}, p, q, 2.0 / sc.s, o);
  for (size_t k = 0; k < tr.t.size(); ++k) {
    const auto m = empirical_moments(tr.x[k], sc.a, sc.b, 4);
    for (int l = 0; l <= 4; ++l) CHECK(std::abs(m[l] - m0[l]) < 1e-9);
  }
}

TEST_CASE("zero limits") {
  ParamRule r;
  r.p = {3, 1, 2};
  r.q = {2, 1, 1};
  const auto one = zeros_limit_experiment(ZerosKind::WignerZeros, {1}, r, 2);
  CHECK(std::abs(one.find(1, INFINITY, 1)->empirical) < 1e-14);

  ParamRule mp;
  mp.p = {2, 1, 0};
  mp.q = {1, 2, 0};
  const auto rep = zeros_limit_experiment(ZerosKind::MPZeros, {200}, mp, 1);
  const auto* row = rep.find(200, INFINITY, 1);
  CHECK(row->predicted == doctest::Approx(4));
  CHECK(std::abs(row->empirical - 4) / 4 < 0.02);
}

TEST_CASE("report does not depend on the job count") {
  Experiment e;
  e.regime.kind = Regime::WignerStationary;
  e.N_list = {20, 30, 40};
  e.rule.p = {1, 2, 0};
  e.rule.q = {1, 1.8, 0};
  e.t_list = {0.5};
  e.L = 4;
  const auto a = run_experiment(e);
  e.jobs = 3;
  const auto b = run_experiment(e);
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].empirical == b.rows[i].empirical);
}
