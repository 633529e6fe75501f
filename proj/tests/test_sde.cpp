#include <doctest.h>

#include <cmath>

#include "bcj/detflow.hpp"
#include "bcj/sde.hpp"

using namespace bcj;

namespace {

// Plain Euler for the frozen ODE on the grid t_k = T k / n.
std::vector<double> euler_ode(DomainKind d, std::vector<double> x, double p, double q, double T, int n) {
  std::vector<double> v(x.size());
  for (int k = 1; k <= n; ++k) {
    const double h = (k == n ? T : T * k / n) - (k == 1 ? 0.0 : T * (k - 1) / n);
    drift_raw(d, x, p, q, v);
    for (size_t i = 0; i < x.size(); ++i) x[i] += v[i] * h;
  }
  return x;
}

}  // namespace

TEST_CASE("zero noise gives the Euler path") {
  SdeConfig cfg;
  cfg.params = {1.0, 12, 9, 4};
  cfg.dt = 1e-4;
  cfg.zero_noise = true;
  cfg.gap_control = 0;
  const std::vector<double> x0{-0.6, -0.1, 0.3, 0.7};
  const auto path = simulate_compact({DomainKind::CompactAlcove, x0}, cfg, 0.05);
  CHECK(path.states.back() == euler_ode(DomainKind::CompactAlcove, x0, 12, 9, 0.05, 500));

  const std::vector<double> y0{1.2, 1.6, 2.5};
  cfg.params = {1.0, 6, 5, 3};
  const auto np = simulate_noncompact({DomainKind::NoncompactChamber, y0}, cfg, 0.02);
  CHECK(np.states.back() == euler_ode(DomainKind::NoncompactChamber, y0, 6, 5, 0.02, 200));
}

TEST_CASE("large kappa follows the frozen flow") {
  SdeConfig cfg;
  cfg.params = {1e8, 12, 9, 4};
  cfg.dt = 1e-5;
  const ParticleState x0{DomainKind::CompactAlcove, {-0.6, -0.1, 0.3, 0.7}};
  const auto path = simulate_compact(x0, cfg, 0.3, 0, {0.1, 0.2, 0.3});
  IntegratorOptions o;
  o.output_times = {0.1, 0.2, 0.3};
  const auto tr = integrate_interior(x0, 12, 9, 0.3, o);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 4; ++i) CHECK(std::abs(path.states[k][i] - tr.x[k][i]) < 10 / std::sqrt(1e8));

  cfg.params = {1e8, 6, 5, 2};
  const ParticleState y0{DomainKind::NoncompactChamber, {1.3, 2.0}};
  const auto np = simulate_noncompact(y0, cfg, 0.05, 0, {0.05});
  const auto tn = integrate_noncompact(y0, 6, 5, 0.05);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(np.states[0][i] - tn.x.back()[i]) < 1e-3 * tn.x.back()[i]);
}

TEST_CASE("single particle mean") {
  SdeConfig cfg;
  const double p = 3, x0 = 0.6, t = 0.2;
  cfg.params = {2.0, p, p, 1};
  cfg.dt = 1e-3;
  cfg.replicas = 10000;
  cfg.seed = 21;
  const auto paths = simulate_replicas({DomainKind::CompactAlcove, {x0}}, cfg, t);
  double s = 0, s2 = 0;
  for (const auto& pa : paths) {
    const double v = pa.states.back()[0];
    s += v;
    s2 += v * v;
  }
  const double n = paths.size(), mean = s / n, se = std::sqrt((s2 / n - mean * mean) / (n - 1));
  CHECK(std::abs(mean - x0 * std::exp(-2 * p * t)) < 3 * se);
}

TEST_CASE("ordering and domain are kept") {
  SdeConfig cfg;
  cfg.params = {0.5, 6, 5, 3};
  cfg.dt = 1e-4;
  cfg.seed = 3;
  std::vector<double> rec;
  for (int k = 1; k <= 20; ++k) rec.push_back(0.002 * k);
  const auto path = simulate_noncompact({DomainKind::NoncompactChamber, {1.05, 1.1, 1.4}}, cfg, 0.04, 0, rec);
  for (const auto& x : path.states) {
    CHECK(std::is_sorted(x.begin(), x.end()));
    CHECK(x.front() >= 1);
  }
  const auto cp = simulate_compact({DomainKind::CompactAlcove, {-1, -1, 1}}, cfg, 0.04, 0, rec);
  for (const auto& x : cp.states) {
    CHECK(std::is_sorted(x.begin(), x.end()));
    CHECK(x.front() >= -1);
    CHECK(x.back() <= 1);
  }
  CHECK(cp.bootstrap_time > 0);
  CHECK(path.times == rec);
}

TEST_CASE("replicas do not depend on the job count") {
  SdeConfig cfg;
  cfg.params = {2.0, 12, 9, 3};
  cfg.dt = 1e-4;
  cfg.replicas = 4;
  cfg.seed = 77;
  const ParticleState x0{DomainKind::CompactAlcove, {-0.3, 0.1, 0.5}};
  const auto a = simulate_replicas(x0, cfg, 0.01, {}, 1);
  const auto b = simulate_replicas(x0, cfg, 0.01, {}, 3);
  for (int r = 0; r < 4; ++r) CHECK(a[r].states == b[r].states);
  CHECK(a[0].states.back() != a[1].states.back());
}

TEST_CASE("martingale diagnostic") {
  SdeConfig cfg;
  cfg.params = {1.0, 40, 30, 5};
  cfg.dt = 1e-4;
  cfg.store_steps = true;
  cfg.zero_noise = true;
  const ParticleState x0{DomainKind::CompactAlcove, {-0.5, -0.2, 0.1, 0.3, 0.6}};
  const double a = 3, b = 1.0 / 7;
  auto ms = martingale_diagnostic(simulate_compact(x0, cfg, 0.02), cfg.params, a, b, 2);
  CHECK(ms.sup_abs == 0);

  cfg.zero_noise = false;
  cfg.seed = 8;
  const int R = 400;
  double s = 0, s2 = 0;
  for (int r = 0; r < R; ++r) {
    const auto m = martingale_diagnostic(simulate_compact(x0, cfg, 0.02, r), cfg.params, a, b, 2);
    s += m.M.back();
    s2 += m.M.back() * m.M.back();
  }
  const double mean = s / R, se = std::sqrt((s2 / R - mean * mean) / (R - 1));
  CHECK(std::abs(mean) < 3 * se);
  SdeConfig plain = cfg;
  plain.store_steps = false;
  CHECK_THROWS(martingale_diagnostic(simulate_compact(x0, plain, 0.01), cfg.params, a, b, 2));
}
