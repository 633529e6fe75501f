#include "bcj/detflow.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bcj/jacobi_poly.hpp"

namespace bcj {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

bool admissible_interior(DomainKind d, const std::vector<double>& x) {
  const size_t n = x.size();
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i])) return false;
    if (i > 0 && !(x[i] > x[i - 1])) return false;
  }
  if (d == DomainKind::CompactAlcove) return x.front() > -1.0 && x.back() < 1.0;
  return x.front() > 1.0;
}

// Largest step before the linearized motion v closes a gap or reaches a wall.
double collision_horizon(DomainKind d, const std::vector<double>& x, const std::vector<double>& v) {
  double h = kInf;
  const size_t n = x.size();
  for (size_t i = 0; i + 1 < n; ++i) {
    const double close = v[i] - v[i + 1];
    if (close > 0) h = std::min(h, (x[i + 1] - x[i]) / close);
  }
  if (v[0] < 0) {
    const double wall = d == DomainKind::CompactAlcove ? -1.0 : 1.0;
    h = std::min(h, (x[0] - wall) / -v[0]);
  }
  if (d == DomainKind::CompactAlcove && v[n - 1] > 0) h = std::min(h, (1.0 - x[n - 1]) / v[n - 1]);
  return h;
}

std::pair<int, int> tightest_pair(DomainKind d, const std::vector<double>& x) {
  double best = kInf;
  std::pair<int, int> ij{0, -1};
  for (size_t i = 0; i + 1 < x.size(); ++i) {
    if (x[i + 1] - x[i] < best) {
      best = x[i + 1] - x[i];
      ij = {int(i), int(i + 1)};
    }
  }
  const double lo = d == DomainKind::CompactAlcove ? x.front() + 1 : x.front() - 1;
  if (lo < best) {
    best = lo;
    ij = {0, -1};
  }
  if (d == DomainKind::CompactAlcove && 1 - x.back() < best) ij = {int(x.size() - 1), -1};
  return ij;
}

Trajectory integrate(DomainKind d, const std::vector<double>& x0, double p, double q, double t_end,
                     const IntegratorOptions& opts, IntegratorStats* stats) {
  if (!admissible_interior(d, x0))
    throw std::invalid_argument("integrator needs a strictly interior start (use solve_from_boundary)");
  if (!(t_end >= 0)) throw std::invalid_argument("t_end must be nonnegative");
  const size_t n = x0.size();
  IntegratorStats st;

  std::vector<double> outs = opts.output_times;
  std::sort(outs.begin(), outs.end());
  for (double to : outs)
    if (to < 0 || to > t_end) throw std::invalid_argument("output time outside [0, t_end]");
  const bool record_all = outs.empty();
  size_t next_out = 0;

  Trajectory tr;
  tr.domain = d;
  auto record = [&](double t, const std::vector<double>& x) {
    tr.t.push_back(t);
    tr.x.push_back(x);
  };

  std::vector<double> x = x0, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y(n), xn(n);
  auto f = [&](const std::vector<double>& s, std::vector<double>& out) {
    drift_raw(d, s, p, q, out);
    ++st.drift_evals;
  };

  double t = 0;
  if (record_all) record(0, x);
  while (next_out < outs.size() && outs[next_out] <= 0) {
    record(0, x);
    ++next_out;
  }
  f(x, k1);

  double vmax = 0;
  for (double v : k1) vmax = std::max(vmax, std::abs(v));
  double h = std::min(opts.eta * collision_horizon(d, x, k1), 1e-3 / (1 + vmax));
  h = std::min(h, t_end);
  int consecutive_rejects = 0;

  while (t < t_end) {
    if (st.accepted + st.rejected >= opts.max_steps)
      throw std::runtime_error("integrator exceeded the step budget");
    const double cap = opts.eta * collision_horizon(d, x, k1);
    double target = record_all || next_out >= outs.size() ? t_end : outs[next_out];
    h = std::min({h, cap, target - t});
    if (!(h > 0) || t + h == t) {
      auto [i, j] = tightest_pair(d, x);
      std::ostringstream os;
      os.precision(17);
      os << "step size underflow at t=" << t << " near particles " << i << "," << j;
      throw CollisionError(i, j, t, os.str());
    }
    const bool hits_target = (t + h >= target);

    for (size_t i = 0; i < n; ++i) y[i] = x[i] + h * a21 * k1[i];
    f(y, k2);
    for (size_t i = 0; i < n; ++i) y[i] = x[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(y, k3);
    for (size_t i = 0; i < n; ++i) y[i] = x[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(y, k4);
    for (size_t i = 0; i < n; ++i)
      y[i] = x[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(y, k5);
    for (size_t i = 0; i < n; ++i)
      y[i] = x[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(y, k6);
    for (size_t i = 0; i < n; ++i)
      xn[i] = x[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);

    bool ok = admissible_interior(d, xn);
    double err = kInf;
    if (ok) {
      f(xn, k7);
      err = 0;
      for (size_t i = 0; i < n; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = opts.atol + opts.rtol * std::max(std::abs(x[i]), std::abs(xn[i]));
        err = std::max(err, std::abs(e) / sc);
      }
      if (!std::isfinite(err)) ok = false;
    }
    if (!ok || err > 1.0) {
      ++st.rejected;
      if (++consecutive_rejects > 200) {
        auto [i, j] = tightest_pair(d, x);
        std::ostringstream os;
        os.precision(17);
        os << "repeated step rejection at t=" << t << " near particles " << i << "," << j;
        throw CollisionError(i, j, t, os.str());
      }
      h *= ok ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
      continue;
    }
    consecutive_rejects = 0;
    ++st.accepted;
    t = hits_target ? target : t + h;
    x.swap(xn);
    k1.swap(k7);
    if (d == DomainKind::NoncompactChamber && std::abs(x.back()) > opts.growth_guard) {
      std::ostringstream os;
      os.precision(17);
      os << "growth guard reached at t=" << t << " (x_N=" << x.back() << ")";
      throw std::overflow_error(os.str());
    }
    if (opts.on_step) opts.on_step(t, x);
    if (record_all) {
      record(t, x);
    } else {
      while (next_out < outs.size() && outs[next_out] <= t) {
        record(t, x);
        ++next_out;
      }
    }
    const double fac = err > 0 ? std::min(5.0, 0.9 * std::pow(err, -0.2)) : 5.0;
    h *= fac;
  }
  while (next_out < outs.size()) {
    record(t, x);
    ++next_out;
  }
  if (stats) *stats = st;
  return tr;
}

}  // namespace

Trajectory integrate_interior(const ParticleState& x0, double p, double q, double t_end,
                              const IntegratorOptions& opts, IntegratorStats* stats) {
  if (x0.domain != DomainKind::CompactAlcove)
    throw std::invalid_argument("integrate_interior expects a compact-alcove state");
  return integrate(DomainKind::CompactAlcove, x0.x, p, q, t_end, opts, stats);
}

Trajectory integrate_noncompact(const ParticleState& x0, double p, double q, double t_end,
                                const IntegratorOptions& opts, IntegratorStats* stats) {
  if (x0.domain != DomainKind::NoncompactChamber)
    throw std::invalid_argument("integrate_noncompact expects a noncompact-chamber state");
  return integrate(DomainKind::NoncompactChamber, x0.x, p, q, t_end, opts, stats);
}

std::vector<double> esp_forward(const std::vector<double>& x) {
  const size_t n = x.size();
  std::vector<double> e(n + 1, 0.0);
  e[0] = 1;
  for (size_t i = 0; i < n; ++i)
    for (size_t k = i + 1; k >= 1; --k) e[k] += x[i] * e[k - 1];
  return {e.begin() + 1, e.end()};
}

std::vector<double> ESPTrajectory::operator()(double t) const {
  std::vector<double> e(components.size());
  for (size_t k = 0; k < components.size(); ++k) e[k] = components[k](t);
  return e;
}

ESPTrajectory esp_closed_form(const std::vector<double>& e0, double p, double q, DomainKind d) {
  const int N = static_cast<int>(e0.size());
  if (!(p > N - 1 && q > N - 1)) throw std::invalid_argument("esp_closed_form needs p, q > N-1");
  const double sgn = d == DomainKind::CompactAlcove ? 1.0 : -1.0;
  ESPTrajectory tr;
  tr.N = N;
  tr.domain = d;
  tr.components.reserve(N);
  // Compact: e_k' = k(k-1-(p+q)) e_k + (N-k+1)(p-q) e_{k-1} - (N-k+2)(N-k+1) e_{k-2};
  // the noncompact system is the negative.
  for (int k = 1; k <= N; ++k) {
    const double rate = sgn * k * (k - 1 - (p + q));
    ExpPolySum forcing;
    const ExpPolySum prev1 = k == 1 ? ExpPolySum::constant(1.0) : tr.components[k - 2];
    forcing += (sgn * (N - k + 1) * (p - q)) * prev1;
    if (k >= 2) {
      const ExpPolySum prev2 = k == 2 ? ExpPolySum::constant(1.0) : tr.components[k - 3];
      forcing += (-sgn * (N - k + 2.0) * (N - k + 1.0)) * prev2;
    }
    tr.components.push_back(ExpPolySum::solve_linear(rate, e0[k - 1], forcing));
  }
  return tr;
}

namespace {

// Parlett-Reinsch balancing in place.
void balance(Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  const double radix = 2.0;
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double r = 0, c = 0;
      for (int j = 0; j < n; ++j)
        if (j != i) {
          c += std::abs(A(j, i));
          r += std::abs(A(i, j));
        }
      if (c == 0 || r == 0) continue;
      double g = r / radix, f = 1, s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1 / f;
        A.row(i) *= g;
        A.col(i) *= f;
      }
    }
  }
}

}  // namespace

ParticleState esp_invert(const std::vector<double>& e, DomainKind d, double tol_root) {
  const int N = static_cast<int>(e.size());
  ParticleState s;
  s.domain = d;
  if (N == 0) return s;
  // Monic coefficients c[k] of z^{N-k}: c[k] = (-1)^k e_k.
  std::vector<long double> c(N + 1);
  c[0] = 1;
  for (int k = 1; k <= N; ++k) c[k] = (k % 2 ? -1.0L : 1.0L) * e[k - 1];
  std::vector<double> roots(N);
  if (N == 1) {
    roots[0] = e[0];
  } else {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    for (int j = 0; j < N; ++j) A(0, j) = -static_cast<double>(c[j + 1]);
    for (int i = 1; i < N; ++i) A(i, i - 1) = 1;
    balance(A);
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    if (es.info() != Eigen::Success) throw NotInImageError("companion eigenvalue iteration failed");
    double scale = 1;
    for (int i = 0; i < N; ++i) scale = std::max(scale, std::abs(es.eigenvalues()[i]));
    for (int i = 0; i < N; ++i) {
      const auto z = es.eigenvalues()[i];
      if (std::abs(z.imag()) > tol_root * scale) {
        std::ostringstream os;
        os.precision(17);
        os << "coefficient vector is not in the image of the real domain (root " << z.real() << "+"
           << z.imag() << "i)";
        throw NotInImageError(os.str());
      }
      roots[i] = z.real();
    }
    std::sort(roots.begin(), roots.end());
    // Newton polish in long double; keep the update only if the residual drops.
    auto horner = [&](long double z, long double& dp) {
      long double pv = c[0];
      dp = 0;
      for (int k = 1; k <= N; ++k) {
        dp = dp * z + pv;
        pv = pv * z + c[k];
      }
      return pv;
    };
    for (int i = 0; i < N; ++i) {
      long double z = roots[i], dp;
      long double pv = horner(z, dp);
      for (int it = 0; it < 3 && dp != 0; ++it) {
        const long double zn = z - pv / dp;
        long double dpn;
        const long double pn = horner(zn, dpn);
        if (!(std::abs(pn) < std::abs(pv))) break;
        z = zn;
        pv = pn;
        dp = dpn;
      }
      roots[i] = static_cast<double>(z);
    }
    std::sort(roots.begin(), roots.end());
  }
  s.x = roots;
  return s;
}

double discriminant(const ParticleState& s) {
  const auto& x = s.x;
  const size_t n = x.size();
  double D = 1;
  for (size_t i = 0; i < n; ++i)
    D *= s.domain == DomainKind::CompactAlcove ? (1 - x[i] * x[i]) : (x[i] * x[i] - 1);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (i != j) D *= (x[j] - x[i]);
  return D;
}

double log_abs_discriminant(const ParticleState& s) {
  const auto& x = s.x;
  const size_t n = x.size();
  double L = 0;
  for (size_t i = 0; i < n; ++i) L += std::log(std::abs(1 - x[i] * x[i]));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) L += 2 * std::log(std::abs(x[j] - x[i]));
  return L;
}

double log_potential(const std::vector<double>& x, double p, double q) {
  const double N = static_cast<double>(x.size());
  double v = 0;
  for (double xi : x) v += (q + 1 - N) * std::log(1 - xi) + (p + 1 - N) * std::log(1 + xi);
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = i + 1; j < x.size(); ++j) v += 2 * std::log(std::abs(x[i] - x[j]));
  return v;
}

LyapunovReport lyapunov_check(const Trajectory& tr, double p, double q, double tol) {
  if (tr.domain != DomainKind::CompactAlcove)
    throw std::invalid_argument("lyapunov_check is defined on the compact alcove");
  LyapunovReport rep;
  rep.min_increment = kInf;
  for (size_t k = 0; k < tr.x.size(); ++k) {
    rep.values.push_back(log_potential(tr.x[k], p, q));
    if (k > 0) rep.min_increment = std::min(rep.min_increment, rep.values[k] - rep.values[k - 1]);
  }
  if (rep.values.size() < 2) rep.min_increment = 0;
  rep.nondecreasing = rep.min_increment >= -tol;
  return rep;
}

std::vector<double> hermite_zeros(int m) {
  if (m < 1) return {};
  if (m == 1) return {0.0};
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m), sub(m - 1);
  for (int k = 1; k < m; ++k) sub[k - 1] = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> z(es.eigenvalues().data(), es.eigenvalues().data() + m);
  std::sort(z.begin(), z.end());
  return z;
}

std::vector<double> laguerre_zeros(int m, double alpha) {
  if (m < 1) return {};
  Eigen::VectorXd diag(m), sub(std::max(m - 1, 0));
  for (int k = 0; k < m; ++k) diag[k] = 2 * k + alpha + 1;
  for (int k = 1; k < m; ++k) sub[k - 1] = std::sqrt(k * (k + alpha));
  if (m == 1) return {diag[0]};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> z(es.eigenvalues().data(), es.eigenvalues().data() + m);
  std::sort(z.begin(), z.end());
  return z;
}

namespace {

struct Cluster {
  int first, count;
  double center;
  int wall;  // -1 lower wall, +1 upper wall (compact), 0 interior
};

std::vector<Cluster> find_clusters(const ParticleState& s, double tie_tol) {
  const auto& x = s.x;
  const int n = static_cast<int>(x.size());
  const bool compact = s.domain == DomainKind::CompactAlcove;
  const double lo = compact ? -1.0 : 1.0;
  auto at_lo = [&](double v) { return v - lo <= tie_tol * (1 + std::abs(lo)); };
  auto at_hi = [&](double v) { return compact && 1.0 - v <= tie_tol * 2; };
  std::vector<Cluster> cl;
  int i = 0;
  while (i < n) {
    int j = i + 1;
    if (at_lo(x[i])) {
      while (j < n && at_lo(x[j])) ++j;
      cl.push_back({i, j - i, lo, -1});
    } else if (at_hi(x[i])) {
      j = n;
      cl.push_back({i, n - i, 1.0, +1});
    } else {
      while (j < n && x[j] - x[j - 1] <= tie_tol * (1 + std::abs(x[i])) && !at_hi(x[j])) ++j;
      double c = 0;
      for (int k = i; k < j; ++k) c += x[k];
      cl.push_back({i, j - i, c / (j - i), 0});
    }
    i = j;
  }
  return cl;
}


// Largest bootstrap time for which every cluster stays far inside its basin: the
// opened cluster is at most eps times the distance to neighbours and walls, and
// the neglected O(t) drift terms are small against the leading repulsion.
double self_similar_time(const ParticleState& s, double p, double q, double tie_tol, double eps) {
  const auto cl = find_clusters(s, tie_tol);
  const bool compact = s.domain == DomainKind::CompactAlcove;
  const int N = s.size();
  double tb = kInf;
  for (size_t k = 0; k < cl.size(); ++k) {
    const auto& c = cl[k];
    if (c.count == 1 && c.wall == 0) continue;
    double room = 1.0;
    if (k > 0) room = std::min(room, std::abs(c.center - cl[k - 1].center));
    if (k + 1 < cl.size()) room = std::min(room, std::abs(cl[k + 1].center - c.center));
    if (c.wall == 0 && compact) room = std::min(room, std::min(c.center + 1, 1 - c.center));
    if (c.wall == 0 && !compact) room = std::min(room, c.center - 1);
    const double width = eps * room * c.count / (c.count + N + p + q);
    if (c.wall == 0) {
      const double f = std::abs(1 - c.center * c.center);
      const double hmax = std::sqrt(2.0 * c.count) + 1;
      tb = std::min(tb, std::pow(width / (2 * hmax), 2) / std::max(f, 1e-300));
    } else {
      const double alpha = (c.wall < 0 && compact) ? p - N : q - N;
      const double zmax = 4.0 * c.count + 2 * alpha + 2;
      tb = std::min(tb, width / (2 * zmax));
    }
  }
  return tb;
}

}  // namespace

bool is_singular_start(const ParticleState& s, double tie_tol) {
  for (const auto& c : find_clusters(s, tie_tol))
    if (c.wall != 0 || c.count > 1) return true;
  return false;
}

std::vector<double> self_similar_state(const ParticleState& s, double p, double q, double t,
                                       double tie_tol) {
  const int N = s.size();
  const bool compact = s.domain == DomainKind::CompactAlcove;
  std::vector<double> y = s.x;
  for (const auto& c : find_clusters(s, tie_tol)) {
    if (c.wall == 0) {
      if (c.count == 1) continue;
      const auto h = hermite_zeros(c.count);
      const double w = 2 * std::sqrt(std::abs(1 - c.center * c.center) * t);
      for (int k = 0; k < c.count; ++k) y[c.first + k] = c.center + w * h[k];
    } else if (c.wall < 0) {
      const double alpha = compact ? p - N : q - N;
      const auto z = laguerre_zeros(c.count, alpha);
      const double lo = compact ? -1.0 : 1.0;
      for (int k = 0; k < c.count; ++k) y[c.first + k] = lo + 2 * t * z[k];
    } else {
      const auto z = laguerre_zeros(c.count, q - N);
      for (int k = 0; k < c.count; ++k) y[c.first + k] = 1.0 - 2 * t * z[c.count - 1 - k];
    }
  }
  return y;
}

BoundaryResult solve_from_boundary(const ParticleState& x0, double p, double q, double t_end,
                                   const BoundaryOptions& opts) {
  if (!in_domain(x0)) throw std::invalid_argument("start is outside the closed domain");
  BoundaryResult res;
  const DomainKind d = x0.domain;
  const int N = x0.size();
  auto run_interior = [&](const std::vector<double>& xs, double t0, std::vector<double> outs) {
    IntegratorOptions io = opts.integ;
    std::sort(outs.begin(), outs.end());
    io.output_times = outs;
    for (double& to : io.output_times) to = std::max(0.0, to - t0);
    if (io.on_step) {
      auto cb = opts.integ.on_step;
      io.on_step = [cb, t0](double t, const std::vector<double>& x) { cb(t + t0, x); };
    }
    Trajectory tr = integrate(d, xs, p, q, t_end - t0, io, &res.stats);
    if (outs.empty()) {
      for (double& tt : tr.t) tt += t0;
    } else {
      tr.t = outs;
    }
    return tr;
  };

  if (!is_singular_start(x0, opts.tie_tol)) {
    res.traj = run_interior(x0.x, 0.0, opts.integ.output_times);
    res.t_b = 0;
    return res;
  }

  BootstrapMethod m = opts.method;
  if (m == BootstrapMethod::Auto)
    m = N <= opts.auto_esp_max_n ? BootstrapMethod::EspInversion : BootstrapMethod::SelfSimilar;

  // Bootstrap segment: times in (0, t_b] with their states.
  std::vector<double> bt;
  std::vector<std::vector<double>> bx;
  double tb = 0;
  std::vector<double> req = opts.integ.output_times;
  std::sort(req.begin(), req.end());

  if (m == BootstrapMethod::EspInversion) {
    const ESPTrajectory esp = esp_closed_form(esp_forward(x0.x), p, q, d);
    tb = opts.t_b > 0 ? opts.t_b : 1e-3 / (p + q);
    bool ok = false;
    for (int attempt = 0; attempt <= opts.max_adapt && !ok; ++attempt, tb *= 2) {
      if (tb > t_end && t_end > 0) tb = t_end;
      bt.clear();
      bx.clear();
      try {
        std::vector<double> grid;
        for (int g = 1; g <= opts.esp_grid; ++g) grid.push_back(tb * g / opts.esp_grid);
        for (double r : req)
          if (r > 0 && r < tb) grid.push_back(r);
        std::sort(grid.begin(), grid.end());
        for (double g : grid) {
          ParticleState st = esp_invert(esp(g), d);
          bt.push_back(g);
          bx.push_back(st.x);
        }
        ok = admissible_interior(d, bx.back());
      } catch (const NotInImageError&) {
        ok = false;
      }
      if (ok) break;
      if (tb >= t_end) break;
    }
    if (!ok) {
      if (opts.method == BootstrapMethod::Auto) {
        m = BootstrapMethod::SelfSimilar;
      } else {
        throw SingularStartError("ESP bootstrap did not reach an interior state (discriminant stayed ~0)");
      }
    }
  }
  if (m == BootstrapMethod::SelfSimilar) {
    tb = opts.t_b > 0 ? opts.t_b : self_similar_time(x0, p, q, opts.tie_tol, 1e-4);
    tb = std::min(tb, t_end > 0 ? t_end : tb);
    bt.clear();
    bx.clear();
    std::vector<double> grid;
    for (double r : req)
      if (r > 0 && r < tb) grid.push_back(r);
    grid.push_back(tb);
    std::sort(grid.begin(), grid.end());
    for (double g : grid) {
      bt.push_back(g);
      bx.push_back(self_similar_state(x0, p, q, g, opts.tie_tol));
    }
    if (!admissible_interior(d, bx.back()))
      throw SingularStartError("self-similar bootstrap state is not interior");
  }
  res.used = m;
  res.t_b = tb;

  Trajectory& tr = res.traj;
  tr.domain = d;
  const bool record_all = req.empty();
  if (record_all) {
    tr.t.push_back(0);
    tr.x.push_back(x0.x);
    for (size_t k = 0; k < bt.size(); ++k) {
      tr.t.push_back(bt[k]);
      tr.x.push_back(bx[k]);
    }
  } else {
    for (double r : req) {
      if (r <= 0) {
        tr.t.push_back(r);
        tr.x.push_back(x0.x);
      } else if (r <= tb) {
        const auto it = std::find(bt.begin(), bt.end(), r);
        tr.t.push_back(r);
        tr.x.push_back(bx[it - bt.begin()]);
      }
    }
  }
  if (opts.integ.on_step)
    for (size_t k = 0; k < bt.size(); ++k) opts.integ.on_step(bt[k], bx[k]);
  if (t_end > tb) {
    std::vector<double> later;
    for (double r : req)
      if (r > tb) later.push_back(r);
    if (record_all || !later.empty()) {
      Trajectory rest = run_interior(bx.back(), tb, later);
      size_t start = record_all ? 1 : 0;  // skip the duplicated bootstrap end point
      for (size_t k = start; k < rest.t.size(); ++k) {
        tr.t.push_back(rest.t[k]);
        tr.x.push_back(rest.x[k]);
      }
    }
  }
  return res;
}

}  // namespace bcj
