#include "bcj/jacobi_poly.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bcj {

double eval_jacobi(const JacobiParams& jp, double x) {
  const double a = jp.alpha, b = jp.beta;
  if (jp.n <= 0) return 1.0;
  double p0 = 1.0;
  double p1 = 0.5 * (a + b + 2) * x + 0.5 * (a - b);
  for (int n = 2; n <= jp.n; ++n) {
    const double s = 2 * n + a + b;
    const double c0 = 2.0 * n * (n + a + b) * (s - 2);
    const double c1 = (s - 1) * (s * (s - 2) * x + (a - b) * (a + b));
    const double c2 = 2.0 * (n + a - 1) * (n + b - 1) * s;
    const double p2 = (c1 * p1 - c2 * p0) / c0;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

void jacobi_recurrence(const JacobiParams& jp, std::vector<double>& diag, std::vector<double>& offdiag2) {
  const int n = jp.n;
  const double a = jp.alpha, b = jp.beta, ab = a + b;
  diag.assign(n, 0.0);
  offdiag2.assign(n, 0.0);
  for (int k = 0; k < n; ++k) {
    const double s = 2 * k + ab;
    if (k == 0)
      diag[k] = (b - a) / (ab + 2);
    else
      diag[k] = (b - a) * (b + a) / (s * (s + 2));
    if (k == 1) {
      offdiag2[k] = 4 * (1 + a) * (1 + b) / ((2 + ab) * (2 + ab) * (3 + ab));
    } else if (k >= 2) {
      offdiag2[k] = 4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1) * (s - 1));
    }
  }
}

namespace {

// Monic p_n(x) and p_n'(x), both scaled by a common positive factor exp(-logscale).
struct MonicEval {
  double p, dp, logscale;
};

MonicEval monic_eval(const std::vector<double>& d, const std::vector<double>& e2, double x) {
  double pm1 = 0, p = 1, dpm1 = 0, dp = 0, ls = 0;
  const int n = static_cast<int>(d.size());
  for (int k = 0; k < n; ++k) {
    const double bk = k > 0 ? e2[k] : 0.0;
    const double pn = (x - d[k]) * p - bk * pm1;
    const double dpn = p + (x - d[k]) * dp - bk * dpm1;
    pm1 = p;
    p = pn;
    dpm1 = dp;
    dp = dpn;
    const double m = std::max(std::abs(p), std::abs(dp));
    if (m > 1e100 || (m < 1e-100 && m > 0)) {
      pm1 /= m;
      p /= m;
      dpm1 /= m;
      dp /= m;
      ls += std::log(m);
    }
  }
  return {p, dp, ls};
}

double log_binom(double n, double k) {
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

}  // namespace

double jacobi_relative_residual(const JacobiParams& jp, double x) {
  const int n = jp.n;
  if (n <= 0) return 0.0;
  const double a = jp.alpha, b = jp.beta;
  std::vector<double> d, e2;
  jacobi_recurrence(jp, d, e2);
  const MonicEval m = monic_eval(d, e2, x);
  if (m.p == 0) return 0.0;
  // Leading coefficient of P_n: Gamma(2n+a+b+1) / (2^n n! Gamma(n+a+b+1)).
  const double logk = std::lgamma(2 * n + a + b + 1) - n * std::log(2.0) - std::lgamma(n + 1.0) -
                      std::lgamma(n + a + b + 1);
  const double logval = logk + m.logscale + std::log(std::abs(m.p));
  const double mx = std::max(a, b);
  const double logmax = log_binom(n + mx, n);
  return std::exp(logval - logmax);
}

std::vector<double> jacobi_zeros(const JacobiParams& jp) {
  const int n = jp.n;
  if (n < 1) throw std::invalid_argument("jacobi_zeros needs degree n >= 1");
  if (!(jp.alpha > -1 && jp.beta > -1)) throw std::invalid_argument("jacobi_zeros needs alpha, beta > -1");
  std::vector<double> d, e2;
  jacobi_recurrence(jp, d, e2);
  if (n == 1) return {d[0]};

  Eigen::VectorXd diag(n), sub(n - 1);
  for (int k = 0; k < n; ++k) diag[k] = d[k];
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(e2[k]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> z(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(z.begin(), z.end());

  // Newton polish inside brackets given by neighbouring eigenvalue midpoints.
  const std::vector<double> z0 = z;
  for (int i = 0; i < n; ++i) {
    double lo = i == 0 ? -1.0 : 0.5 * (z0[i - 1] + z0[i]);
    double hi = i == n - 1 ? 1.0 : 0.5 * (z0[i] + z0[i + 1]);
    const MonicEval elo = monic_eval(d, e2, lo);
    const double slo = elo.p;
    double x = z[i];
    for (int it = 0; it < 5; ++it) {
      const MonicEval m = monic_eval(d, e2, x);
      if (m.p == 0) break;
      if ((m.p > 0) == (slo > 0))
        lo = x;
      else
        hi = x;
      double xn = (m.dp != 0) ? x - m.p / m.dp : 0.5 * (lo + hi);
      if (xn == x) break;
      if (!(xn >= lo && xn <= hi)) xn = 0.5 * (lo + hi);
      const double step = std::abs(xn - x);
      x = xn;
      if (step <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) break;
    }
    z[i] = x;
  }
  return z;
}

}  // namespace bcj
