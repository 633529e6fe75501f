#include "bcj/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bcj {

bool MomentVector::consistent(double tol) const {
  if (m.empty() || std::abs(m[0] - 1) > tol) return false;
  if (nonneg && m.size() > 2 && m[2] < m[1] * m[1] - tol * std::max(1.0, m[2])) return false;
  return true;
}

MomentVector delta_moments(double at, int L) {
  MomentVector mv;
  mv.m.assign(L + 1, 0.0);
  double v = 1;
  for (int l = 0; l <= L; ++l, v *= at) mv.m[l] = v;
  mv.nonneg = at >= 0;
  mv.provenance = "dirac";
  return mv;
}

MomentVector empirical_moments(const std::vector<double>& x, double a, double b, int L) {
  if (!(a > 0)) throw std::invalid_argument("empirical_moments needs a > 0");
  MomentVector mv;
  mv.m.assign(L + 1, 0.0);
  bool nonneg = true;
  for (double xi : x) {
    const double y = a * (xi - b);
    if (y < 0) nonneg = false;
    double v = 1;
    for (int l = 0; l <= L; ++l, v *= y) mv.m[l] += v;
  }
  const double n = static_cast<double>(x.size());
  for (double& v : mv.m) v /= n;
  mv.nonneg = nonneg;
  mv.provenance = "empirical";
  return mv;
}

std::vector<double> moment_ode_rhs(const std::vector<double>& S, double p, double q, double a, double b,
                                   int N, DomainKind d) {
  const int L = static_cast<int>(S.size()) - 1;
  std::vector<double> dS(L + 1, 0.0);
  const double s = p + q, a2w = a * a * (1 - b * b);
  for (int l = 1; l <= L; ++l) {
    double q2 = 0, q1 = 0, qs = 0;
    for (int k = 0; k <= l - 2; ++k) {
      q2 += S[k] * S[l - 2 - k];
      qs += S[k + 1] * S[l - 1 - k];
      q1 += S[k] * S[l - 1 - k];
    }
    double v = (p - q - b * (s - 2.0 * (l - 1))) * a * S[l - 1] - (s - (l - 1)) * S[l];
    if (l >= 2) v += -a2w * (l - 1) * S[l - 2] + N * a2w * q2 - N * qs - 2 * a * b * N * q1;
    dS[l] = l * v;
  }
  if (d == DomainKind::NoncompactChamber)
    for (double& v : dS) v = -v;
  return dS;
}

std::vector<MomentVector> moment_ode_oracle(const MomentVector& S0, double p, double q, double a, double b,
                                            int N, const std::vector<double>& t_grid,
                                            const OracleOptions& opts) {
  const int L = S0.L();
  if (L < 2) throw std::invalid_argument("moment_ode_oracle needs L >= 2");
  if (std::abs(S0.m[0] - 1) > 1e-12) throw std::invalid_argument("moment_ode_oracle needs m_0 = 1");
  const double sc = 1.0 / opts.time_scale;
  auto f = [&](const std::vector<double>& S) {
    auto d = moment_ode_rhs(S, p, q, a, b, N, opts.domain);
    for (double& v : d) v *= sc;
    return d;
  };
  auto rk4 = [&](const std::vector<double>& y, double h) {
    const size_t n = y.size();
    std::vector<double> t(n);
    const auto k1 = f(y);
    for (size_t i = 0; i < n; ++i) t[i] = y[i] + 0.5 * h * k1[i];
    const auto k2 = f(t);
    for (size_t i = 0; i < n; ++i) t[i] = y[i] + 0.5 * h * k2[i];
    const auto k3 = f(t);
    for (size_t i = 0; i < n; ++i) t[i] = y[i] + h * k3[i];
    const auto k4 = f(t);
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return out;
  };

  std::vector<double> y = S0.m;
  double t = 0;
  double h = 1e-3 / (sc * (L * (p + q) + 1));
  std::vector<MomentVector> out;
  for (double target : t_grid) {
    if (target < t) throw std::invalid_argument("moment_ode_oracle needs an ascending time grid");
    while (t < target) {
      const double hh = std::min(h, target - t);
      const auto full = rk4(y, hh);
      const auto half = rk4(rk4(y, 0.5 * hh), 0.5 * hh);
      double err = 0;
      for (size_t i = 0; i < y.size(); ++i) {
        const double e = std::abs(half[i] - full[i]) / 15;
        err = std::max(err, e / (opts.atol + opts.rtol * std::abs(half[i])));
      }
      if (!(err <= 1.0)) {
        h = hh * std::max(0.1, 0.9 * std::pow(std::isfinite(err) ? err : 1e10, -0.2));
        continue;
      }
      for (size_t i = 0; i < y.size(); ++i) y[i] = half[i] + (half[i] - full[i]) / 15;
      t = (hh == target - t) ? target : t + hh;
      h = hh * std::min(4.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
    }
    MomentVector mv;
    mv.m = y;
    mv.provenance = "moment-ode";
    out.push_back(mv);
  }
  return out;
}

namespace {

// dS_l/dt = r S_l + u S_{l-1} + g sum_{k<=l-2} S_k S_{l-2-k} + h sum_{k<=l-2} S_k S_{l-1-k}
struct LimitCoeffs {
  double r = 0, u = 0, g = 0, h = 0;
};

LimitCoeffs limit_coeffs(const ScalingRegime& reg, int l) {
  const auto& k = reg.k;
  LimitCoeffs c;
  switch (reg.kind) {
    case Regime::WignerStationary:
      c.r = -l;
      c.g = 4.0 * l / std::pow(1 + k.C, 3);
      break;
    case Regime::WignerDegenerate:
      c.r = -l;
      break;
    case Regime::WignerLocal:
      c.g = l * (1 - k.B * k.B);
      break;
    case Regime::WignerLocalDrift:
      c.g = l * (1 - k.B * k.B);
      c.u = l * k.c;
      break;
    case Regime::NCWignerLocal:
      c.g = l * (k.B * k.B - 1);
      break;
    case Regime::MPStationary:
      c.r = -l;
      c.u = 2.0 * l * k.phat;
      c.h = 2.0 * l;
      break;
    case Regime::MPLocal:
      c.u = 2.0 * l * k.phat;
      c.h = 2.0 * l;
      break;
    case Regime::NCMPTimeInverted:
      c.r = l;
      c.u = 2.0 * l * k.qhat;
      c.h = 2.0 * l;
      break;
    case Regime::NCMPLocal:
      c.u = 2.0 * l * k.qhat;
      c.h = 2.0 * l;
      break;
  }
  return c;
}

std::vector<double> limit_rhs(const ScalingRegime& reg, const std::vector<double>& S) {
  const int L = static_cast<int>(S.size()) - 1;
  std::vector<double> d(L + 1, 0.0);
  for (int l = 1; l <= L; ++l) {
    const LimitCoeffs c = limit_coeffs(reg, l);
    double q2 = 0, q1 = 0;
    for (int k = 0; k <= l - 2; ++k) {
      q2 += S[k] * S[l - 2 - k];
      q1 += S[k] * S[l - 1 - k];
    }
    d[l] = c.r * S[l] + c.u * S[l - 1] + c.g * q2 + c.h * q1;
  }
  return d;
}

}  // namespace

std::vector<ExpPolySum> limit_trajectories(const ScalingRegime& reg, const MomentVector& mu0, int L) {
  if (mu0.L() < L) throw std::invalid_argument("initial moment vector is shorter than the requested order");
  std::vector<ExpPolySum> S;
  S.push_back(ExpPolySum::constant(1.0));
  for (int l = 1; l <= L; ++l) {
    const LimitCoeffs c = limit_coeffs(reg, l);
    ExpPolySum F = c.u * S[l - 1];
    if (c.g != 0) {
      ExpPolySum q2;
      for (int k = 0; k <= l - 2; ++k) q2 += S[k] * S[l - 2 - k];
      F += c.g * q2;
    }
    if (c.h != 0) {
      ExpPolySum q1;
      for (int k = 0; k <= l - 2; ++k) q1 += S[k] * S[l - 1 - k];
      F += c.h * q1;
    }
    S.push_back(ExpPolySum::solve_linear(c.r, mu0.m[l], F));
  }
  return S;
}

MomentVector limit_recursion(const RegimeLimitSpec& spec, int L, LimitMethod method, double dt) {
  if (L < 0) L = spec.mu0.L();
  if (spec.mu0.L() < L) throw std::invalid_argument("initial moment vector is shorter than the requested order");
  if (regime_is_mp(spec.regime.kind) && !spec.mu0.nonneg)
    throw std::domain_error(regime_name(spec.regime.kind) + " needs an initial law on [0, inf)");
  MomentVector out;
  out.nonneg = regime_is_mp(spec.regime.kind);
  out.provenance = "limit-recursion:" + regime_name(spec.regime.kind);
  if (method == LimitMethod::ClosedForm) {
    const auto S = limit_trajectories(spec.regime, spec.mu0, L);
    out.m.resize(L + 1);
    for (int l = 0; l <= L; ++l) out.m[l] = S[l](spec.t);
    return out;
  }
  std::vector<double> y(spec.mu0.m.begin(), spec.mu0.m.begin() + L + 1);
  const size_t n = y.size();
  double t = 0;
  std::vector<double> tmp(n);
  while (t < spec.t) {
    const double h = std::min(dt, spec.t - t);
    const auto k1 = limit_rhs(spec.regime, y);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    const auto k2 = limit_rhs(spec.regime, tmp);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    const auto k3 = limit_rhs(spec.regime, tmp);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    const auto k4 = limit_rhs(spec.regime, tmp);
    for (size_t i = 0; i < n; ++i) y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    t = (h == spec.t - t) ? spec.t : t + h;
  }
  out.m = y;
  return out;
}

bool growth_bound_check(const MomentVector& mu, double gamma) {
  if (!(gamma > 0)) throw std::invalid_argument("growth bound needs gamma > 0");
  for (int l = 1; l <= mu.L(); ++l)
    if (std::abs(mu.m[l]) > std::pow(gamma * l, l)) return false;
  return true;
}

}  // namespace bcj
