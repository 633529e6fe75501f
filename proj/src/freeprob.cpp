#include "bcj/freeprob.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <stdexcept>

namespace bcj {

namespace {

// Coefficient [z^j] of M(z)^k for j <= J, with M(z) = sum_i m_i z^i, m_0 = 1.
using Table = std::vector<std::vector<long double>>;
Table series_powers(const std::vector<double>& m, int K, int J) {
  Table P(K + 1, std::vector<long double>(J + 1, 0.0L));
  P[0][0] = 1;
  for (int k = 1; k <= K; ++k)
    for (int j = 0; j <= J; ++j) {
      long double s = 0;
      for (int i = 0; i <= j && i < static_cast<int>(m.size()); ++i) s += m[i] * P[k - 1][j - i];
      P[k][j] = s;
    }
  return P;
}

MomentVector mp_moments_formal(double c, double t, int L) {
  std::vector<double> k(L + 1, 0.0);
  double tn = t;
  for (int n = 1; n <= L; ++n, tn *= t) k[n] = c * tn;
  MomentVector mv = cumulants_to_moments(k);
  mv.nonneg = true;
  mv.provenance = "marchenko-pastur";
  return mv;
}

}  // namespace

std::vector<double> moments_to_cumulants(const MomentVector& mv) {
  const int L = mv.L();
  if (L < 0 || std::abs(mv.m[0] - 1) > 1e-12) throw std::invalid_argument("moment vector needs m_0 = 1");
  std::vector<double> kappa(L + 1, 0.0);
  if (L == 0) return kappa;
  // m_n = sum_{k=1}^n kappa_k [z^{n-k}] M^k; every coefficient needed uses m_0..m_{n-1}.
  const auto P = series_powers(mv.m, L, L);
  std::vector<long double> k(L + 1, 0.0L);
  for (int n = 1; n <= L; ++n) {
    long double s = mv.m[n];
    for (int j = 1; j < n; ++j) s -= k[j] * P[j][n - j];
    k[n] = s;
    kappa[n] = static_cast<double>(s);
  }
  return kappa;
}

MomentVector cumulants_to_moments(const std::vector<double>& kappa) {
  const int L = static_cast<int>(kappa.size()) - 1;
  MomentVector mv;
  mv.m.assign(L + 1, 0.0);
  mv.m[0] = 1;
  // Powers are rebuilt incrementally: P[k][j] only needs m_i with i <= j.
  Table P(L + 1, std::vector<long double>(L + 1, 0.0L));
  std::vector<long double> m(L + 1, 0.0L);
  m[0] = 1;
  P[0][0] = 1;
  for (int k = 1; k <= L; ++k) P[k][0] = 1;
  for (int n = 1; n <= L; ++n) {
    long double s = kappa[n];  // k = n term, [z^0] M^n = 1
    for (int k = 1; k < n; ++k) s += kappa[k] * P[k][n - k];
    m[n] = s;
    mv.m[n] = static_cast<double>(s);
    // Extend the power table to column n now that m_n is known.
    for (int k = 1; k <= L; ++k) {
      long double v = 0;
      for (int i = 0; i <= n; ++i) v += m[i] * P[k - 1][n - i];
      P[k][n] = v;
    }
  }
  mv.provenance = "cumulants";
  return mv;
}

MomentVector free_add(const MomentVector& a, const MomentVector& b) {
  if (a.L() != b.L()) throw std::invalid_argument("free_add needs moment vectors of equal length");
  auto ka = moments_to_cumulants(a);
  const auto kb = moments_to_cumulants(b);
  for (size_t n = 1; n < ka.size(); ++n) ka[n] += kb[n];
  MomentVector out = cumulants_to_moments(ka);
  out.provenance = "free-add";
  return out;
}

MomentVector scale_measure(double v, const MomentVector& m) {
  MomentVector out = m;
  double f = 1;
  for (double& x : out.m) {
    x *= f;
    f *= v;
  }
  out.nonneg = v == 0 || (m.nonneg && v > 0);
  out.provenance = "scale";
  return out;
}

MomentVector even_sqrt(const MomentVector& m) {
  if (!m.nonneg) throw std::domain_error("even_sqrt needs a law on [0, inf)");
  MomentVector out;
  out.m.assign(2 * m.L() + 1, 0.0);
  for (int k = 0; k <= m.L(); ++k) out.m[2 * k] = m.m[k];
  out.nonneg = m.L() == 0 || (m.L() >= 1 && m.m[1] == 0);
  out.provenance = "even-sqrt";
  return out;
}

MomentVector square_measure(const MomentVector& m, double sym_tol) {
  for (int l = 1; l <= m.L(); l += 2) {
    const double scale = std::max({1.0, std::abs(m.m[l - 1]), l + 1 <= m.L() ? std::abs(m.m[l + 1]) : 0.0});
    if (std::abs(m.m[l]) > sym_tol * scale)
      throw std::domain_error("square_measure needs a symmetric law (odd moment " + std::to_string(l) +
                              " is not ~0)");
  }
  MomentVector out;
  out.m.resize(m.L() / 2 + 1);
  for (int k = 0; k <= m.L() / 2; ++k) out.m[k] = m.m[2 * k];
  out.nonneg = true;
  out.provenance = "square";
  return out;
}

MomentVector semicircle_moments(double radius, int L) {
  if (!(radius >= 0)) throw std::invalid_argument("semicircle radius must be nonnegative");
  MomentVector mv;
  mv.m.assign(L + 1, 0.0);
  const double r2 = radius * radius / 4;
  double cat = 1, pw = 1;  // Catalan(k), (radius/2)^{2k}
  for (int k = 0; 2 * k <= L; ++k) {
    mv.m[2 * k] = cat * pw;
    cat = cat * 2 * (2 * k + 1) / (k + 2);
    pw *= r2;
  }
  mv.nonneg = radius == 0;
  mv.provenance = "semicircle";
  return mv;
}

MomentVector mp_moments(double c, double t, int L) {
  if (!(c >= 0)) throw std::invalid_argument("Marchenko-Pastur parameter c must be nonnegative");
  if (!(t >= 0)) throw std::invalid_argument("Marchenko-Pastur time must be nonnegative");
  return mp_moments_formal(c, t, L);
}

MeasureExpr MeasureExpr::semicircle(double radius) {
  MeasureExpr e;
  e.kind = Kind::Semicircle;
  e.p1 = radius;
  return e;
}
MeasureExpr MeasureExpr::marchenko_pastur(double c, double t) {
  MeasureExpr e;
  e.kind = Kind::MarchenkoPastur;
  e.p1 = c;
  e.p2 = t;
  return e;
}
MeasureExpr MeasureExpr::dirac(double at) {
  MeasureExpr e;
  e.kind = Kind::Dirac;
  e.p1 = at;
  return e;
}
MeasureExpr MeasureExpr::empirical(MomentVector m) {
  MeasureExpr e;
  e.kind = Kind::Empirical;
  e.leaf = std::move(m);
  return e;
}
MeasureExpr MeasureExpr::scale(double v, MeasureExpr c) {
  MeasureExpr e;
  e.kind = Kind::Scale;
  e.p1 = v;
  e.kids.push_back(std::move(c));
  return e;
}
MeasureExpr MeasureExpr::free_add(std::vector<MeasureExpr> es) {
  if (es.empty()) throw std::invalid_argument("free_add needs at least one operand");
  MeasureExpr e;
  e.kind = Kind::FreeAdd;
  e.kids = std::move(es);
  return e;
}
MeasureExpr MeasureExpr::even_sqrt(MeasureExpr c) {
  MeasureExpr e;
  e.kind = Kind::EvenSqrt;
  e.kids.push_back(std::move(c));
  return e;
}
MeasureExpr MeasureExpr::square(MeasureExpr c) {
  MeasureExpr e;
  e.kind = Kind::Square;
  e.kids.push_back(std::move(c));
  return e;
}

bool MeasureExpr::nonneg() const {
  switch (kind) {
    case Kind::Semicircle: return p1 == 0;
    case Kind::MarchenkoPastur: return true;
    case Kind::Dirac: return p1 >= 0;
    case Kind::Empirical: return leaf.nonneg;
    case Kind::Scale: return p1 > 0 && kids[0].nonneg();
    case Kind::Square: return true;
    case Kind::EvenSqrt: return false;
    case Kind::FreeAdd: {
      bool all_mp = true;
      for (const auto& k : kids)
        if (k.kind != Kind::MarchenkoPastur || k.p2 != kids[0].p2) all_mp = false;
      if (all_mp) return true;
      if (kids.size() == 1) return kids[0].nonneg();
      return false;
    }
  }
  return false;
}

int MeasureExpr::max_order() const {
  switch (kind) {
    case Kind::Empirical: return leaf.L();
    case Kind::Scale: return kids[0].max_order();
    case Kind::FreeAdd: {
      int m = INT_MAX;
      for (const auto& k : kids) m = std::min(m, k.max_order());
      return m;
    }
    case Kind::EvenSqrt: {
      const int c = kids[0].max_order();
      return c >= INT_MAX / 2 ? INT_MAX : 2 * c + 1;
    }
    case Kind::Square: {
      const int c = kids[0].max_order();
      return c == INT_MAX ? INT_MAX : c / 2;
    }
    default: return INT_MAX;
  }
}

MomentVector MeasureExpr::evaluate(int L) const {
  switch (kind) {
    case Kind::Semicircle: return semicircle_moments(p1, L);
    case Kind::MarchenkoPastur:
      if (!(p2 >= 0)) throw std::invalid_argument("Marchenko-Pastur time must be nonnegative");
      return mp_moments_formal(p1, p2, L);
    case Kind::Dirac: return delta_moments(p1, L);
    case Kind::Empirical: {
      if (leaf.L() < L)
        throw std::invalid_argument("empirical leaf has " + std::to_string(leaf.L()) + " moments but order " +
                                    std::to_string(L) + " was requested");
      MomentVector out = leaf;
      out.m.resize(L + 1);
      return out;
    }
    case Kind::Scale: return scale_measure(p1, kids[0].evaluate(L));
    case Kind::FreeAdd: {
      MomentVector acc = kids[0].evaluate(L);
      for (size_t i = 1; i < kids.size(); ++i) acc = bcj::free_add(acc, kids[i].evaluate(L));
      acc.nonneg = nonneg();
      return acc;
    }
    case Kind::EvenSqrt: {
      MomentVector c = kids[0].evaluate(L / 2);
      c.nonneg = c.nonneg || kids[0].nonneg();
      MomentVector out = bcj::even_sqrt(c);
      out.m.resize(L + 1, 0.0);
      out.nonneg = false;
      return out;
    }
    case Kind::Square: return square_measure(kids[0].evaluate(2 * L));
  }
  throw std::logic_error("unknown measure node");
}

MeasureExpr limit_expression(const ScalingRegime& reg, double t, const MomentVector& mu0) {
  using E = MeasureExpr;
  const auto& k = reg.k;
  const E mu = E::empirical(mu0);
  auto need_nonneg = [&]() {
    if (!mu0.nonneg) throw std::domain_error(regime_name(reg.kind) + " needs an initial law on [0, inf)");
  };
  switch (reg.kind) {
    case Regime::WignerStationary:
      return E::free_add({E::scale(std::exp(-t), mu),
                          E::scale(std::sqrt(1 - std::exp(-2 * t)), E::semicircle(4 * std::pow(1 + k.C, -1.5)))});
    case Regime::WignerDegenerate: return E::scale(std::exp(-t), mu);
    case Regime::WignerLocal:
      if (k.B * k.B > 1) throw std::domain_error("WignerLocal needs |B| <= 1");
      return E::free_add({mu, E::semicircle(2 * std::sqrt(2 * (1 - k.B * k.B) * t))});
    case Regime::WignerLocalDrift:
      if (k.B * k.B > 1) throw std::domain_error("WignerLocalDrift needs |B| <= 1");
      return E::free_add({mu, E::semicircle(2 * std::sqrt(2 * (1 - k.B * k.B) * t)), E::dirac(k.c * t)});
    case Regime::NCWignerLocal:
      if (k.B * k.B < 1) throw std::domain_error("NCWignerLocal needs B >= 1");
      return E::free_add({mu, E::semicircle(2 * std::sqrt(2 * (k.B * k.B - 1) * t))});
    case Regime::MPStationary: {
      need_nonneg();
      const double u = 1 - std::exp(-t);
      return E::free_add({E::square(E::free_add({E::semicircle(2 * std::sqrt(2 * u)),
                                                 E::even_sqrt(E::scale(std::exp(-t), mu))})),
                          E::marchenko_pastur(k.phat - 1, 2 * u)});
    }
    case Regime::MPLocal:
      need_nonneg();
      return E::free_add({E::square(E::free_add({E::semicircle(2 * std::sqrt(2 * t)), E::even_sqrt(mu)})),
                          E::marchenko_pastur(k.phat - 1, 2 * t)});
    case Regime::NCMPTimeInverted: {
      need_nonneg();
      const double u = std::exp(t) - 1;
      return E::free_add({E::square(E::free_add({E::semicircle(2 * std::sqrt(2 * u)),
                                                 E::even_sqrt(E::scale(std::exp(t), mu))})),
                          E::marchenko_pastur(k.qhat - 1, 2 * u)});
    }
    case Regime::NCMPLocal:
      need_nonneg();
      return E::free_add({E::square(E::free_add({E::semicircle(2 * std::sqrt(2 * t)), E::even_sqrt(mu)})),
                          E::marchenko_pastur(k.qhat - 1, 2 * t)});
  }
  throw std::logic_error("unknown regime");
}

MomentVector predict_limit(const ScalingRegime& reg, double t, const MomentVector& mu0, int L) {
  if (L < 0) L = mu0.L();
  MomentVector out = limit_expression(reg, t, mu0).evaluate(L);
  out.nonneg = regime_is_mp(reg.kind);
  out.provenance = "predict-limit:" + regime_name(reg.kind);
  return out;
}

}  // namespace bcj
