#include "bcj/exppoly.hpp"

#include <algorithm>
#include <cmath>

namespace bcj {

namespace {
bool same_rate(double a, double b) {
  return std::abs(a - b) < ExpPolySum::rate_tol * (1 + std::abs(a));
}
}  // namespace

ExpPolySum ExpPolySum::constant(double c) { return term(c, 0, 0.0); }

ExpPolySum ExpPolySum::term(double c, int d, double r) {
  ExpPolySum e;
  e.add_term(c, d, r);
  return e;
}

void ExpPolySum::add_term(double c, int d, double r) {
  if (c == 0) return;
  for (auto it = terms_.begin(); it != terms_.end(); ++it) {
    if (it->d == d && same_rate(it->r, r)) {
      it->c += c;
      if (it->c == 0) terms_.erase(it);
      return;
    }
  }
  terms_.push_back({c, d, r});
}

double ExpPolySum::operator()(double t) const { return static_cast<double>(eval_ld(t)); }

long double ExpPolySum::eval_ld(long double t) const {
  long double s = 0;
  for (const auto& tm : terms_) {
    long double v = tm.c;
    if (tm.d > 0) v *= std::pow(t, static_cast<long double>(tm.d));
    if (tm.r != 0) v *= std::exp(static_cast<long double>(tm.r) * t);
    s += v;
  }
  return s;
}

ExpPolySum ExpPolySum::derivative() const {
  ExpPolySum out;
  for (const auto& tm : terms_) {
    out.add_term(tm.c * tm.r, tm.d, tm.r);
    if (tm.d > 0) out.add_term(tm.c * tm.d, tm.d - 1, tm.r);
  }
  return out;
}

ExpPolySum& ExpPolySum::operator+=(const ExpPolySum& o) {
  for (const auto& tm : o.terms_) add_term(tm.c, tm.d, tm.r);
  return *this;
}

ExpPolySum& ExpPolySum::operator*=(double v) {
  if (v == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& tm : terms_) tm.c *= v;
  return *this;
}

ExpPolySum operator*(const ExpPolySum& a, const ExpPolySum& b) {
  ExpPolySum out;
  for (const auto& x : a.terms_)
    for (const auto& y : b.terms_) out.add_term(x.c * y.c, x.d + y.d, x.r + y.r);
  return out;
}

ExpPolySum ExpPolySum::shifted(double rho) const {
  ExpPolySum out;
  for (const auto& tm : terms_) out.add_term(tm.c, tm.d, tm.r + rho);
  return out;
}

ExpPolySum ExpPolySum::integral() const {
  ExpPolySum out;
  for (const auto& tm : terms_) {
    if (same_rate(tm.r, 0.0)) {
      out.add_term(tm.c / (tm.d + 1), tm.d + 1, 0.0);
      continue;
    }
    // int_0^t s^d e^{rs} ds = e^{rt} sum_j (-1)^j d!/(d-j)! t^{d-j} / r^{j+1} - (-1)^d d!/r^{d+1}
    double fall = 1;  // d!/(d-j)!
    double rp = tm.r;  // r^{j+1}
    for (int j = 0; j <= tm.d; ++j) {
      const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
      out.add_term(tm.c * sgn * fall / rp, tm.d - j, tm.r);
      if (j == tm.d) out.add_term(-tm.c * sgn * fall / rp, 0, 0.0);
      fall *= (tm.d - j);
      rp *= tm.r;
    }
  }
  return out;
}

ExpPolySum ExpPolySum::solve_linear(double rate, double y0, const ExpPolySum& forcing) {
  ExpPolySum y = term(y0, 0, rate);
  y += forcing.shifted(-rate).integral().shifted(rate);
  return y;
}

}  // namespace bcj
