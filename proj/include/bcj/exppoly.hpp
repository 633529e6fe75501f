#pragma once

#include <vector>

namespace bcj {

// Sum of terms c * t^d * exp(r t).
class ExpPolySum {
 public:
  struct Term {
    double c;
    int d;
    double r;
  };

  ExpPolySum() = default;
  static ExpPolySum constant(double c);
  static ExpPolySum term(double c, int d, double r);

  const std::vector<Term>& terms() const { return terms_; }

  double operator()(double t) const;
  long double eval_ld(long double t) const;
  ExpPolySum derivative() const;

  ExpPolySum& operator+=(const ExpPolySum& o);
  ExpPolySum& operator*=(double v);
  friend ExpPolySum operator+(ExpPolySum a, const ExpPolySum& b) { return a += b; }
  friend ExpPolySum operator*(double v, ExpPolySum a) { return a *= v; }
  friend ExpPolySum operator*(const ExpPolySum& a, const ExpPolySum& b);

  // exp(rho t) * this
  ExpPolySum shifted(double rho) const;
  // t -> integral_0^t of this
  ExpPolySum integral() const;

  // Solution of y' = rate*y + forcing, y(0) = y0 (variation of constants).
  static ExpPolySum solve_linear(double rate, double y0, const ExpPolySum& forcing);

  // Two rates are merged when |r - r'| < rate_tol * (1 + |r|).
  static constexpr double rate_tol = 1e-9;

 private:
  void add_term(double c, int d, double r);
  std::vector<Term> terms_;
};

}  // namespace bcj
