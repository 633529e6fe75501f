#pragma once

#include <memory>
#include <vector>

#include "bcj/model.hpp"
#include "bcj/moments.hpp"

namespace bcj {

// Free cumulants k_1..k_L stored at indices 1..L (index 0 unused, set to 0).
std::vector<double> moments_to_cumulants(const MomentVector& m);
MomentVector cumulants_to_moments(const std::vector<double>& kappa);

MomentVector free_add(const MomentVector& a, const MomentVector& b);
MomentVector scale_measure(double v, const MomentVector& m);
// Moments of (sqrt mu)_even: m'_{2k} = m_k, odd moments vanish. Output order 2 L.
MomentVector even_sqrt(const MomentVector& m);
// Moments of the image of a symmetric law under x -> x^2: m'_k = m_{2k}. Output order L/2.
MomentVector square_measure(const MomentVector& m, double sym_tol = 1e-9);

MomentVector semicircle_moments(double radius, int L);
MomentVector mp_moments(double c, double t, int L);

// Symbolic measure expression evaluated on truncated moment sequences.
struct MeasureExpr {
  enum class Kind { Semicircle, MarchenkoPastur, Dirac, Empirical, Scale, FreeAdd, EvenSqrt, Square };
  Kind kind = Kind::Dirac;
  double p1 = 0;  // radius / c / location / scale factor
  double p2 = 0;  // MP time
  MomentVector leaf;
  std::vector<MeasureExpr> kids;

  static MeasureExpr semicircle(double radius);
  static MeasureExpr marchenko_pastur(double c, double t);
  static MeasureExpr dirac(double at);
  static MeasureExpr empirical(MomentVector m);
  static MeasureExpr scale(double v, MeasureExpr e);
  static MeasureExpr free_add(std::vector<MeasureExpr> es);
  static MeasureExpr even_sqrt(MeasureExpr e);
  static MeasureExpr square(MeasureExpr e);

  // Moments up to order L; nodes request the orders their children need.
  MomentVector evaluate(int L) const;
  // Structural support tag.
  bool nonneg() const;
  // Largest order this expression can deliver (unbounded unless an empirical leaf is present).
  int max_order() const;
};

MeasureExpr limit_expression(const ScalingRegime& reg, double t, const MomentVector& mu0);
MomentVector predict_limit(const ScalingRegime& reg, double t, const MomentVector& mu0, int L = -1);

}  // namespace bcj
