#pragma once

#include <string>
#include <vector>

#include "bcj/exppoly.hpp"
#include "bcj/model.hpp"

namespace bcj {

struct MomentVector {
  std::vector<double> m;  // m[0..L]
  bool nonneg = false;    // law supported on [0, inf)
  std::string provenance;

  int L() const { return static_cast<int>(m.size()) - 1; }
  double operator[](int l) const { return m[l]; }
  // m_0 == 1 and, if tagged nonnegative, m_2 >= m_1^2.
  bool consistent(double tol = 1e-12) const;
};

MomentVector delta_moments(double at, int L);

// m_l = (1/N) sum_i (a (x_i - b))^l.
MomentVector empirical_moments(const std::vector<double>& x, double a, double b, int L);

struct OracleOptions {
  DomainKind domain = DomainKind::CompactAlcove;  // noncompact negates the right-hand side
  double time_scale = 1;  // times are t with raw time t/time_scale
  double rtol = 1e-13;    // RK4 step-doubling control
  double atol = 1e-15;
};

// dS_l/dt of the closed finite-N moment system, l = 0..L (raw time).
std::vector<double> moment_ode_rhs(const std::vector<double>& S, double p, double q, double a, double b,
                                   int N, DomainKind d = DomainKind::CompactAlcove);

// Integrates the finite-N moment system from S0 to each time in t_grid (ascending).
std::vector<MomentVector> moment_ode_oracle(const MomentVector& S0, double p, double q, double a, double b,
                                            int N, const std::vector<double>& t_grid,
                                            const OracleOptions& opts = {});

struct RegimeLimitSpec {
  ScalingRegime regime;
  double t = 0;  // rescaled time
  MomentVector mu0;
};

enum class LimitMethod { ClosedForm, RK4 };

// Limiting moments S_0..S_L at time spec.t (L defaults to mu0.L()).
MomentVector limit_recursion(const RegimeLimitSpec& spec, int L = -1,
                             LimitMethod method = LimitMethod::ClosedForm, double dt = 1e-3);

// Exact exponential-polynomial trajectories S_0(t)..S_L(t) of the limiting recursion.
std::vector<ExpPolySum> limit_trajectories(const ScalingRegime& reg, const MomentVector& mu0, int L);

// |m_l| <= (gamma l)^l for 1 <= l <= L.
bool growth_bound_check(const MomentVector& mu, double gamma);

}  // namespace bcj
