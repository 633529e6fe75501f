#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bcj/detflow.hpp"
#include "bcj/freeprob.hpp"
#include "bcj/model.hpp"
#include "bcj/moments.hpp"
#include "bcj/sde.hpp"

namespace bcj {

// value(N) = coef * N^exponent + shift
struct PowerRule {
  double coef = 1, exponent = 1, shift = 0;
  double operator()(int N) const { return coef * std::pow(static_cast<double>(N), exponent) + shift; }
};

struct ParamRule {
  PowerRule p, q;
  PowerRule s{1, 0, 0};  // time scale s_N for local regimes
  double center = 0;     // b_N for WignerLocal / WignerLocalDrift / NCWignerLocal
  bool swap_pq = false;  // run with (p,q) exchanged (sign change of all particles)

  // (p_N, q_N) as used by the dynamics, i.e. after the optional swap.
  std::pair<double, double> pq(int N) const;
};

enum class DynamicsKind { Frozen, Stochastic };
enum class ConstantsMode { PlugIn, Declared };
enum class StartMode { Quantile, IID };

struct StochasticSpec {
  double kappa = 1;
  int replicas = 1;
  double dt_rescaled = 1e-3;  // step on the rescaled clock; raw step is dt_rescaled / s_N
  SdeScheme scheme = SdeScheme::EulerProjected;
  uint64_t seed = 1;
};

struct Experiment {
  ScalingRegime regime;
  ConstantsMode constants = ConstantsMode::PlugIn;
  double constants_tol = 0.05;
  DynamicsKind dynamics = DynamicsKind::Frozen;
  StochasticSpec stochastic;
  std::vector<int> N_list;
  ParamRule rule;
  MeasureExpr mu0 = MeasureExpr::dirac(0);
  std::vector<double> t_list;  // rescaled times
  int L = 6;
  double gamma = 10;  // moment growth constant for mu0
  StartMode start = StartMode::Quantile;
  uint64_t start_seed = 7;  // IID start only
  int quad_nodes = 8;       // maximum number of support points of the moment-matched start law
  BoundaryOptions boundary;
  int jobs = 1;
};

class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InfeasibleStartError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct StartResult {
  ParticleState state;
  int clipped = 0;
  std::vector<double> nodes, weights;  // discrete law in rescaled coordinates
  std::vector<int> counts;
};

// Gauss quadrature of mu0 (recovered from its moments), particle counts by the
// largest-remainder rule, positions x = b + y/a. Equal coordinates are allowed;
// the dynamics start them through solve_from_boundary.
StartResult make_start(int N, const Scaling& sc, DomainKind d, const MomentVector& mu0, int max_nodes = 8,
                       StartMode mode = StartMode::Quantile, uint64_t seed = 7, double clip_tol = 1e-9);

// Nodes and weights of the Gauss rule with at most max_nodes points matching m.
void gauss_rule_from_moments(const MomentVector& m, int max_nodes, std::vector<double>& nodes,
                             std::vector<double>& weights);

struct ReportRow {
  int N = 0;
  double t = 0;
  int l = 0;
  double empirical = 0;
  double predicted = 0;
  double gap = 0;     // |empirical - predicted|
  double relgap = 0;  // gap / max(|predicted_l|, predicted_2^{l/2})
  double stderr_ = std::nan("");  // Monte Carlo standard error of the replica mean
  double path_relgap = std::nan("");  // mean over replicas of the per-path relative gap
  int replicas = 0;
};

struct DecayFit {
  double t = 0;
  int l = 0;
  double order = 0;  // fitted exponent: gap ~ N^{-order}
  bool monotone = true;
};

struct NInfo {
  int N = 0;
  double p = 0, q = 0;
  Scaling scaling;
  RegimeConstants constants;
  int clipped = 0;
  double t_bootstrap = 0;
};

struct ConvergenceReport {
  std::string label;
  std::vector<ReportRow> rows;
  std::vector<DecayFit> fits;
  std::vector<NInfo> per_N;
  std::vector<std::string> warnings;

  const ReportRow* find(int N, double t, int l) const;
};

// Numerical checks of the regime hypotheses along N_list; empty if all pass.
std::vector<std::string> check_hypotheses(const Experiment& e);

// Relative gap scale: max(|pred_l|, pred_2^{l/2}), or 1 if both vanish.
double gap_scale(const MomentVector& pred, int l);

ConvergenceReport run_experiment(const Experiment& e);

enum class ZerosKind { WignerZeros, MPZeros };

ConvergenceReport zeros_limit_experiment(ZerosKind kind, const std::vector<int>& N_list, const ParamRule& rule,
                                         int L, ConstantsMode mode = ConstantsMode::PlugIn,
                                         const RegimeConstants& declared = {});

void fit_decay(ConvergenceReport& rep);

}  // namespace bcj
