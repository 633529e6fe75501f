#pragma once

#include <json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "bcj/detflow.hpp"
#include "bcj/freeprob.hpp"
#include "bcj/harness.hpp"
#include "bcj/sde.hpp"

namespace bcj {

using json = nlohmann::json;

// Malformed or unreadable configuration. The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

json load_json_file(const std::string& path);

// Measure expressions:
//   {"dirac": x}  {"semicircle": r}  {"mp": {"c": c, "t": t}}
//   {"atoms": {"x": [...], "w": [...]}}  {"moments": [m0, m1, ...]}
//   {"scale": {"by": v, "of": E}}  {"free_add": [E, ...]}  {"even_sqrt": E}  {"square": E}
MeasureExpr parse_measure(const json& j);
json measure_to_json(const MeasureExpr& e);

// Point masses at x with weights w, as an empirical leaf with moments up to order L.
MeasureExpr atoms_measure(const std::vector<double>& x, const std::vector<double>& w, int L = 64);

Experiment parse_experiment(const json& j);

struct ZerosConfig {
  ZerosKind kind = ZerosKind::WignerZeros;
  std::vector<int> N_list;
  ParamRule rule;
  int L = 6;
};
ZerosConfig parse_zeros(const json& j);

struct OdeRunConfig {
  DomainKind domain = DomainKind::CompactAlcove;
  double p = 0, q = 0;
  std::vector<double> x0;
  double t_end = 1;
  BoundaryOptions boundary;  // integ.output_times holds the requested grid
  bool lyapunov = true;
};
OdeRunConfig parse_ode_run(const json& j);

struct SdeRunConfig {
  DomainKind domain = DomainKind::CompactAlcove;
  SdeConfig cfg;
  std::vector<double> x0;
  double t_end = 1;
  std::vector<double> record_times;
  // Times refer to the unrescaled process; simulated times are kappa * t.
  bool unrescaled_clock = false;
  double a = 1, b = 0;  // moment window for the replica summary
  int L = 4;
};
SdeRunConfig parse_sde_run(const json& j);

struct OracleConfig {
  DomainKind domain = DomainKind::CompactAlcove;
  double p = 0, q = 0;
  int N = 0;
  double a = 1, b = 0;
  int L = 6;
  std::vector<double> x0;  // particle start; S0 is derived from it
  std::vector<double> t_grid;
  bool compare_particles = true;
};
OracleConfig parse_oracle(const json& j);

struct FreeprobConfig {
  // Either a plain expression or a regime prediction.
  bool has_regime = false;
  MeasureExpr expr;
  ScalingRegime regime;
  std::vector<double> t_list;
  int L = 8;
};
FreeprobConfig parse_freeprob(const json& j);

}  // namespace bcj
