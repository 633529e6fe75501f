#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bcj {

enum class DomainKind { CompactAlcove, NoncompactChamber };

struct ParticleState {
  DomainKind domain = DomainKind::CompactAlcove;
  std::vector<double> x;

  int size() const { return static_cast<int>(x.size()); }
};

// Closed domain membership (sorted, inside [-1,1] or [1,inf)).
bool in_domain(const ParticleState& s);
// Strictly sorted with gaps > gap_tol and strictly inside the open domain.
bool is_interior(const ParticleState& s, double gap_tol = 1e-12);

struct Multiplicities {
  double k1 = 0, k2 = 0, k3 = 1;
};

struct ModelParams {
  double kappa = 1;
  double p = 0;
  double q = 0;
  int N = 1;
};

class ParamError : public std::invalid_argument {
 public:
  ParamError(const std::string& constraint, const std::string& what)
      : std::invalid_argument(what), constraint_(constraint) {}
  const std::string& constraint() const { return constraint_; }

 private:
  std::string constraint_;
};

class SingularConfiguration : public std::domain_error {
 public:
  SingularConfiguration(int i, int j, const std::string& what)
      : std::domain_error(what), i(i), j(j) {}
  int i, j;  // offending particle indices (j == -1 for a wall contact)
};

ModelParams params_from_multiplicities(double k1, double k2, double k3, int N);
Multiplicities multiplicities_from_params(const ModelParams& mp);
// Throws ParamError unless p, q > N-1 and kappa > 0.
void validate(const ModelParams& mp);
// The sufficient non-collision threshold kappa >= 1, p,q >= N-1+2/kappa.
bool below_noncollision_threshold(const ModelParams& mp);

// Drift fields. The checked versions require an interior state.
std::vector<double> drift_compact(const ParticleState& x, double p, double q);
std::vector<double> drift_noncompact(const ParticleState& x, double p, double q);

// Unchecked kernels used by the integrators. Pair sums run over ascending j.
void drift_compact_raw(std::span<const double> x, double p, double q, std::span<double> out);
void drift_noncompact_raw(std::span<const double> x, double p, double q, std::span<double> out);
void drift_raw(DomainKind d, std::span<const double> x, double p, double q, std::span<double> out);

// Scaling regimes.
enum class Regime {
  WignerStationary,
  WignerDegenerate,
  WignerLocal,
  WignerLocalDrift,
  MPStationary,
  MPLocal,
  NCWignerLocal,
  NCMPTimeInverted,
  NCMPLocal,
};

std::string regime_name(Regime r);
// Accepts the enum names; also reports the out-of-scope families by name.
Regime parse_regime(const std::string& name);
DomainKind regime_domain(Regime r);
bool regime_is_local(Regime r);     // time scale s_N is a free sequence
bool regime_needs_center(Regime r); // center b_N is a free sequence
bool regime_is_mp(Regime r);        // nonnegative-support laws

struct Scaling {
  double a = 1;  // space scale
  double b = 0;  // center
  double s = 1;  // time scale: rescaled time t corresponds to raw time t/s
};

// Limit constants; only those relevant to the regime are read.
struct RegimeConstants {
  double C = 0;     // lim p/q
  double B = 0;     // lim b_N
  double c = 0;     // drift constant for WignerLocalDrift
  double phat = 1;  // lim p/N
  double qhat = 1;  // lim q/N
};

struct ScalingRegime {
  Regime kind = Regime::WignerStationary;
  RegimeConstants k;
};

// (a_N, b_N, s_N) from (p_N, q_N, N). Local regimes take s_N (and b_N where free)
// from the caller.
Scaling regime_scaling(Regime r, double p, double q, int N, double s_local = 0,
                       double b_local = 0);

// Finite-N stand-ins for the limit constants (C_N = p/q, phat_N = p/N, ...).
RegimeConstants plugin_constants(Regime r, double p, double q, int N, const Scaling& sc);

// Compares declared constants to the finite-N values; returns a description of the
// first mismatch beyond rel_tol, or an empty string.
std::string check_constants(Regime r, const RegimeConstants& declared,
                            const RegimeConstants& finite, double rel_tol);

}  // namespace bcj
