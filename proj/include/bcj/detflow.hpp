#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bcj/exppoly.hpp"
#include "bcj/model.hpp"

namespace bcj {

struct Trajectory {
  DomainKind domain = DomainKind::CompactAlcove;
  std::vector<double> t;
  std::vector<std::vector<double>> x;

  ParticleState state(size_t k) const { return {domain, x[k]}; }
  ParticleState back() const { return {domain, x.back()}; }
};

struct IntegratorOptions {
  double rtol = 1e-11;
  double atol = 1e-13;
  double eta = 0.25;  // fraction of the time to the nearest predicted collision
  // Times at which to record the state; empty means every accepted step.
  std::vector<double> output_times;
  long max_steps = 20'000'000;
  double growth_guard = 1e12;  // noncompact only
  // Called after every accepted step with (t, x).
  std::function<void(double, const std::vector<double>&)> on_step;
};

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;
  long drift_evals = 0;
};

class CollisionError : public std::runtime_error {
 public:
  CollisionError(int i, int j, double t, const std::string& what)
      : std::runtime_error(what), i(i), j(j), t(t) {}
  int i, j;  // j == -1 for a wall
  double t;
};

class SingularStartError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotInImageError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Embedded Dormand-Prince 5(4) on the compact alcove (x0 strictly interior).
Trajectory integrate_interior(const ParticleState& x0, double p, double q, double t_end,
                              const IntegratorOptions& opts = {}, IntegratorStats* stats = nullptr);
// Same scheme on the noncompact chamber.
Trajectory integrate_noncompact(const ParticleState& x0, double p, double q, double t_end,
                                const IntegratorOptions& opts = {}, IntegratorStats* stats = nullptr);

// Elementary symmetric polynomials e_1..e_N.
std::vector<double> esp_forward(const std::vector<double>& x);

struct ESPTrajectory {
  int N = 0;
  DomainKind domain = DomainKind::CompactAlcove;
  std::vector<ExpPolySum> components;  // components[k-1] is e_k

  std::vector<double> operator()(double t) const;
};

// Closed-form solution of the linear ODE system satisfied by e_k(x(t)).
ESPTrajectory esp_closed_form(const std::vector<double>& e0, double p, double q, DomainKind d);

// Sorted real roots of z^N - e_1 z^{N-1} + e_2 z^{N-2} - ..., via the balanced
// companion matrix and Newton polishing.
ParticleState esp_invert(const std::vector<double>& e, DomainKind d, double tol_root = 1e-8);

// D(x) = prod_i (1 - x_i^2) prod_{i != j} (x_j - x_i); noncompact uses prod_i (x_i^2 - 1).
double discriminant(const ParticleState& x);
// log |D(x)|, -inf when D vanishes.
double log_abs_discriminant(const ParticleState& x);

// log of prod (1-x_i)^{q+1-N} (1+x_i)^{p+1-N} prod_{i<j} (x_i-x_j)^2.
double log_potential(const std::vector<double>& x, double p, double q);

struct LyapunovReport {
  std::vector<double> values;
  double min_increment = 0;
  bool nondecreasing = true;
};
LyapunovReport lyapunov_check(const Trajectory& tr, double p, double q, double tol = 1e-10);

enum class BootstrapMethod { Auto, EspInversion, SelfSimilar };

struct BoundaryOptions {
  BootstrapMethod method = BootstrapMethod::Auto;
  double t_b = 0;         // 0: method default
  int max_adapt = 20;     // growth attempts for the ESP bootstrap time
  int esp_grid = 16;      // ESP evaluation points in (0, t_b]
  double tie_tol = 1e-12; // coordinates closer than this form a cluster
  int auto_esp_max_n = 6; // Auto uses ESP inversion up to this N
  IntegratorOptions integ;
};

struct BoundaryResult {
  Trajectory traj;
  double t_b = 0;
  BootstrapMethod used = BootstrapMethod::SelfSimilar;
  IntegratorStats stats;
};

// True when x0 has tied coordinates or touches a wall (up to tie_tol).
bool is_singular_start(const ParticleState& x0, double tie_tol = 1e-12);

// Continuous solution from a start on the boundary (ties or wall contact).
// Interior starts are passed straight to the interior integrator. Requested output
// times are returned in ascending order.
BoundaryResult solve_from_boundary(const ParticleState& x0, double p, double q, double t_end,
                                   const BoundaryOptions& opts = {});

// Leading-order local solution near a singular start: each cluster of m tied
// particles at an interior point b opens like b + 2 sqrt(|1-b^2| t) h_k (h_k the zeros
// of the Hermite polynomial H_m); a cluster of m particles at a wall opens linearly,
// at distance 2 t z_k from the wall (z_k the zeros of a Laguerre polynomial).
std::vector<double> self_similar_state(const ParticleState& x0, double p, double q, double t,
                                       double tie_tol = 1e-12);

// Zeros of H_m (physicists') and of L_m^{(alpha)}, ascending.
std::vector<double> hermite_zeros(int m);
std::vector<double> laguerre_zeros(int m, double alpha);

}  // namespace bcj
