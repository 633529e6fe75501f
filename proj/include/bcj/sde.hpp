#pragma once

#include <cstdint>
#include <vector>

#include "bcj/model.hpp"

namespace bcj {

enum class SdeScheme { EulerProjected, EulerReflected };

struct SdeConfig {
  ModelParams params;  // finite kappa
  SdeScheme scheme = SdeScheme::EulerProjected;
  double dt = 0;       // raw time step; 0 selects default_dt
  uint64_t seed = 1;
  int replicas = 1;
  bool store_steps = false;  // keep every step state and Gaussian increment
  bool zero_noise = false;   // force all Gaussian draws to 0
  double growth_guard = 1e12;
  // Starts with ties or wall contact: frozen flow up to t0 = 1e-3 dt, then a
  // lead-in of steps h = lead_in * t / N until h reaches dt.
  bool bootstrap_singular = true;
  double lead_in = 0.5;
  // Steps are cut to gap_control * (smallest gap)^2 (0 disables).
  double gap_control = 0.2;
};

struct SdePath {
  DomainKind domain = DomainKind::CompactAlcove;
  int replicaId = 0;
  std::vector<double> times;                // recorded times
  std::vector<std::vector<double>> states;  // recorded states
  // With store_steps: step_times[k], step_states[k] for every grid point and the
  // Brownian increments dB[k] used on [step_times[k], step_times[k+1]].
  std::vector<double> step_times;
  std::vector<std::vector<double>> step_states;
  std::vector<std::vector<double>> dB;
  bool stability_warning = false;
  double bootstrap_time = 0;  // end of the frozen bootstrap (0 if none)
};

// 0.1 * min(1/(p+q), collision horizon of the frozen drift at x0).
double default_dt(const ParticleState& x0, const ModelParams& mp);

// Fixed-grid Euler-Maruyama. The grid contains every requested record time; each
// segment between record times is split into equal steps no longer than cfg.dt
// (after the lead-in of a singular start). An empty record list records only
// t = 0 and t_end.
SdePath simulate_compact(const ParticleState& x0, const SdeConfig& cfg, double t_end, int replicaId = 0,
                         const std::vector<double>& record_times = {});
SdePath simulate_noncompact(const ParticleState& x0, const SdeConfig& cfg, double t_end, int replicaId = 0,
                            const std::vector<double>& record_times = {});

// cfg.replicas independent paths, replica r driven by the stream (cfg.seed, r).
std::vector<SdePath> simulate_replicas(const ParticleState& x0, const SdeConfig& cfg, double t_end,
                                       const std::vector<double>& record_times = {}, int jobs = 1);

struct MartingaleSeries {
  std::vector<double> t;  // raw times (grid)
  std::vector<double> M;
  double sup_abs = 0;
};

// Discrete stochastic integral (l/N) sum_steps sum_i Y_i^{l-1} a sqrt(2/kappa) sqrt(1-X_i^2) dB_i
// with Y = a (X - b), i.e. the martingale part of S_{N,l} on the rescaled clock.
// Needs a path simulated with store_steps.
MartingaleSeries martingale_diagnostic(const SdePath& path, const ModelParams& mp, double a, double b, int l);

}  // namespace bcj
