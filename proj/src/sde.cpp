#include "bcj/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "bcj/detflow.hpp"

namespace bcj {

namespace {

uint64_t splitmix64(uint64_t& s) {
  uint64_t z = (s += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Independent engine per (seed, replica): the replica count never shifts a stream.
std::mt19937_64 replica_engine(uint64_t seed, int replica) {
  uint64_t s = seed ^ (0xD1B54A32D192ED03ull * (static_cast<uint64_t>(replica) + 1));
  std::seed_seq seq{static_cast<uint32_t>(splitmix64(s)), static_cast<uint32_t>(splitmix64(s)),
                    static_cast<uint32_t>(splitmix64(s)), static_cast<uint32_t>(splitmix64(s))};
  return std::mt19937_64(seq);
}

// Frozen drift with exact ties contributing nothing (principal value).
void drift_pv(DomainKind d, const std::vector<double>& x, double p, double q, std::vector<double>& out) {
  const size_t n = x.size();
  const bool compact = d == DomainKind::CompactAlcove;
  for (size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    double acc = 0;
    for (size_t j = 0; j < n; ++j) {
      if (j == i || x[j] == xi) continue;
      acc += compact ? (1 - xi * x[j]) / (xi - x[j]) : (xi * x[j] - 1) / (xi - x[j]);
    }
    out[i] = compact ? (p - q) - (p + q) * xi + 2 * acc : (q - p) + (q + p) * xi + 2 * acc;
  }
}

// Grid from t_start to t_end containing every record time. With a lead-in the
// steps first grow geometrically, h = theta t / N, until they reach dt; the rest
// of each segment between record times is split into equal steps no longer than dt.
std::vector<double> build_grid(double t_start, double t_end, double dt, std::vector<double> rec, bool lead,
                               double theta, int N) {
  rec.push_back(t_end);
  std::sort(rec.begin(), rec.end());
  for (double r : rec)
    if (r < 0 || r > t_end) throw std::invalid_argument("record time outside [0, t_end]");
  std::vector<double> grid{t_start};
  if (lead && t_start > 0) {
    size_t nr = 0;
    for (;;) {
      const double t = grid.back();
      const double h = theta * t / N;
      if (h >= dt || t >= t_end) break;
      while (nr < rec.size() && rec[nr] <= t) ++nr;
      grid.push_back(std::min(t + h, rec[nr]));
    }
  }
  for (double r : rec) {
    const double t0 = grid.back();
    if (r <= t0) continue;
    const long n = std::max(1L, static_cast<long>(std::ceil((r - t0) / dt - 1e-9)));
    for (long k = 1; k < n; ++k) grid.push_back(t0 + (r - t0) * k / n);
    grid.push_back(r);
  }
  return grid;
}

SdePath simulate(DomainKind d, const ParticleState& x0, const SdeConfig& cfg, double t_end, int replicaId,
                 const std::vector<double>& record_times) {
  if (x0.domain != d) throw std::invalid_argument("start state has the wrong domain");
  if (!in_domain(x0)) throw std::invalid_argument("start state is outside the closed domain");
  validate(cfg.params);
  if (cfg.params.N != x0.size()) throw std::invalid_argument("start state size differs from N");
  const double p = cfg.params.p, q = cfg.params.q;
  const int N = x0.size();
  const double dt = cfg.dt > 0 ? cfg.dt : default_dt(x0, cfg.params);
  const double sig = std::sqrt(2.0 / cfg.params.kappa);
  const bool compact = d == DomainKind::CompactAlcove;

  SdePath path;
  path.domain = d;
  path.replicaId = replicaId;
  path.stability_warning = dt * (p + q) > 0.5;

  std::vector<double> rec = record_times;
  std::sort(rec.begin(), rec.end());
  const bool record_ends = record_times.empty();

  // Singular start: the frozen flow carries the state to a tiny t0 where the
  // particles are separated; the noise over [0, t0] is of order sqrt(t0).
  std::vector<double> x = x0.x;
  double t_start = 0;
  const bool boot = cfg.bootstrap_singular && N > 1 && t_end > 0 && is_singular_start(x0);
  if (boot) {
    t_start = std::min(1e-3 * dt, t_end);
    BoundaryOptions bo;
    bo.method = BootstrapMethod::SelfSimilar;
    x = solve_from_boundary(x0, p, q, t_start, bo).traj.x.back();
    path.bootstrap_time = t_start;
  }
  const std::vector<double> grid = build_grid(t_start, t_end, dt, rec, boot, cfg.lead_in, N);

  auto engine = replica_engine(cfg.seed, replicaId);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> v(N), dW(N);
  size_t next_rec = 0;
  auto maybe_record = [&](double t) {
    while (next_rec < rec.size() && rec[next_rec] <= t) {
      path.times.push_back(rec[next_rec]);
      path.states.push_back(rec[next_rec] == 0 ? x0.x : x);
      ++next_rec;
    }
  };
  if (record_ends) {
    path.times.push_back(0);
    path.states.push_back(x0.x);
  }
  if (cfg.store_steps) {
    path.step_times.push_back(0);
    path.step_states.push_back(x0.x);
    if (boot) {
      path.dB.push_back(std::vector<double>(N, 0.0));
      path.step_times.push_back(t_start);
      path.step_states.push_back(x);
    }
  }
  maybe_record(t_start);

  for (size_t k = 1; k < grid.size(); ++k) {
    double t = grid[k - 1];
    while (t < grid[k]) {
      // Near a collision the repulsion 2/gap makes a full step overshoot; such
      // steps are cut to gap_control * gap^2.
      double h = grid[k] - t;
      if (cfg.gap_control > 0 && N > 1) {
        double g = std::numeric_limits<double>::infinity();
        for (int i = 1; i < N; ++i) g = std::min(g, x[i] - x[i - 1]);
        const double hg = cfg.gap_control * g * g;
        if (hg < h) h = std::max(hg, 1e-6 * (grid[k] - grid[k - 1]));
      }
      const double tn = h >= grid[k] - t ? grid[k] : t + h;
      h = tn - t;
      const double sh = std::sqrt(h);
      drift_pv(d, x, p, q, v);
      for (int i = 0; i < N; ++i) {
        const double xi = gauss(engine);
        dW[i] = cfg.zero_noise ? 0.0 : sh * xi;
      }
      for (int i = 0; i < N; ++i) {
        const double w = compact ? 1 - x[i] * x[i] : x[i] * x[i] - 1;
        x[i] += v[i] * h + sig * std::sqrt(std::max(0.0, w)) * dW[i];
        if (!std::isfinite(x[i])) throw std::runtime_error("SDE step produced a non-finite state");
        if (cfg.scheme == SdeScheme::EulerReflected) {
          if (compact) {
            if (x[i] > 1) x[i] = 2 - x[i];
            if (x[i] < -1) x[i] = -2 - x[i];
          } else if (x[i] < 1) {
            x[i] = 2 - x[i];
          }
        }
        if (compact)
          x[i] = std::clamp(x[i], -1.0, 1.0);
        else
          x[i] = std::max(x[i], 1.0);
      }
      std::sort(x.begin(), x.end());
      if (!compact && x.back() > cfg.growth_guard) throw std::overflow_error("SDE growth guard reached");
      if (cfg.store_steps) {
        path.dB.push_back(dW);
        path.step_times.push_back(tn);
        path.step_states.push_back(x);
      }
      t = tn;
    }
    maybe_record(grid[k]);
  }
  if (record_ends) {
    path.times.push_back(t_end);
    path.states.push_back(x);
  }
  return path;
}

}  // namespace

double default_dt(const ParticleState& x0, const ModelParams& mp) {
  double cap = 1.0 / (mp.p + mp.q);
  const auto& x = x0.x;
  bool interior = is_interior(x0, 0.0);
  if (interior && x.size() > 1) {
    std::vector<double> v(x.size());
    drift_raw(x0.domain, x, mp.p, mp.q, v);
    for (size_t i = 0; i + 1 < x.size(); ++i) {
      const double close = v[i] - v[i + 1];
      if (close > 0) cap = std::min(cap, (x[i + 1] - x[i]) / close);
    }
  }
  return 0.1 * cap;
}

SdePath simulate_compact(const ParticleState& x0, const SdeConfig& cfg, double t_end, int replicaId,
                         const std::vector<double>& record_times) {
  return simulate(DomainKind::CompactAlcove, x0, cfg, t_end, replicaId, record_times);
}

SdePath simulate_noncompact(const ParticleState& x0, const SdeConfig& cfg, double t_end, int replicaId,
                            const std::vector<double>& record_times) {
  return simulate(DomainKind::NoncompactChamber, x0, cfg, t_end, replicaId, record_times);
}

std::vector<SdePath> simulate_replicas(const ParticleState& x0, const SdeConfig& cfg, double t_end,
                                       const std::vector<double>& record_times, int jobs) {
  if (cfg.replicas < 1) throw std::invalid_argument("replicas must be >= 1");
  std::vector<SdePath> out(cfg.replicas);
  auto one = [&](int r) { out[r] = simulate(x0.domain, x0, cfg, t_end, r, record_times); };
  jobs = std::max(1, std::min(jobs, cfg.replicas));
  if (jobs == 1) {
    for (int r = 0; r < cfg.replicas; ++r) one(r);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(jobs);
  for (int w = 0; w < jobs; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int r = w; r < cfg.replicas; r += jobs) one(r);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

MartingaleSeries martingale_diagnostic(const SdePath& path, const ModelParams& mp, double a, double b, int l) {
  if (l < 1) throw std::invalid_argument("martingale order l must be >= 1");
  if (path.domain != DomainKind::CompactAlcove)
    throw std::invalid_argument("martingale diagnostic is defined for the compact process");
  if (path.step_states.empty()) throw std::invalid_argument("path was simulated without store_steps");
  MartingaleSeries ms;
  const double N = static_cast<double>(mp.N);
  const double sig = std::sqrt(2.0 / mp.kappa);
  double M = 0;
  ms.t.push_back(path.step_times[0]);
  ms.M.push_back(0);
  for (size_t k = 0; k < path.dB.size(); ++k) {
    const auto& x = path.step_states[k];
    double inc = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double y = a * (x[i] - b);
      const double yp = std::pow(y, l - 1);
      if (!std::isfinite(yp) || std::abs(yp) > 1e150)
        throw std::range_error("Y^(l-1) overflows in the martingale diagnostic");
      inc += yp * a * sig * std::sqrt(std::max(0.0, 1 - x[i] * x[i])) * path.dB[k][i];
    }
    M += l / N * inc;
    ms.t.push_back(path.step_times[k + 1]);
    ms.M.push_back(M);
    ms.sup_abs = std::max(ms.sup_abs, std::abs(M));
  }
  return ms;
}

}  // namespace bcj
