// bcj: command-line front end for the frozen and stochastic Jacobi particle systems.
#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "bcj/config.hpp"
#include "bcj/detflow.hpp"
#include "bcj/freeprob.hpp"
#include "bcj/harness.hpp"
#include "bcj/io.hpp"
#include "bcj/jacobi_poly.hpp"
#include "bcj/moments.hpp"
#include "bcj/sde.hpp"

#ifndef BCJ_VERSION
#define BCJ_VERSION "unknown"
#endif

using namespace bcj;

namespace {

struct Common {
  std::string config, out;
  std::optional<uint64_t> seed;
  int jobs = 0;
  bool dry_run = false, force = false;
  int verbose = 0;
};

int exit_domain = 1, exit_config = 2;

void log(const Common& c, const std::string& msg) {
  if (c.verbose > 0) std::cerr << msg << "\n";
}

int jobs_of(const Common& c) {
  if (c.jobs > 0) return c.jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

json meta(const std::string& sub, const Common& c, const json& cfg) {
  json m;
  m["tool"] = "bcj";
  m["version"] = BCJ_VERSION;
  m["subcommand"] = sub;
  m["config"] = cfg;
  if (c.seed) m["seed_override"] = *c.seed;
  return m;
}

json need_config(const Common& c) {
  if (c.config.empty()) throw ConfigError("--config is required");
  return load_json_file(c.config);
}

// Writes the named files to --out (if given) and echoes the JSON summary on stdout.
void emit(const Common& c, const std::vector<std::pair<std::string, std::string>>& files, const json& summary) {
  if (!c.out.empty()) {
    OutputDir od(c.out, c.force);
    for (const auto& [name, body] : files) od.write(name, body);
    od.commit();
    log(c, "wrote " + c.out);
  }
  std::cout << summary.dump(2) << "\n";
}

int run_zeros(const Common& c, std::optional<int> n, double alpha, double beta) {
  if (c.config.empty()) {
    if (!n) throw ConfigError("zeros needs --n (with --alpha, --beta) or --config");
    const auto z = jacobi_zeros({*n, alpha, beta});
    json j{{"n", *n}, {"alpha", alpha}, {"beta", beta}, {"zeros", z}};
    std::vector<std::pair<std::string, std::string>> files;
    files.push_back({"report.json", j.dump(2) + "\n"});
    emit(c, files, j);
    return 0;
  }
  const json cfg = need_config(c);
  const ZerosConfig zc = parse_zeros(cfg);
  if (c.dry_run) {
    std::cout << json{{"valid", true}}.dump() << "\n";
    return 0;
  }
  const auto rep = zeros_limit_experiment(zc.kind, zc.N_list, zc.rule, zc.L);
  std::ostringstream csv;
  write_report_csv(csv, rep);
  const json rj = report_to_json(rep);
  emit(c, {{"report.csv", csv.str()}, {"report.json", rj.dump(2) + "\n"},
           {"meta.json", meta("zeros", c, cfg).dump(2) + "\n"}},
       rj);
  return 0;
}

int run_ode(const Common& c) {
  const json cfg = need_config(c);
  OdeRunConfig oc = parse_ode_run(cfg);
  ParticleState x0{oc.domain, oc.x0};
  validate({std::numeric_limits<double>::infinity(), oc.p, oc.q, x0.size()});
  if (!in_domain(x0)) throw std::domain_error("x0 is outside the closed domain");
  if (c.dry_run) {
    std::cout << json{{"valid", true}, {"interior", is_interior(x0)}}.dump() << "\n";
    return 0;
  }
  const BoundaryResult br = solve_from_boundary(x0, oc.p, oc.q, oc.t_end, oc.boundary);
  json rj;
  rj["t_bootstrap"] = br.t_b;
  rj["bootstrap"] = br.used == BootstrapMethod::EspInversion ? "esp" : "self_similar";
  rj["accepted_steps"] = br.stats.accepted;
  rj["rejected_steps"] = br.stats.rejected;
  rj["final"] = {{"t", br.traj.t.back()}, {"x", br.traj.x.back()}};
  if (br.traj.x.back().size() > 0) rj["final"]["log_abs_discriminant"] = log_abs_discriminant(br.traj.back());
  if (oc.lyapunov && oc.domain == DomainKind::CompactAlcove) {
    const auto ly = lyapunov_check(br.traj, oc.p, oc.q);
    rj["lyapunov"] = {{"nondecreasing", ly.nondecreasing}, {"min_increment", ly.min_increment}};
  }
  std::ostringstream csv;
  write_trajectory_csv(csv, br.traj);
  emit(c, {{"trajectory.csv", csv.str()}, {"report.json", rj.dump(2) + "\n"},
           {"meta.json", meta("ode-run", c, cfg).dump(2) + "\n"}},
       rj);
  return 0;
}

int run_sde(const Common& c) {
  const json cfg = need_config(c);
  SdeRunConfig sc = parse_sde_run(cfg);
  if (c.seed) sc.cfg.seed = *c.seed;
  ParticleState x0{sc.domain, sc.x0};
  validate(sc.cfg.params);
  if (!in_domain(x0)) throw std::domain_error("x0 is outside the closed domain");
  if (c.dry_run) {
    std::cout << json{{"valid", true}}.dump() << "\n";
    return 0;
  }
  const double clock = sc.unrescaled_clock ? sc.cfg.params.kappa : 1.0;
  std::vector<double> rec;
  for (double t : sc.record_times) rec.push_back(clock * t);
  auto paths = simulate_replicas(x0, sc.cfg, clock * sc.t_end, rec, jobs_of(c));
  for (auto& p : paths)
    for (auto& t : p.times) t /= clock;

  json rj;
  rj["replicas"] = sc.cfg.replicas;
  rj["stability_warning"] = paths[0].stability_warning;
  rj["summary"] = json::array();
  for (size_t k = 0; k < paths[0].times.size(); ++k) {
    std::vector<double> mean(sc.L + 1, 0.0);
    for (const auto& p : paths) {
      const auto m = empirical_moments(p.states[k], sc.a, sc.b, sc.L);
      for (int l = 0; l <= sc.L; ++l) mean[l] += m.m[l] / paths.size();
    }
    rj["summary"].push_back({{"t", paths[0].times[k]}, {"mean_moments", mean}});
  }
  rj["boundary_start"] = paths[0].bootstrap_time > 0;
  rj["below_noncollision_threshold"] = below_noncollision_threshold(sc.cfg.params);
  if (paths[0].stability_warning) std::cerr << "warning: dt is large relative to 1/(p+q)\n";
  if (paths[0].bootstrap_time > 0)
    std::cerr << "warning: start on the boundary; boundary starts of the SDE are experimental\n";
  if (below_noncollision_threshold(sc.cfg.params))
    std::cerr << "warning: p or q below N-1+2/kappa (or kappa < 1); paths may touch the boundary\n";
  std::ostringstream csv;
  write_paths_csv(csv, paths);
  emit(c, {{"trajectory.csv", csv.str()}, {"report.json", rj.dump(2) + "\n"},
           {"meta.json", meta("sde-run", c, cfg).dump(2) + "\n"}},
       rj);
  return 0;
}

int run_limit(const Common& c) {
  const json cfg = need_config(c);
  Experiment e = parse_experiment(cfg);
  if (c.seed) e.stochastic.seed = *c.seed;
  e.jobs = jobs_of(c);
  const auto bad = check_hypotheses(e);
  if (!bad.empty()) {
    for (const auto& b : bad) std::cerr << "hypothesis: " << b << "\n";
    throw HypothesisError("regime hypotheses violated");
  }
  if (c.dry_run) {
    std::cout << json{{"valid", true}}.dump() << "\n";
    return 0;
  }
  const auto rep = run_experiment(e);
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  std::ostringstream csv;
  write_report_csv(csv, rep);
  const json rj = report_to_json(rep);
  emit(c, {{"report.csv", csv.str()}, {"report.json", rj.dump(2) + "\n"},
           {"meta.json", meta("limit-check", c, cfg).dump(2) + "\n"}},
       rj);
  return 0;
}

int run_oracle(const Common& c) {
  const json cfg = need_config(c);
  const OracleConfig oc = parse_oracle(cfg);
  ParticleState x0{oc.domain, oc.x0};
  validate({std::numeric_limits<double>::infinity(), oc.p, oc.q, oc.N});
  if (!in_domain(x0)) throw std::domain_error("x0 is outside the closed domain");
  if (c.dry_run) {
    std::cout << json{{"valid", true}}.dump() << "\n";
    return 0;
  }
  const MomentVector S0 = empirical_moments(oc.x0, oc.a, oc.b, oc.L);
  OracleOptions opts;
  opts.domain = oc.domain;
  const auto orc = moment_ode_oracle(S0, oc.p, oc.q, oc.a, oc.b, oc.N, oc.t_grid, opts);
  std::vector<std::vector<double>> part;
  if (oc.compare_particles) {
    BoundaryOptions bo;
    bo.integ.output_times = oc.t_grid;
    const auto br = solve_from_boundary(x0, oc.p, oc.q, *std::max_element(oc.t_grid.begin(), oc.t_grid.end()), bo);
    part = br.traj.x;
  }
  std::ostringstream csv;
  csv << "t,l,oracle" << (oc.compare_particles ? ",particles,gap" : "") << "\n";
  json rj;
  rj["rows"] = json::array();
  double sup = 0;
  for (size_t k = 0; k < oc.t_grid.size(); ++k) {
    MomentVector pm;
    if (oc.compare_particles) pm = empirical_moments(part[k], oc.a, oc.b, oc.L);
    for (int l = 0; l <= oc.L; ++l) {
      csv << fmt17(oc.t_grid[k]) << "," << l << "," << fmt17(orc[k].m[l]);
      json row{{"t", oc.t_grid[k]}, {"l", l}, {"oracle", orc[k].m[l]}};
      if (oc.compare_particles) {
        const double g = std::abs(pm.m[l] - orc[k].m[l]);
        sup = std::max(sup, g);
        csv << "," << fmt17(pm.m[l]) << "," << fmt17(g);
        row["particles"] = pm.m[l];
        row["gap"] = g;
      }
      csv << "\n";
      rj["rows"].push_back(row);
    }
  }
  if (oc.compare_particles) rj["sup_gap"] = sup;
  emit(c, {{"report.csv", csv.str()}, {"report.json", rj.dump(2) + "\n"},
           {"meta.json", meta("moment-oracle", c, cfg).dump(2) + "\n"}},
       rj);
  return 0;
}

int run_freeprob(const Common& c) {
  const json cfg = need_config(c);
  const FreeprobConfig fc = parse_freeprob(cfg);
  if (c.dry_run) {
    std::cout << json{{"valid", true}}.dump() << "\n";
    return 0;
  }
  std::ostringstream csv;
  json rj;
  if (!fc.has_regime) {
    const MomentVector m = fc.expr.evaluate(fc.L);
    const auto k = moments_to_cumulants(m);
    csv << "l,moment,cumulant\n";
    for (int l = 0; l <= m.L(); ++l) csv << l << "," << fmt17(m.m[l]) << "," << fmt17(l == 0 ? 0.0 : k[l]) << "\n";
    rj["moments"] = moments_to_json(m);
    rj["cumulants"] = k;
  } else {
    const MomentVector mu = fc.expr.evaluate(std::min(fc.L, fc.expr.max_order()));
    csv << "t,l,predicted\n";
    rj["rows"] = json::array();
    for (double t : fc.t_list) {
      const MomentVector m = predict_limit(fc.regime, t, mu, fc.L);
      for (int l = 0; l <= m.L(); ++l) csv << fmt17(t) << "," << l << "," << fmt17(m.m[l]) << "\n";
      rj["rows"].push_back({{"t", t}, {"moments", moments_to_json(m)}});
    }
  }
  emit(c, {{"report.csv", csv.str()}, {"report.json", rj.dump(2) + "\n"},
           {"meta.json", meta("freeprob-eval", c, cfg).dump(2) + "\n"}},
       rj);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frozen and stochastic Jacobi particle systems: dynamics, moments, free-probability limits"};
  app.require_subcommand(1);
  Common c;
  std::optional<int> zn;
  double za = 0, zb = 0;

  auto add_common = [&](CLI::App* s) {
    s->add_option("--config", c.config, "experiment config (JSON)");
    s->add_option("--out", c.out, "output directory (created atomically)");
    s->add_option("--seed", c.seed, "seed override for stochastic runs");
    s->add_option("--jobs", c.jobs, "worker threads (default: available parallelism)")->check(CLI::PositiveNumber);
    s->add_flag("--dry-run", c.dry_run, "validate config and hypotheses only");
    s->add_flag("--force", c.force, "replace an existing output directory");
    s->add_flag("-v,--verbose", c.verbose, "log progress to stderr");
  };
  auto* zeros = app.add_subcommand("zeros", "zeros of P_n^(alpha,beta) or a zero-limit experiment");
  add_common(zeros);
  zeros->add_option("--n", zn, "degree");
  zeros->add_option("--alpha", za, "alpha > -1");
  zeros->add_option("--beta", zb, "beta > -1");
  auto* ode = app.add_subcommand("ode-run", "frozen dynamics from an arbitrary start");
  auto* sde = app.add_subcommand("sde-run", "Euler-Maruyama replicas");
  auto* lim = app.add_subcommand("limit-check", "convergence experiment against the predicted limit");
  auto* orc = app.add_subcommand("moment-oracle", "finite-N moment system vs particle dynamics");
  auto* fp = app.add_subcommand("freeprob-eval", "evaluate a measure expression or a regime prediction");
  for (auto* s : {ode, sde, lim, orc, fp}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_config;
  }

  try {
    if (zeros->parsed()) return run_zeros(c, zn, za, zb);
    if (ode->parsed()) return run_ode(c);
    if (sde->parsed()) return run_sde(c);
    if (lim->parsed()) return run_limit(c);
    if (orc->parsed()) return run_oracle(c);
    if (fp->parsed()) return run_freeprob(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_domain;
  }
  return exit_config;
}
