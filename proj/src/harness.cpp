#include "bcj/harness.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "bcj/jacobi_poly.hpp"

namespace bcj {

std::pair<double, double> ParamRule::pq(int N) const {
  const double pv = p(N), qv = q(N);
  return swap_pq ? std::make_pair(qv, pv) : std::make_pair(pv, qv);
}

const ReportRow* ConvergenceReport::find(int N, double t, int l) const {
  for (const auto& r : rows)
    if (r.N == N && r.l == l && (r.t == t || (std::isinf(r.t) && std::isinf(t)))) return &r;
  return nullptr;
}

void gauss_rule_from_moments(const MomentVector& m, int max_nodes, std::vector<double>& nodes,
                             std::vector<double>& weights) {
  const int L = m.L();
  const int nmax = std::max(1, std::min(max_nodes, (L + 1) / 2));
  // Upper Cholesky factor of the Hankel matrix H_ij = m_{i+j}, rows 0..n-1.
  const int dim = nmax + 1;
  std::vector<std::vector<long double>> R(dim, std::vector<long double>(dim, 0.0L));
  int n = 0;
  for (int k = 0; k < nmax; ++k) {
    long double piv = m.m[2 * k];
    for (int i = 0; i < k; ++i) piv -= R[i][k] * R[i][k];
    if (!(piv > 1e-11L * std::max<long double>(1e-300L, std::abs(m.m[2 * k])))) break;
    R[k][k] = std::sqrt(piv);
    for (int j = k + 1; j < dim && k + j <= L; ++j) {
      long double v = m.m[k + j];
      for (int i = 0; i < k; ++i) v -= R[i][k] * R[i][j];
      R[k][j] = v / R[k][k];
    }
    n = k + 1;
  }
  if (n == 0) throw std::invalid_argument("moment vector does not define a probability law (m_0 <= 0)");
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) {
    long double a = R[k][k + 1] / R[k][k];
    if (k > 0) a -= R[k - 1][k] / R[k - 1][k - 1];
    diag[k] = static_cast<double>(a);
    if (k > 0) sub[k - 1] = static_cast<double>(R[k][k] / R[k - 1][k - 1]);
  }
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  if (n == 1) {
    nodes[0] = diag[0];
    weights[0] = m.m[0];
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return es.eigenvalues()[a] < es.eigenvalues()[b]; });
  for (int k = 0; k < n; ++k) {
    nodes[k] = es.eigenvalues()[idx[k]];
    const double v = es.eigenvectors()(0, idx[k]);
    weights[k] = m.m[0] * v * v;
  }
}

StartResult make_start(int N, const Scaling& sc, DomainKind d, const MomentVector& mu0, int max_nodes,
                       StartMode mode, uint64_t seed, double clip_tol) {
  if (N < 1) throw std::invalid_argument("N must be positive");
  StartResult res;
  gauss_rule_from_moments(mu0, max_nodes, res.nodes, res.weights);
  const int n = static_cast<int>(res.nodes.size());
  res.counts.assign(n, 0);
  std::vector<double> y;
  if (mode == StartMode::Quantile) {
    std::vector<std::pair<double, int>> rem;
    int used = 0;
    for (int k = 0; k < n; ++k) {
      const double want = N * res.weights[k];
      res.counts[k] = static_cast<int>(std::floor(want));
      used += res.counts[k];
      rem.push_back({want - res.counts[k], k});
    }
    std::stable_sort(rem.begin(), rem.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (int r = 0; used < N; ++r, ++used) res.counts[rem[r % n].second] += 1;
    for (int k = 0; k < n; ++k)
      for (int c = 0; c < res.counts[k]; ++c) y.push_back(res.nodes[k]);
  } else {
    std::mt19937_64 eng(seed);
    std::discrete_distribution<int> pick(res.weights.begin(), res.weights.end());
    for (int i = 0; i < N; ++i) {
      const int k = pick(eng);
      res.counts[k] += 1;
      y.push_back(res.nodes[k]);
    }
    std::sort(y.begin(), y.end());
  }
  res.state.domain = d;
  res.state.x.resize(N);
  const double lo = d == DomainKind::CompactAlcove ? -1.0 : 1.0;
  for (int i = 0; i < N; ++i) {
    double x = sc.b + y[i] / sc.a;
    if (x < lo) {
      if (lo - x > clip_tol) {
        std::ostringstream os;
        os << "start window leaves the domain: particle " << i << " at " << x << " (node " << y[i] << ")";
        throw InfeasibleStartError(os.str());
      }
      x = lo;
      ++res.clipped;
    }
    if (d == DomainKind::CompactAlcove && x > 1.0) {
      if (x - 1.0 > clip_tol) {
        std::ostringstream os;
        os << "start window leaves the domain: particle " << i << " at " << x << " (node " << y[i] << ")";
        throw InfeasibleStartError(os.str());
      }
      x = 1.0;
      ++res.clipped;
    }
    res.state.x[i] = x;
  }
  std::sort(res.state.x.begin(), res.state.x.end());
  return res;
}

double gap_scale(const MomentVector& pred, int l) {
  const double m2 = pred.L() >= 2 ? std::max(pred.m[2], 0.0) : 0.0;
  const double s = std::max(std::abs(pred.m[l]), std::pow(m2, 0.5 * l));
  return s > 1e-300 ? s : 1.0;
}

namespace {

bool increasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

bool decreasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

int mu0_order(const Experiment& e) {
  const int want = std::max(e.L, 2 * e.quad_nodes);
  return std::min(want, e.mu0.max_order());
}

}  // namespace

std::vector<std::string> check_hypotheses(const Experiment& e) {
  std::vector<std::string> bad;
  const Regime r = e.regime.kind;
  if (e.N_list.empty()) bad.push_back("N_list is empty");
  if (e.t_list.empty()) bad.push_back("t_list is empty");
  for (double t : e.t_list)
    if (!(t >= 0)) bad.push_back("times must be nonnegative");
  if (e.L < 1) bad.push_back("moment order L must be >= 1");
  std::vector<double> pN, qN, loc, pqs;
  for (int N : e.N_list) {
    auto [p, q] = e.rule.pq(N);
    if (!(p > N - 1) || !(q > N - 1)) {
      std::ostringstream os;
      os << "N=" << N << ": need p,q > N-1 (p=" << p << ", q=" << q << ")";
      bad.push_back(os.str());
    }
    pN.push_back(p / N);
    qN.push_back(q / N);
    const double s = e.rule.s(N);
    loc.push_back((p + q) / std::sqrt(N * s));
    pqs.push_back((p + q) / s);
  }
  if (e.N_list.size() >= 2) {
    auto need = [&](bool ok, const std::string& what) {
      if (!ok) bad.push_back(regime_name(r) + ": " + what + " is not satisfied along N_list");
    };
    switch (r) {
      case Regime::WignerStationary:
        need(increasing(pN), "p_N/N -> inf");
        need(increasing(qN), "q_N/N -> inf");
        break;
      case Regime::WignerDegenerate: {
        need(increasing(pN), "p_N/N -> inf");
        need(increasing(qN), "q_N/N -> inf");
        std::vector<double> c;
        for (size_t i = 0; i < pN.size(); ++i) c.push_back(pN[i] / qN[i]);
        need(decreasing(c), "p_N/q_N -> 0");
        break;
      }
      case Regime::WignerLocal:
      case Regime::NCWignerLocal:
        need(decreasing(loc), "(p_N+q_N)/sqrt(N s_N) -> 0");
        break;
      case Regime::WignerLocalDrift: {
        std::vector<double> pq;
        for (size_t i = 0; i < pN.size(); ++i) pq.push_back(pN[i] + qN[i]);
        need(increasing(pq), "(p_N+q_N)/N -> inf");
        break;
      }
      case Regime::MPStationary:
        need(increasing(qN), "q_N/N -> inf");
        break;
      case Regime::NCMPTimeInverted:
        need(increasing(pN), "p_N/N -> inf");
        break;
      case Regime::MPLocal:
      case Regime::NCMPLocal:
        need(decreasing(pqs), "(p_N+q_N)/s_N -> 0");
        break;
    }
  }
  for (double v : (r == Regime::MPStationary || r == Regime::MPLocal) ? pN : std::vector<double>{})
    if (v < 1 - 1e-12) bad.push_back(regime_name(r) + ": p_N/N must stay >= 1 (phat in [1,inf))");
  for (double v : (r == Regime::NCMPTimeInverted || r == Regime::NCMPLocal) ? qN : std::vector<double>{})
    if (v < 1 - 1e-12) bad.push_back(regime_name(r) + ": q_N/N must stay >= 1 (qhat in [1,inf))");
  try {
    const MomentVector mu = e.mu0.evaluate(std::min(e.L, e.mu0.max_order()));
    if (e.mu0.max_order() < e.L) bad.push_back("initial law provides fewer than L moments");
    if (!growth_bound_check(mu, e.gamma)) bad.push_back("initial law violates the growth bound |c_l| <= (gamma l)^l");
    if (regime_is_mp(r) && !e.mu0.nonneg()) bad.push_back(regime_name(r) + " needs an initial law on [0, inf)");
  } catch (const std::exception& ex) {
    bad.push_back(std::string("initial law: ") + ex.what());
  }
  if (e.constants == ConstantsMode::Declared) {
    for (int N : e.N_list) {
      auto [p, q] = e.rule.pq(N);
      if (!(p > N - 1 && q > N - 1)) continue;
      try {
        const Scaling sc = regime_scaling(r, p, q, N, e.rule.s(N), e.rule.center);
        const std::string msg = check_constants(r, e.regime.k, plugin_constants(r, p, q, N, sc), e.constants_tol);
        if (!msg.empty()) bad.push_back("N=" + std::to_string(N) + ": " + msg);
      } catch (const std::exception& ex) {
        bad.push_back("N=" + std::to_string(N) + ": " + ex.what());
      }
    }
  }
  if (e.dynamics == DynamicsKind::Stochastic) {
    if (!(e.stochastic.kappa > 0)) bad.push_back("kappa must be positive");
    if (e.stochastic.replicas < 1) bad.push_back("replicas must be >= 1");
    if (!(e.stochastic.dt_rescaled > 0)) bad.push_back("dt must be positive");
  }
  return bad;
}

namespace {

struct NResult {
  NInfo info;
  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;
};

NResult run_one(const Experiment& e, int N, const MomentVector& mu) {
  NResult out;
  const Regime r = e.regime.kind;
  const DomainKind d = regime_domain(r);
  auto [p, q] = e.rule.pq(N);
  const Scaling sc = regime_scaling(r, p, q, N, e.rule.s(N), e.rule.center);
  ScalingRegime reg = e.regime;
  if (e.constants == ConstantsMode::PlugIn) reg.k = plugin_constants(r, p, q, N, sc);
  out.info = {N, p, q, sc, reg.k, 0, 0};

  const StartResult st = make_start(N, sc, d, mu, e.quad_nodes, e.start, e.start_seed);
  out.info.clipped = st.clipped;
  if (st.clipped > 0)
    out.warnings.push_back("N=" + std::to_string(N) + ": " + std::to_string(st.clipped) +
                           " start coordinates clipped into the domain");

  std::vector<double> raw;
  for (double t : e.t_list) raw.push_back(t / sc.s);
  const double t_end = *std::max_element(raw.begin(), raw.end());

  // Per (time index) list of states: frozen has one, stochastic one per replica.
  std::vector<std::vector<std::vector<double>>> states(raw.size());
  if (e.dynamics == DynamicsKind::Frozen) {
    BoundaryOptions bo = e.boundary;
    bo.integ.output_times = raw;
    const BoundaryResult br = solve_from_boundary(st.state, p, q, t_end, bo);
    out.info.t_bootstrap = br.t_b;
    // Output order matches the sorted request; map back by value.
    std::vector<double> sorted = raw;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < raw.size(); ++i) {
      const size_t k = std::lower_bound(sorted.begin(), sorted.end(), raw[i]) - sorted.begin();
      states[i].push_back(br.traj.x[k]);
    }
  } else {
    SdeConfig cfg;
    cfg.params = {e.stochastic.kappa, p, q, N};
    cfg.scheme = e.stochastic.scheme;
    cfg.dt = e.stochastic.dt_rescaled / sc.s;
    cfg.seed = e.stochastic.seed ^ (0x9E3779B97F4A7C15ull * static_cast<uint64_t>(N));
    cfg.replicas = e.stochastic.replicas;
    const auto paths = simulate_replicas(st.state, cfg, t_end, raw, 1);
    std::vector<double> sorted = raw;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < raw.size(); ++i) {
      const size_t k = std::lower_bound(sorted.begin(), sorted.end(), raw[i]) - sorted.begin();
      for (const auto& path : paths) states[i].push_back(path.states[k]);
    }
  }

  for (size_t i = 0; i < raw.size(); ++i) {
    const double t = e.t_list[i];
    const MomentVector pred = predict_limit(reg, t, mu, e.L);
    const int R = static_cast<int>(states[i].size());
    std::vector<MomentVector> em;
    for (const auto& x : states[i]) em.push_back(empirical_moments(x, sc.a, sc.b, e.L));
    for (int l = 1; l <= e.L; ++l) {
      ReportRow row;
      row.N = N;
      row.t = t;
      row.l = l;
      row.replicas = R;
      double mean = 0;
      for (const auto& m : em) mean += m.m[l];
      mean /= R;
      row.empirical = mean;
      row.predicted = pred.m[l];
      row.gap = std::abs(mean - pred.m[l]);
      const double scale = gap_scale(pred, l);
      row.relgap = row.gap / scale;
      if (e.dynamics == DynamicsKind::Stochastic) {
        double var = 0, pg = 0;
        for (const auto& m : em) {
          var += (m.m[l] - mean) * (m.m[l] - mean);
          pg += std::abs(m.m[l] - pred.m[l]) / scale;
        }
        row.stderr_ = R > 1 ? std::sqrt(var / (R - 1) / R) : std::nan("");
        row.path_relgap = pg / R;
      }
      out.rows.push_back(row);
    }
  }
  return out;
}

}  // namespace

void fit_decay(ConvergenceReport& rep) {
  rep.fits.clear();
  std::vector<std::pair<double, int>> keys;
  for (const auto& r : rep.rows)
    if (std::find(keys.begin(), keys.end(), std::make_pair(r.t, r.l)) == keys.end()) keys.push_back({r.t, r.l});
  for (auto [t, l] : keys) {
    std::vector<double> lx, ly, g;
    for (const auto& r : rep.rows) {
      if (r.l != l || !(r.t == t || (std::isinf(r.t) && std::isinf(t)))) continue;
      g.push_back(r.relgap);
      if (r.relgap > 0) {
        lx.push_back(std::log(static_cast<double>(r.N)));
        ly.push_back(std::log(r.relgap));
      }
    }
    DecayFit f;
    f.t = t;
    f.l = l;
    f.monotone = decreasing(g);
    if (lx.size() >= 2) {
      const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
      const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
      double sxy = 0, sxx = 0;
      for (size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
      }
      f.order = sxx > 0 ? -sxy / sxx : 0;
    }
    rep.fits.push_back(f);
  }
}

ConvergenceReport run_experiment(const Experiment& e) {
  const auto bad = check_hypotheses(e);
  if (!bad.empty()) {
    std::string msg = "regime hypotheses violated:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw HypothesisError(msg);
  }
  const MomentVector mu = e.mu0.evaluate(mu0_order(e));
  MomentVector mu_tagged = mu;
  mu_tagged.nonneg = e.mu0.nonneg();

  std::vector<NResult> res(e.N_list.size());
  std::vector<std::exception_ptr> errs(e.N_list.size());
  auto work = [&](size_t i) {
    try {
      res[i] = run_one(e, e.N_list[i], mu_tagged);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  };
  const int jobs = std::max(1, std::min<int>(e.jobs, static_cast<int>(e.N_list.size())));
  if (jobs == 1) {
    for (size_t i = 0; i < e.N_list.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&, w] {
        for (size_t i = w; i < e.N_list.size(); i += jobs) work(i);
      });
    for (auto& th : pool) th.join();
  }
  for (size_t i = 0; i < errs.size(); ++i) {
    if (!errs[i]) continue;
    try {
      std::rethrow_exception(errs[i]);
    } catch (const std::exception& ex) {
      throw std::runtime_error("N=" + std::to_string(e.N_list[i]) + ": " + ex.what());
    }
  }
  ConvergenceReport rep;
  rep.label = regime_name(e.regime.kind);
  for (auto& r : res) {
    rep.per_N.push_back(r.info);
    rep.rows.insert(rep.rows.end(), r.rows.begin(), r.rows.end());
    rep.warnings.insert(rep.warnings.end(), r.warnings.begin(), r.warnings.end());
  }
  fit_decay(rep);
  return rep;
}

ConvergenceReport zeros_limit_experiment(ZerosKind kind, const std::vector<int>& N_list, const ParamRule& rule,
                                         int L, ConstantsMode mode, const RegimeConstants& declared) {
  ConvergenceReport rep;
  rep.label = kind == ZerosKind::WignerZeros ? "WignerZeros" : "MPZeros";
  const Regime r = kind == ZerosKind::WignerZeros ? Regime::WignerStationary : Regime::MPStationary;
  const double inf = std::numeric_limits<double>::infinity();
  for (int N : N_list) {
    auto [p, q] = rule.pq(N);
    if (!(p > N - 1 && q > N - 1)) throw HypothesisError("N=" + std::to_string(N) + ": need p,q > N-1");
    const Scaling sc = regime_scaling(r, p, q, N);
    RegimeConstants k = mode == ConstantsMode::PlugIn ? plugin_constants(r, p, q, N, sc) : declared;
    const auto z = jacobi_zeros({N, q - N, p - N});
    const MomentVector emp = empirical_moments(z, sc.a, sc.b, L);
    const MomentVector pred = kind == ZerosKind::WignerZeros ? semicircle_moments(4 * std::pow(1 + k.C, -1.5), L)
                                                             : mp_moments(k.phat, 2.0, L);
    rep.per_N.push_back({N, p, q, sc, k, 0, 0});
    for (int l = 1; l <= L; ++l) {
      ReportRow row;
      row.N = N;
      row.t = inf;
      row.l = l;
      row.empirical = emp.m[l];
      row.predicted = pred.m[l];
      row.gap = std::abs(emp.m[l] - pred.m[l]);
      row.relgap = row.gap / gap_scale(pred, l);
      row.replicas = 1;
      rep.rows.push_back(row);
    }
  }
  fit_decay(rep);
  return rep;
}

}  // namespace bcj
