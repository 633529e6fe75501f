#include "bcj/config.hpp"

#include <cmath>
#include <algorithm>
#include <fstream>
#include <limits>
#include <set>

namespace bcj {

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key \"" + k + "\"");
}

void check_schema(const json& j) {
  if (!j.contains("schema")) throw ConfigError("missing \"schema\" (expected " + std::to_string(kSchemaVersion) + ")");
  if (!j["schema"].is_number_integer() || j["schema"].get<int>() != kSchemaVersion)
    throw ConfigError("unsupported schema version " + j["schema"].dump());
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& ex) {
    throw ConfigError(where + ": bad value for \"" + key + "\": " + ex.what());
  }
}

template <class T>
T get_or(const json& j, const std::string& key, T dflt, const std::string& where) {
  return j.contains(key) ? get<T>(j, key, where) : dflt;
}

double number(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
  }
  throw ConfigError(where + ": expected a number");
}

PowerRule parse_rule(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0, 0};
  check_keys(j, {"coef", "exponent", "shift"}, where);
  PowerRule r;
  r.coef = get_or<double>(j, "coef", 1.0, where);
  r.exponent = get_or<double>(j, "exponent", 1.0, where);
  r.shift = get_or<double>(j, "shift", 0.0, where);
  return r;
}

DomainKind parse_domain(const json& j, const std::string& key) {
  const auto s = get_or<std::string>(j, key, "compact", key);
  if (s == "compact") return DomainKind::CompactAlcove;
  if (s == "noncompact") return DomainKind::NoncompactChamber;
  throw ConfigError(key + ": expected \"compact\" or \"noncompact\", got \"" + s + "\"");
}

SdeScheme parse_scheme(const std::string& s) {
  if (s == "projected") return SdeScheme::EulerProjected;
  if (s == "reflected") return SdeScheme::EulerReflected;
  throw ConfigError("scheme: expected \"projected\" or \"reflected\", got \"" + s + "\"");
}

Regime parse_regime_cfg(const std::string& s) {
  try {
    return parse_regime(s);
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("regime: ") + ex.what());
  }
}

RegimeConstants parse_constants(const json& j) {
  check_keys(j, {"C", "B", "c", "phat", "qhat"}, "constants");
  RegimeConstants k;
  if (j.contains("C")) k.C = number(j["C"], "constants.C");
  if (j.contains("B")) k.B = number(j["B"], "constants.B");
  if (j.contains("c")) k.c = number(j["c"], "constants.c");
  if (j.contains("phat")) k.phat = number(j["phat"], "constants.phat");
  if (j.contains("qhat")) k.qhat = number(j["qhat"], "constants.qhat");
  return k;
}

BoundaryOptions parse_bootstrap(const json& j) {
  check_keys(j, {"method", "t_b", "max_adapt", "esp_grid", "tie_tol", "auto_esp_max_n", "rtol", "atol", "eta"},
             "bootstrap");
  BoundaryOptions bo;
  const auto m = get_or<std::string>(j, "method", "auto", "bootstrap");
  if (m == "auto")
    bo.method = BootstrapMethod::Auto;
  else if (m == "esp")
    bo.method = BootstrapMethod::EspInversion;
  else if (m == "self_similar")
    bo.method = BootstrapMethod::SelfSimilar;
  else
    throw ConfigError("bootstrap.method: expected auto, esp or self_similar");
  bo.t_b = get_or<double>(j, "t_b", bo.t_b, "bootstrap");
  bo.max_adapt = get_or<int>(j, "max_adapt", bo.max_adapt, "bootstrap");
  bo.esp_grid = get_or<int>(j, "esp_grid", bo.esp_grid, "bootstrap");
  bo.tie_tol = get_or<double>(j, "tie_tol", bo.tie_tol, "bootstrap");
  bo.auto_esp_max_n = get_or<int>(j, "auto_esp_max_n", bo.auto_esp_max_n, "bootstrap");
  bo.integ.rtol = get_or<double>(j, "rtol", bo.integ.rtol, "bootstrap");
  bo.integ.atol = get_or<double>(j, "atol", bo.integ.atol, "bootstrap");
  bo.integ.eta = get_or<double>(j, "eta", bo.integ.eta, "bootstrap");
  return bo;
}

std::vector<double> positions(const json& j, const std::string& key, const std::string& where) {
  auto x = get<std::vector<double>>(j, key, where);
  if (x.empty()) throw ConfigError(where + ": \"" + key + "\" is empty");
  return x;
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& ex) {
    throw ConfigError("cannot parse " + path + ": " + ex.what());
  }
}

MeasureExpr atoms_measure(const std::vector<double>& x, const std::vector<double>& w, int L) {
  if (x.empty() || x.size() != w.size()) throw ConfigError("atoms: x and w must be nonempty and of equal length");
  double tot = 0;
  for (double v : w) {
    if (!(v >= 0)) throw ConfigError("atoms: weights must be nonnegative");
    tot += v;
  }
  if (!(tot > 0)) throw ConfigError("atoms: weights sum to zero");
  MomentVector m;
  m.m.assign(L + 1, 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    double pw = w[i] / tot;
    for (int l = 0; l <= L; ++l, pw *= x[i]) m.m[l] += pw;
  }
  m.nonneg = *std::min_element(x.begin(), x.end()) >= 0;
  m.provenance = "atoms";
  return MeasureExpr::empirical(m);
}

MeasureExpr parse_measure(const json& j) {
  if (!j.is_object() || j.size() != 1) throw ConfigError("measure: expected an object with exactly one key");
  const auto& [key, v] = *j.items().begin();
  if (key == "dirac") return MeasureExpr::dirac(number(v, "dirac"));
  if (key == "semicircle") return MeasureExpr::semicircle(number(v, "semicircle"));
  if (key == "mp") {
    check_keys(v, {"c", "t"}, "mp");
    return MeasureExpr::marchenko_pastur(get<double>(v, "c", "mp"), get<double>(v, "t", "mp"));
  }
  if (key == "atoms") {
    check_keys(v, {"x", "w"}, "atoms");
    const auto x = get<std::vector<double>>(v, "x", "atoms");
    const auto w = v.contains("w") ? get<std::vector<double>>(v, "w", "atoms") : std::vector<double>(x.size(), 1.0);
    return atoms_measure(x, w);
  }
  if (key == "moments") {
    MomentVector m;
    m.m = v.get<std::vector<double>>();
    if (m.m.empty() || std::abs(m.m[0] - 1) > 1e-12) throw ConfigError("moments: m_0 must equal 1");
    m.provenance = "config";
    return MeasureExpr::empirical(m);
  }
  if (key == "scale") {
    check_keys(v, {"by", "of"}, "scale");
    return MeasureExpr::scale(get<double>(v, "by", "scale"), parse_measure(v.at("of")));
  }
  if (key == "free_add") {
    if (!v.is_array() || v.empty()) throw ConfigError("free_add: expected a nonempty array");
    std::vector<MeasureExpr> es;
    for (const auto& e : v) es.push_back(parse_measure(e));
    return MeasureExpr::free_add(std::move(es));
  }
  if (key == "even_sqrt") return MeasureExpr::even_sqrt(parse_measure(v));
  if (key == "square") return MeasureExpr::square(parse_measure(v));
  throw ConfigError("measure: unknown kind \"" + key + "\"");
}

json measure_to_json(const MeasureExpr& e) {
  using K = MeasureExpr::Kind;
  switch (e.kind) {
    case K::Dirac: return {{"dirac", e.p1}};
    case K::Semicircle: return {{"semicircle", e.p1}};
    case K::MarchenkoPastur: return {{"mp", {{"c", e.p1}, {"t", e.p2}}}};
    case K::Empirical: return {{"moments", e.leaf.m}};
    case K::Scale: return {{"scale", {{"by", e.p1}, {"of", measure_to_json(e.kids.at(0))}}}};
    case K::FreeAdd: {
      json a = json::array();
      for (const auto& k : e.kids) a.push_back(measure_to_json(k));
      return {{"free_add", a}};
    }
    case K::EvenSqrt: return {{"even_sqrt", measure_to_json(e.kids.at(0))}};
    case K::Square: return {{"square", measure_to_json(e.kids.at(0))}};
  }
  return nullptr;
}

Experiment parse_experiment(const json& j) {
  const std::string w = "experiment";
  check_keys(j, {"schema", "regime", "constants", "constants_tol", "dynamics", "stochastic", "N", "p", "q", "s",
                 "center", "swap_pq", "mu0", "t", "L", "gamma", "start", "start_seed", "quad_nodes", "bootstrap",
                 "comment"},
             w);
  check_schema(j);
  Experiment e;
  e.regime.kind = parse_regime_cfg(get<std::string>(j, "regime", w));
  if (j.contains("constants")) {
    const auto& c = j["constants"];
    if (c.is_string() && c.get<std::string>() == "plugin") {
      e.constants = ConstantsMode::PlugIn;
    } else {
      e.constants = ConstantsMode::Declared;
      e.regime.k = parse_constants(c);
    }
  }
  e.constants_tol = get_or<double>(j, "constants_tol", e.constants_tol, w);
  const auto dyn = get_or<std::string>(j, "dynamics", "frozen", w);
  if (dyn == "frozen")
    e.dynamics = DynamicsKind::Frozen;
  else if (dyn == "stochastic")
    e.dynamics = DynamicsKind::Stochastic;
  else
    throw ConfigError("dynamics: expected \"frozen\" or \"stochastic\"");
  if (j.contains("stochastic")) {
    const auto& s = j["stochastic"];
    check_keys(s, {"kappa", "replicas", "dt", "scheme", "seed"}, "stochastic");
    e.stochastic.kappa = get_or<double>(s, "kappa", e.stochastic.kappa, "stochastic");
    e.stochastic.replicas = get_or<int>(s, "replicas", e.stochastic.replicas, "stochastic");
    e.stochastic.dt_rescaled = get_or<double>(s, "dt", e.stochastic.dt_rescaled, "stochastic");
    e.stochastic.scheme = parse_scheme(get_or<std::string>(s, "scheme", "projected", "stochastic"));
    e.stochastic.seed = get_or<uint64_t>(s, "seed", e.stochastic.seed, "stochastic");
  }
  e.N_list = get<std::vector<int>>(j, "N", w);
  e.rule.p = parse_rule(j.at("p"), "p");
  e.rule.q = parse_rule(j.at("q"), "q");
  if (j.contains("s")) e.rule.s = parse_rule(j["s"], "s");
  e.rule.center = get_or<double>(j, "center", 0.0, w);
  e.rule.swap_pq = get_or<bool>(j, "swap_pq", false, w);
  if (j.contains("mu0")) e.mu0 = parse_measure(j["mu0"]);
  e.t_list.clear();
  for (const auto& t : get<json>(j, "t", w)) e.t_list.push_back(number(t, "t"));
  e.L = get_or<int>(j, "L", e.L, w);
  e.gamma = get_or<double>(j, "gamma", e.gamma, w);
  const auto st = get_or<std::string>(j, "start", "quantile", w);
  if (st == "quantile")
    e.start = StartMode::Quantile;
  else if (st == "iid")
    e.start = StartMode::IID;
  else
    throw ConfigError("start: expected \"quantile\" or \"iid\"");
  e.start_seed = get_or<uint64_t>(j, "start_seed", e.start_seed, w);
  e.quad_nodes = get_or<int>(j, "quad_nodes", e.quad_nodes, w);
  if (j.contains("bootstrap")) e.boundary = parse_bootstrap(j["bootstrap"]);
  return e;
}

ZerosConfig parse_zeros(const json& j) {
  const std::string w = "zeros";
  check_keys(j, {"schema", "kind", "N", "p", "q", "swap_pq", "L", "comment"}, w);
  check_schema(j);
  ZerosConfig z;
  const auto k = get<std::string>(j, "kind", w);
  if (k == "WignerZeros")
    z.kind = ZerosKind::WignerZeros;
  else if (k == "MPZeros")
    z.kind = ZerosKind::MPZeros;
  else
    throw ConfigError("kind: expected WignerZeros or MPZeros");
  z.N_list = get<std::vector<int>>(j, "N", w);
  z.rule.p = parse_rule(j.at("p"), "p");
  z.rule.q = parse_rule(j.at("q"), "q");
  z.rule.swap_pq = get_or<bool>(j, "swap_pq", false, w);
  z.L = get_or<int>(j, "L", z.L, w);
  return z;
}

OdeRunConfig parse_ode_run(const json& j) {
  const std::string w = "ode-run";
  check_keys(j, {"schema", "domain", "p", "q", "x0", "t_end", "output_times", "bootstrap", "lyapunov", "comment"},
             w);
  check_schema(j);
  OdeRunConfig c;
  c.domain = parse_domain(j, "domain");
  c.p = get<double>(j, "p", w);
  c.q = get<double>(j, "q", w);
  c.x0 = positions(j, "x0", w);
  c.t_end = get<double>(j, "t_end", w);
  if (j.contains("bootstrap")) c.boundary = parse_bootstrap(j["bootstrap"]);
  c.boundary.integ.output_times = get_or<std::vector<double>>(j, "output_times", {}, w);
  c.lyapunov = get_or<bool>(j, "lyapunov", c.domain == DomainKind::CompactAlcove, w);
  return c;
}

SdeRunConfig parse_sde_run(const json& j) {
  const std::string w = "sde-run";
  check_keys(j, {"schema", "domain", "kappa", "p", "q", "x0", "t_end", "dt", "replicas", "seed", "scheme",
                 "record_times", "clock", "a", "b", "L", "comment"},
             w);
  check_schema(j);
  SdeRunConfig c;
  c.domain = parse_domain(j, "domain");
  c.x0 = positions(j, "x0", w);
  c.cfg.params = {get<double>(j, "kappa", w), get<double>(j, "p", w), get<double>(j, "q", w),
                  static_cast<int>(c.x0.size())};
  c.t_end = get<double>(j, "t_end", w);
  c.cfg.dt = get_or<double>(j, "dt", 0.0, w);
  c.cfg.replicas = get_or<int>(j, "replicas", 1, w);
  c.cfg.seed = get_or<uint64_t>(j, "seed", 1, w);
  c.cfg.scheme = parse_scheme(get_or<std::string>(j, "scheme", "projected", w));
  c.record_times = get_or<std::vector<double>>(j, "record_times", {}, w);
  const auto clock = get_or<std::string>(j, "clock", "rescaled", w);
  if (clock == "unrescaled")
    c.unrescaled_clock = true;
  else if (clock != "rescaled")
    throw ConfigError("clock: expected \"rescaled\" or \"unrescaled\"");
  c.a = get_or<double>(j, "a", 1.0, w);
  c.b = get_or<double>(j, "b", 0.0, w);
  c.L = get_or<int>(j, "L", c.L, w);
  return c;
}

OracleConfig parse_oracle(const json& j) {
  const std::string w = "moment-oracle";
  check_keys(j, {"schema", "domain", "p", "q", "a", "b", "L", "x0", "t", "compare_particles", "comment"}, w);
  check_schema(j);
  OracleConfig c;
  c.domain = parse_domain(j, "domain");
  c.p = get<double>(j, "p", w);
  c.q = get<double>(j, "q", w);
  c.x0 = positions(j, "x0", w);
  c.N = static_cast<int>(c.x0.size());
  c.a = get_or<double>(j, "a", 1.0, w);
  c.b = get_or<double>(j, "b", 0.0, w);
  c.L = get_or<int>(j, "L", c.L, w);
  c.t_grid = get<std::vector<double>>(j, "t", w);
  c.compare_particles = get_or<bool>(j, "compare_particles", true, w);
  return c;
}

FreeprobConfig parse_freeprob(const json& j) {
  const std::string w = "freeprob-eval";
  check_keys(j, {"schema", "expr", "regime", "constants", "mu0", "t", "L", "comment"}, w);
  check_schema(j);
  FreeprobConfig c;
  c.L = get_or<int>(j, "L", c.L, w);
  if (j.contains("expr") == j.contains("regime")) throw ConfigError(w + ": give exactly one of \"expr\" or \"regime\"");
  if (j.contains("expr")) {
    c.expr = parse_measure(j["expr"]);
    return c;
  }
  c.has_regime = true;
  c.regime.kind = parse_regime_cfg(get<std::string>(j, "regime", w));
  if (j.contains("constants")) c.regime.k = parse_constants(j["constants"]);
  c.expr = j.contains("mu0") ? parse_measure(j["mu0"]) : MeasureExpr::dirac(0);
  for (const auto& t : get<json>(j, "t", w)) c.t_list.push_back(number(t, "t"));
  return c;
}

}  // namespace bcj
