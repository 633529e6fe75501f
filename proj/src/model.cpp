#include "bcj/model.hpp"

#include <cmath>
#include <sstream>

namespace bcj {

bool in_domain(const ParticleState& s) {
  const auto& x = s.x;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) return false;
    if (i > 0 && x[i] < x[i - 1]) return false;
  }
  if (x.empty()) return true;
  if (s.domain == DomainKind::CompactAlcove) return x.front() >= -1.0 && x.back() <= 1.0;
  return x.front() >= 1.0;
}

bool is_interior(const ParticleState& s, double gap_tol) {
  const auto& x = s.x;
  if (!in_domain(s)) return false;
  for (size_t i = 1; i < x.size(); ++i)
    if (x[i] - x[i - 1] <= gap_tol) return false;
  if (x.empty()) return true;
  if (s.domain == DomainKind::CompactAlcove) return x.front() > -1.0 && x.back() < 1.0;
  return x.front() > 1.0;
}

ModelParams params_from_multiplicities(double k1, double k2, double k3, int N) {
  if (N < 1) throw ParamError("N>=1", "particle number must be positive");
  if (!(k3 > 0)) throw ParamError("k3>0", "multiplicity k3 must be positive");
  if (!(k2 >= 0)) throw ParamError("k2>=0", "multiplicity k2 must be nonnegative");
  if (!(k1 + k2 >= 0)) throw ParamError("k1+k2>=0", "multiplicities need k1+k2 >= 0");
  ModelParams mp;
  mp.N = N;
  mp.kappa = k3;
  mp.q = (N - 1) + (1 + 2 * k1 + 2 * k2) / (2 * k3);
  mp.p = (N - 1) + (1 + 2 * k2) / (2 * k3);
  return mp;
}

Multiplicities multiplicities_from_params(const ModelParams& mp) {
  Multiplicities m;
  m.k3 = mp.kappa;
  const double u = 2 * mp.kappa * (mp.p - (mp.N - 1));  // 1 + 2 k2
  const double v = 2 * mp.kappa * (mp.q - (mp.N - 1));  // 1 + 2 k1 + 2 k2
  m.k2 = (u - 1) / 2;
  m.k1 = (v - u) / 2;
  return m;
}

void validate(const ModelParams& mp) {
  if (mp.N < 1) throw ParamError("N>=1", "particle number must be positive");
  if (!(mp.kappa > 0)) throw ParamError("kappa>0", "kappa must be positive");
  if (!(mp.p > mp.N - 1)) throw ParamError("p>N-1", "parameter p must exceed N-1");
  if (!(mp.q > mp.N - 1)) throw ParamError("q>N-1", "parameter q must exceed N-1");
}

bool below_noncollision_threshold(const ModelParams& mp) {
  const double thr = mp.N - 1 + 2.0 / mp.kappa;
  return mp.kappa < 1 || mp.p < thr || mp.q < thr;
}

void drift_compact_raw(std::span<const double> x, double p, double q, std::span<double> out) {
  const size_t n = x.size();
  for (size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    double acc = 0;
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      acc += (1 - xi * x[j]) / (xi - x[j]);
    }
    out[i] = (p - q) - (p + q) * xi + 2 * acc;
  }
}

void drift_noncompact_raw(std::span<const double> x, double p, double q, std::span<double> out) {
  const size_t n = x.size();
  for (size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    double acc = 0;
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      acc += (xi * x[j] - 1) / (xi - x[j]);
    }
    out[i] = (q - p) + (q + p) * xi + 2 * acc;
  }
}

void drift_raw(DomainKind d, std::span<const double> x, double p, double q, std::span<double> out) {
  if (d == DomainKind::CompactAlcove)
    drift_compact_raw(x, p, q, out);
  else
    drift_noncompact_raw(x, p, q, out);
}

namespace {

void require_interior(const ParticleState& s) {
  const auto& x = s.x;
  for (size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) {
      std::ostringstream os;
      os << "singular configuration: particles " << i - 1 << " and " << i << " coincide or are unordered";
      throw SingularConfiguration(int(i - 1), int(i), os.str());
    }
  }
  if (x.empty()) return;
  if (s.domain == DomainKind::CompactAlcove) {
    if (!(x.front() > -1.0)) throw SingularConfiguration(0, -1, "singular configuration: particle at -1");
    if (!(x.back() < 1.0))
      throw SingularConfiguration(int(x.size() - 1), -1, "singular configuration: particle at +1");
  } else if (!(x.front() > 1.0)) {
    throw SingularConfiguration(0, -1, "singular configuration: particle at 1");
  }
}

}  // namespace

std::vector<double> drift_compact(const ParticleState& x, double p, double q) {
  require_interior(x);
  std::vector<double> out(x.x.size());
  drift_compact_raw(x.x, p, q, out);
  return out;
}

std::vector<double> drift_noncompact(const ParticleState& x, double p, double q) {
  require_interior(x);
  std::vector<double> out(x.x.size());
  drift_noncompact_raw(x.x, p, q, out);
  return out;
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::WignerStationary: return "WignerStationary";
    case Regime::WignerDegenerate: return "WignerDegenerate";
    case Regime::WignerLocal: return "WignerLocal";
    case Regime::WignerLocalDrift: return "WignerLocalDrift";
    case Regime::MPStationary: return "MPStationary";
    case Regime::MPLocal: return "MPLocal";
    case Regime::NCWignerLocal: return "NCWignerLocal";
    case Regime::NCMPTimeInverted: return "NCMPTimeInverted";
    case Regime::NCMPLocal: return "NCMPLocal";
  }
  return "?";
}

Regime parse_regime(const std::string& name) {
  for (Regime r : {Regime::WignerStationary, Regime::WignerDegenerate, Regime::WignerLocal,
                   Regime::WignerLocalDrift, Regime::MPStationary, Regime::MPLocal,
                   Regime::NCWignerLocal, Regime::NCMPTimeInverted, Regime::NCMPLocal})
    if (regime_name(r) == name) return r;
  if (name == "KestenMcKay" || name == "Wachter")
    throw std::invalid_argument("regime " + name + " is not implemented (Kesten-McKay and Wachter limits are out of scope)");
  throw std::invalid_argument("unknown regime '" + name + "'");
}

DomainKind regime_domain(Regime r) {
  switch (r) {
    case Regime::NCWignerLocal:
    case Regime::NCMPTimeInverted:
    case Regime::NCMPLocal: return DomainKind::NoncompactChamber;
    default: return DomainKind::CompactAlcove;
  }
}

bool regime_is_local(Regime r) {
  switch (r) {
    case Regime::WignerLocal:
    case Regime::WignerLocalDrift:
    case Regime::MPLocal:
    case Regime::NCWignerLocal:
    case Regime::NCMPLocal: return true;
    default: return false;
  }
}

bool regime_needs_center(Regime r) {
  return r == Regime::WignerLocal || r == Regime::WignerLocalDrift || r == Regime::NCWignerLocal;
}

bool regime_is_mp(Regime r) {
  return r == Regime::MPStationary || r == Regime::MPLocal || r == Regime::NCMPTimeInverted ||
         r == Regime::NCMPLocal;
}

Scaling regime_scaling(Regime r, double p, double q, int N, double s_local, double b_local) {
  Scaling sc;
  const double n = N;
  if (regime_is_local(r) && !(s_local > 0))
    throw std::invalid_argument(regime_name(r) + " needs a positive time scale s_N");
  switch (r) {
    case Regime::WignerStationary:
      sc = {q / std::sqrt(n * p), (p - q) / (p + q), p + q};
      break;
    case Regime::WignerDegenerate:
      sc = {std::sqrt(q / n), (p - q) / (p + q), p + q};
      break;
    case Regime::WignerLocal:
    case Regime::WignerLocalDrift:
      if (!(b_local > -1 && b_local < 1)) throw std::invalid_argument("center b_N must lie in (-1,1)");
      sc = {std::sqrt(s_local / n), b_local, s_local};
      break;
    case Regime::NCWignerLocal:
      if (!(b_local > 1)) throw std::invalid_argument("center b_N must exceed 1");
      sc = {std::sqrt(s_local / n), b_local, s_local};
      break;
    case Regime::MPStationary:
      sc = {q / n, -1, p + q};
      break;
    case Regime::MPLocal:
      sc = {s_local / n, -1, s_local};
      break;
    case Regime::NCMPTimeInverted:
      sc = {p / n, 1, p + q};
      break;
    case Regime::NCMPLocal:
      sc = {s_local / n, 1, s_local};
      break;
  }
  return sc;
}

RegimeConstants plugin_constants(Regime r, double p, double q, int N, const Scaling& sc) {
  RegimeConstants k;
  k.C = p / q;
  k.B = sc.b;
  k.phat = p / N;
  k.qhat = q / N;
  const double drift1 = sc.a * (p - q - sc.b * (p + q)) / sc.s;
  k.c = regime_domain(r) == DomainKind::CompactAlcove ? drift1 : -drift1;
  return k;
}

std::string check_constants(Regime r, const RegimeConstants& d, const RegimeConstants& f,
                            double rel_tol) {
  auto off = [&](double want, double got) {
    return std::abs(want - got) > rel_tol * std::max(1.0, std::abs(want));
  };
  std::ostringstream os;
  os.precision(17);
  switch (r) {
    case Regime::WignerStationary:
      if (off(d.C, f.C)) os << "C declared " << d.C << " but p_N/q_N = " << f.C;
      break;
    case Regime::WignerLocal:
    case Regime::NCWignerLocal:
      if (off(d.B, f.B)) os << "B declared " << d.B << " but b_N = " << f.B;
      break;
    case Regime::WignerLocalDrift:
      if (off(d.B, f.B)) os << "B declared " << d.B << " but b_N = " << f.B;
      else if (off(d.c, f.c)) os << "c declared " << d.c << " but finite-N drift constant = " << f.c;
      break;
    case Regime::MPStationary:
    case Regime::MPLocal:
      if (off(d.phat, f.phat)) os << "phat declared " << d.phat << " but p_N/N = " << f.phat;
      break;
    case Regime::NCMPTimeInverted:
    case Regime::NCMPLocal:
      if (off(d.qhat, f.qhat)) os << "qhat declared " << d.qhat << " but q_N/N = " << f.qhat;
      break;
    case Regime::WignerDegenerate:
      break;
  }
  return os.str();
}

}  // namespace bcj
