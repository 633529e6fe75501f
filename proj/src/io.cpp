#include "bcj/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unistd.h>

namespace bcj {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

// JSON cannot hold inf/nan; they become strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  return fmt17(v);
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  const size_t n = tr.x.empty() ? 0 : tr.x[0].size();
  os << "t";
  for (size_t i = 1; i <= n; ++i) os << ",x_" << i;
  os << "\n";
  for (size_t k = 0; k < tr.t.size(); ++k) {
    os << fmt17(tr.t[k]);
    for (double v : tr.x[k]) os << "," << fmt17(v);
    os << "\n";
  }
}

void write_paths_csv(std::ostream& os, const std::vector<SdePath>& paths) {
  const size_t n = paths.empty() || paths[0].states.empty() ? 0 : paths[0].states[0].size();
  os << "replica,t";
  for (size_t i = 1; i <= n; ++i) os << ",x_" << i;
  os << "\n";
  for (const auto& p : paths)
    for (size_t k = 0; k < p.times.size(); ++k) {
      os << p.replicaId << "," << fmt17(p.times[k]);
      for (double v : p.states[k]) os << "," << fmt17(v);
      os << "\n";
    }
}

void write_report_csv(std::ostream& os, const ConvergenceReport& rep) {
  os << "N,t,l,empirical,predicted,gap,relgap,stderr,path_relgap,replicas\n";
  for (const auto& r : rep.rows)
    os << r.N << "," << fmt17(r.t) << "," << r.l << "," << fmt17(r.empirical) << "," << fmt17(r.predicted) << ","
       << fmt17(r.gap) << "," << fmt17(r.relgap) << "," << fmt17(r.stderr_) << "," << fmt17(r.path_relgap) << ","
       << r.replicas << "\n";
}

json trajectory_to_json(const Trajectory& tr) {
  json j;
  j["domain"] = tr.domain == DomainKind::CompactAlcove ? "compact" : "noncompact";
  j["t"] = tr.t;
  j["x"] = tr.x;
  return j;
}

json moments_to_json(const MomentVector& m) {
  json j;
  j["L"] = m.L();
  j["moments"] = json::array();
  for (double v : m.m) j["moments"].push_back(num(v));
  j["support"] = m.nonneg ? "nonnegative" : "real";
  j["provenance"] = m.provenance;
  return j;
}

json report_to_json(const ConvergenceReport& rep) {
  json j;
  j["label"] = rep.label;
  j["rows"] = json::array();
  for (const auto& r : rep.rows)
    j["rows"].push_back({{"N", r.N},
                         {"t", num(r.t)},
                         {"l", r.l},
                         {"empirical", num(r.empirical)},
                         {"predicted", num(r.predicted)},
                         {"gap", num(r.gap)},
                         {"relgap", num(r.relgap)},
                         {"stderr", num(r.stderr_)},
                         {"path_relgap", num(r.path_relgap)},
                         {"replicas", r.replicas}});
  j["decay"] = json::array();
  for (const auto& f : rep.fits)
    j["decay"].push_back({{"t", num(f.t)}, {"l", f.l}, {"order", num(f.order)}, {"monotone", f.monotone}});
  j["per_N"] = json::array();
  for (const auto& n : rep.per_N)
    j["per_N"].push_back({{"N", n.N},
                          {"p", num(n.p)},
                          {"q", num(n.q)},
                          {"a", num(n.scaling.a)},
                          {"b", num(n.scaling.b)},
                          {"s", num(n.scaling.s)},
                          {"C", num(n.constants.C)},
                          {"B", num(n.constants.B)},
                          {"c", num(n.constants.c)},
                          {"phat", num(n.constants.phat)},
                          {"qhat", num(n.constants.qhat)},
                          {"clipped", n.clipped},
                          {"t_bootstrap", num(n.t_bootstrap)}});
  j["warnings"] = rep.warnings;
  return j;
}

OutputDir::OutputDir(fs::path target, bool force) : target_(std::move(target)), force_(force) {
  if (target_.empty()) throw std::invalid_argument("output directory is empty");
  if (fs::exists(target_) && !force_)
    throw std::runtime_error("output directory " + target_.string() + " exists (use --force to replace it)");
  const fs::path parent = fs::absolute(target_).parent_path();
  fs::create_directories(parent);
  staging_ = parent / ("." + target_.filename().string() + ".tmp." + std::to_string(::getpid()));
  fs::remove_all(staging_);
  fs::create_directory(staging_);
}

OutputDir::~OutputDir() {
  if (!done_) {
    std::error_code ec;
    fs::remove_all(staging_, ec);
  }
}

void OutputDir::write(const std::string& name, const std::string& content) {
  std::ofstream out(staging_ / name, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + (staging_ / name).string());
}

void OutputDir::commit() {
  if (fs::exists(target_)) {
    if (!force_) throw std::runtime_error("output directory " + target_.string() + " appeared while running");
    fs::remove_all(target_);
  }
  fs::rename(staging_, target_);
  done_ = true;
}

}  // namespace bcj
