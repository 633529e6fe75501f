#pragma once

#include <filesystem>
#include <json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "bcj/detflow.hpp"
#include "bcj/harness.hpp"
#include "bcj/moments.hpp"
#include "bcj/sde.hpp"

namespace bcj {

using json = nlohmann::json;

// 17 significant digits, enough to re-parse every double exactly.
std::string fmt17(double v);

void write_trajectory_csv(std::ostream& os, const Trajectory& tr);
// Long format: replica,t,x_1..x_N.
void write_paths_csv(std::ostream& os, const std::vector<SdePath>& paths);
// Long format: N,t,l,empirical,predicted,gap,relgap,stderr,path_relgap,replicas.
void write_report_csv(std::ostream& os, const ConvergenceReport& rep);

json trajectory_to_json(const Trajectory& tr);
json moments_to_json(const MomentVector& m);
json report_to_json(const ConvergenceReport& rep);

// Collects output files in a hidden staging directory next to the target and
// renames it into place on commit(). An existing target is an error unless force.
class OutputDir {
 public:
  OutputDir(std::filesystem::path target, bool force);
  ~OutputDir();
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;

  void write(const std::string& name, const std::string& content);
  void commit();
  const std::filesystem::path& target() const { return target_; }

 private:
  std::filesystem::path target_, staging_;
  bool force_ = false, done_ = false;
};

}  // namespace bcj
