#pragma once

#include <map>
#include <string>
#include <vector>

#include "spinor/energy.hpp"
#include "spinor/solver.hpp"

namespace spin1cli {

/// Flat key=value run configuration: defaults, optional config file, then
/// repeatable --set overrides, validated against module preconditions
/// before any compute.
class RunConfig {
 public:
  RunConfig();  // defaults only

  void load_file(const std::string& path);        // throws on missing/bad file
  void set(const std::string& assignment);        // "key=value"
  void set(const std::string& key, const std::string& value);

  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;

  /// FNV-1a of the canonical sorted key=value dump; stamped into outputs.
  std::string hash() const;
  std::string canonical() const;

  spinor::GridPtr make_grid() const;
  spinor::ModelParams make_model(const spinor::GridPtr& grid) const;
  spinor::Constraints make_constraints() const;
  spinor::SolveOptions make_solver_options() const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace spin1cli
