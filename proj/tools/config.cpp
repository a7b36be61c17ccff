#include "config.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spin1cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig::RunConfig() {
  kv_ = {
      {"grid.dim", "1"},
      {"grid.extent", "8"},
      {"grid.n", "257"},
      {"trap.gamma", "1"},
      {"model.beta_n", "1"},
      {"model.beta_s", "0.5"},
      {"model.q", "0"},
      {"constraint.M", "0"},
      {"solver.dt", "0.01"},
      {"solver.tol", "1e-9"},
      {"solver.max_iter", "200000"},
      {"solver.seed", "1"},
      {"bifurcation.bracket_tol", "1e-3"},
      {"output.dir", "out"},
      {"output.formats", "json,csv"},
  };
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config file not found: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void RunConfig::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::runtime_error("--set expects key=value, got: " + assignment);
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!kv_.contains(key)) throw std::runtime_error("unknown config key: " + key);
  kv_[key] = value;
}

double RunConfig::get_double(const std::string& key) const {
  const std::string& s = kv_.at(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config key " + key + " is not a number: " + s);
  }
}

int RunConfig::get_int(const std::string& key) const {
  const double v = get_double(key);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw std::runtime_error("config key " + key + " is not an integer");
  return i;
}

std::string RunConfig::get_string(const std::string& key) const { return kv_.at(key); }

std::vector<double> RunConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  std::istringstream ss(kv_.at(key));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw std::runtime_error("config key " + key + " has a non-numeric entry: " + tok);
    }
  }
  return out;
}

std::string RunConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : kv_) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

std::string RunConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

spinor::GridPtr RunConfig::make_grid() const {
  spinor::GridSpec spec;
  spec.dim = get_int("grid.dim");
  spec.extent = get_double("grid.extent");
  spec.n = get_int("grid.n");
  return spinor::Grid::make(spec);
}

spinor::ModelParams RunConfig::make_model(const spinor::GridPtr& grid) const {
  std::vector<double> gammas = get_double_list("trap.gamma");
  if (gammas.size() == 1 && grid->dim() > 1)
    gammas.assign(static_cast<std::size_t>(grid->dim()), gammas[0]);
  return spinor::make_params(grid, get_double("model.beta_n"), get_double("model.beta_s"),
                             get_double("model.q"), gammas);
}

spinor::Constraints RunConfig::make_constraints() const {
  spinor::Constraints c{1.0, get_double("constraint.M")};
  c.validate();
  return c;
}

spinor::SolveOptions RunConfig::make_solver_options() const {
  spinor::SolveOptions o;
  o.dt = get_double("solver.dt");
  o.tol = get_double("solver.tol");
  o.max_iter = get_int("solver.max_iter");
  o.seed = static_cast<std::uint64_t>(get_int("solver.seed"));
  if (!(o.dt > 0.0) || !(o.tol > 0.0) || o.max_iter < 1)
    throw std::runtime_error("solver options out of range");
  return o;
}

}  // namespace spin1cli
