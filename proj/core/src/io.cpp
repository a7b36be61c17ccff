#include "spinor/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace spinor {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_state_csv(const std::filesystem::path& path, const SpinorState& s) {
  const Grid& g = *s.grid();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "# dim=" << g.dim() << " n=" << g.nodes_per_axis()
      << " extent=" << format_double(g.extent()) << "\n";
  if (g.dim() == 1) {
    out << "x,u1,u0,um1\n";
    for (std::size_t i = 0; i < g.size(); ++i)
      out << format_double(g.coord(static_cast<int>(i))) << ',' << format_double(s.u1.v[i])
          << ',' << format_double(s.u0.v[i]) << ',' << format_double(s.um1.v[i]) << "\n";
  } else {
    out << "u1,u0,um1\n";
    for (std::size_t i = 0; i < g.size(); ++i)
      out << format_double(s.u1.v[i]) << ',' << format_double(s.u0.v[i]) << ','
          << format_double(s.um1.v[i]) << "\n";
    nlohmann::json meta;
    meta["dim"] = g.dim();
    meta["n"] = g.nodes_per_axis();
    meta["extent"] = g.extent();
    std::ofstream side(path.string() + ".meta.json");
    side << meta.dump(2) << "\n";
  }
}

SpinorState read_state_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("# dim=", 0) != 0)
    throw std::runtime_error("state file missing shape comment: " + path.string());

  GridSpec spec;
  {
    std::istringstream hdr(line.substr(1));
    std::string tok;
    while (hdr >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      if (key == "dim") spec.dim = std::stoi(val);
      else if (key == "n") spec.n = std::stoi(val);
      else if (key == "extent") spec.extent = std::stod(val);
    }
  }
  const std::filesystem::path side = path.string() + ".meta.json";
  if (std::filesystem::exists(side)) {
    std::ifstream sf(side);
    nlohmann::json meta = nlohmann::json::parse(sf);
    spec.dim = meta.at("dim").get<int>();
    spec.n = meta.at("n").get<int>();
    spec.extent = meta.at("extent").get<double>();
  }
  GridPtr grid = Grid::make(spec);

  if (!std::getline(in, line)) throw std::runtime_error("state file truncated");
  const bool with_x = line.rfind("x,", 0) == 0;

  SpinorState s = zero_state(grid);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= grid->size()) throw std::runtime_error("state file has too many rows");
    std::istringstream ls(line);
    std::string cell;
    double vals[4] = {0, 0, 0, 0};
    int ncell = 0;
    while (std::getline(ls, cell, ',') && ncell < 4) vals[ncell++] = std::stod(cell);
    const int want = with_x ? 4 : 3;
    if (ncell != want) throw std::runtime_error("malformed state row in " + path.string());
    const int off = with_x ? 1 : 0;
    s.u1.v[row] = vals[off + 0];
    s.u0.v[row] = vals[off + 1];
    s.um1.v[row] = vals[off + 2];
    ++row;
  }
  if (row != grid->size()) throw std::runtime_error("state file row count mismatch");
  return s;
}

}  // namespace spinor
