#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "config.hpp"
#include "spinor/analysis.hpp"
#include "spinor/bifurcation.hpp"
#include "spinor/io.hpp"
#include "spinor/redistribute.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spinor;
using spin1cli::RunConfig;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNoConverge = 3;
constexpr int kExitCheckFailed = 4;

struct OutputFormats {
  bool json_on = true;
  bool csv_on = true;
};

OutputFormats formats_from(const RunConfig& cfg) {
  OutputFormats f;
  const std::string s = cfg.get_string("output.formats");
  f.json_on = s.find("json") != std::string::npos;
  f.csv_on = s.find("csv") != std::string::npos;
  return f;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

json energy_json(const EnergyBreakdown& e) {
  return json{{"kin", e.kin}, {"pot", e.pot}, {"n", e.n},
              {"s", e.s},     {"zee", e.zee}, {"total", e.total}};
}

json report_json(const SolveReport& rep, const RunConfig& cfg) {
  json j;
  j["config_hash"] = cfg.hash();
  j["grid"] = {{"dim", cfg.get_int("grid.dim")},
               {"n", cfg.get_int("grid.n")},
               {"extent", cfg.get_double("grid.extent")}};
  j["model"] = {{"beta_n", cfg.get_double("model.beta_n")},
                {"beta_s", cfg.get_double("model.beta_s")},
                {"q", cfg.get_double("model.q")}};
  j["constraint"] = {{"N", 1.0}, {"M", cfg.get_double("constraint.M")}};
  j["converged"] = rep.converged;
  j["iterations"] = rep.iterations;
  j["residual"] = rep.residual;
  j["classification"] =
      rep.classification == Classification::two_component ? "2C" : "3C";
  j["u0_mass"] = rep.u0_mass;
  j["energy"] = energy_json(rep.energy);
  if (rep.mult)
    j["multipliers"] = {{"mu", rep.mult->mu}, {"lambda", rep.mult->lambda}};
  else
    j["multipliers"] = nullptr;
  return j;
}

json verification_json(const VerificationResult& r, bool required) {
  json j;
  j["name"] = r.name;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["gap"] = r.gap;
  j["tolerance"] = r.tolerance;
  j["satisfied"] = r.satisfied;
  j["equality"] = r.equality;
  j["required"] = required;
  if (r.restriction_radius > 0.0) j["restriction_radius"] = r.restriction_radius;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

int run_solve(const RunConfig& cfg, const std::string& out_dir, bool two_component) {
  const GridPtr grid = cfg.make_grid();
  const ModelParams p = cfg.make_model(grid);
  const Constraints c = cfg.make_constraints();
  const SolveOptions o = cfg.make_solver_options();
  const OutputFormats fmt = formats_from(cfg);

  const SolveReport rep =
      two_component ? solve_two_component(p, c, o) : solve_ground_state(p, c, o);

  fs::create_directories(out_dir);
  if (fmt.json_on) {
    write_text(fs::path(out_dir) / "report.json", report_json(rep, cfg).dump(2) + "\n");
    write_text(fs::path(out_dir) / "energy.json", energy_json(rep.energy).dump(2) + "\n");
  }
  if (fmt.csv_on) write_state_csv(fs::path(out_dir) / "state.csv", rep.state);

  if (!rep.converged) {
    std::cerr << "solver did not converge within max_iter (residual " << rep.residual
              << ")\n";
    return kExitNoConverge;
  }
  std::cout << "energy " << format_double(rep.energy.total) << ", classification "
            << (rep.classification == Classification::two_component ? "2C" : "3C")
            << ", iterations " << rep.iterations << "\n";
  return kExitOk;
}

int run_verify(const RunConfig& cfg, const std::string& state_path,
               const std::string& out_dir) {
  const SpinorState state = read_state_csv(state_path);
  const GridPtr grid = state.grid();
  RunConfig shape_cfg = cfg;  // grid keys follow the state file
  shape_cfg.set("grid.dim", std::to_string(grid->dim()));
  shape_cfg.set("grid.n", std::to_string(grid->nodes_per_axis()));
  shape_cfg.set("grid.extent", format_double(grid->extent()));
  const ModelParams p = shape_cfg.make_model(grid);

  const double N = particle_number(state);
  const double M = magnetization(state);
  const Constraints c{N, std::max(0.0, M)};
  const double m_frac = M / N;
  const double u0_mass = inner(state.u0, state.u0);
  const bool interior_m = m_frac > 1e-6 && m_frac < 1.0 - 1e-6;
  const bool three_c = u0_mass >= kTwoComponentMassCut;

  json results = json::array();
  bool failed = false;
  auto push = [&](const VerificationResult& r, bool required) {
    results.push_back(verification_json(r, required));
    if (required && !r.satisfied) failed = true;
  };
  auto skip = [&](const std::string& name, const std::string& why) {
    results.push_back(json{{"name", name}, {"skipped", true}, {"reason", why}});
  };

  for (const auto& r : check_qualitative(state, p, c)) push(r, true);

  if (interior_m) {
    const Multipliers m = multipliers(state, p);
    const IdentityGap ig = lambda_identity_gap(state, p, m);
    VerificationResult r;
    r.name = "lambda_identity";
    r.equality = true;
    r.lhs = ig.lhs;
    r.rhs = ig.rhs;
    r.gap = ig.gap;
    r.tolerance = 1e-3;
    r.satisfied = ig.gap <= r.tolerance;
    push(r, true);
  } else {
    skip("lambda_identity", "needs 0 < M < 1");
  }

  if (interior_m && three_c) {
    const BalanceCheck bc = verify_zeeman_balance(state, p, c);
    push(bc.inequality, true);
    push(bc.equality, true);
    push(verify_sigma_balance(state, p, c), true);
    {
      VerificationResult r;
      r.name = "threshold_quotient_matches_q";
      r.equality = true;
      r.lhs = threshold_quotient(state, p);
      r.rhs = p.q;
      r.gap = relative_gap(r.lhs, r.rhs);
      r.tolerance = 1e-3;
      r.satisfied = r.gap <= r.tolerance;
      push(r, true);
    }
    push(pointwise_quotient_chain(state, mass_ratio_sigma(state)), true);
    const OuterExchangeProbe probe = probe_outer_exchange(state, p);
    results.push_back(json{{"name", "outer_exchange_probe"},
                           {"lhs", probe.lhs},
                           {"rhs", probe.rhs},
                           {"both_finite", probe.both_finite},
                           {"tail_ratio_u0_um1", probe.tail_ratio_u0_um1},
                           {"tail_ratio_um1_u1", probe.tail_ratio_um1_u1},
                           {"tail_radius", probe.tail_radius},
                           {"required", false},
                           {"note", "exploratory; no verdict"}});
  } else if (interior_m) {
    push(verify_two_component_inequality(state, p, c), false);
    results.push_back(json{{"name", "threshold_upper_bound"},
                           {"value", threshold_upper_bound(state, p, c)},
                           {"required", false}});
    skip("zeeman_balance", "two-component state");
    skip("threshold_quotient_matches_q", "two-component state");
  } else {
    skip("zeeman_balance", "degenerate magnetization");
  }

  if (inner(state.u1, state.u1) > 1e-3) {
    const DecayFit fit = decay_fit(state, 1, 4.0, 7.0);
    VerificationResult r;
    r.name = "decay_fit_u1";
    r.lhs = 0.99;
    r.rhs = fit.r2;
    r.satisfied = fit.accepted;
    r.note = "t=" + format_double(fit.t) + " prefactor=" + format_double(fit.prefactor);
    push(r, true);
  } else {
    skip("decay_fit_u1", "u1 below mass floor");
  }

  json doc;
  doc["config_hash"] = cfg.hash();
  doc["state"] = state_path;
  doc["M"] = M;
  doc["u0_mass"] = u0_mass;
  doc["results"] = results;
  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "verification.json", doc.dump(2) + "\n");

  if (failed) {
    std::cerr << "required checks failed; see verification.json\n";
    return kExitCheckFailed;
  }
  std::cout << "all required checks passed\n";
  return kExitOk;
}

int run_curve(const RunConfig& cfg, const std::vector<double>& Ms,
              const std::string& out_dir) {
  const GridPtr grid = cfg.make_grid();
  const ModelParams p = cfg.make_model(grid);
  BifurcationOptions o;
  o.bracket_tol = cfg.get_double("bifurcation.bracket_tol");
  o.solve = cfg.make_solver_options();
  const OutputFormats fmt = formats_from(cfg);

  const PhaseCurve curve = phase_curve(Ms, p, o);

  std::string csv = "# dim=" + std::to_string(grid->dim()) +
                    " n=" + std::to_string(grid->nodes_per_axis()) +
                    " extent=" + format_double(grid->extent()) + "\n";
  csv += "M,q_lo,q_hi,U\n";
  json points = json::array();
  std::size_t ok = 0;
  for (const auto& pt : curve.points) {
    if (pt.point) {
      ++ok;
      csv += format_double(pt.M) + "," + format_double(pt.point->q_lo) + "," +
             format_double(pt.point->q_hi) + "," + format_double(pt.point->U) + "\n";
      points.push_back(json{{"M", pt.M},
                            {"q_lo", pt.point->q_lo},
                            {"q_hi", pt.point->q_hi},
                            {"U", pt.point->U},
                            {"qbar_contribution", pt.point->qbar_contribution}});
    } else {
      points.push_back(json{{"M", pt.M}, {"error", pt.error}});
    }
  }
  fs::create_directories(out_dir);
  if (fmt.csv_on) write_text(fs::path(out_dir) / "curve.csv", csv);
  if (fmt.json_on) {
    json summary;
    summary["config_hash"] = cfg.hash();
    summary["qbar_est"] = curve.qbar_est;
    summary["max_U"] = curve.max_U;
    summary["points"] = points;
    write_text(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
  }
  if (ok == 0) {
    std::cerr << "every curve point failed\n";
    return kExitNoConverge;
  }
  std::cout << "curve: " << ok << "/" << curve.points.size()
            << " points, qbar_est " << format_double(curve.qbar_est) << "\n";
  return kExitOk;
}

int run_scan_eg(const RunConfig& cfg, std::vector<double> Ms, std::vector<double> qs,
                const std::string& out_dir) {
  const GridPtr grid = cfg.make_grid();
  const ModelParams p = cfg.make_model(grid);
  const SolveOptions o = cfg.make_solver_options();
  const OutputFormats fmt = formats_from(cfg);
  std::sort(Ms.begin(), Ms.end());
  std::sort(qs.begin(), qs.end());

  // energies indexed [mi][qi]; each M row swept warm in q
  std::vector<std::vector<double>> E(Ms.size(), std::vector<double>(qs.size(), 0.0));
  std::string csv = "# dim=" + std::to_string(grid->dim()) +
                    " n=" + std::to_string(grid->nodes_per_axis()) +
                    " extent=" + format_double(grid->extent()) + "\n";
  csv += "M,q,energy,classification,u0_mass\n";
  for (std::size_t mi = 0; mi < Ms.size(); ++mi) {
    std::vector<SweepPoint> sweep;
    for (double q : qs) sweep.push_back(SweepPoint{Ms[mi], q});
    auto row = continuation(p, Constraints{1.0, 0.0}, o, sweep);
    for (std::size_t qi = 0; qi < qs.size(); ++qi) {
      if (!row[qi].report) throw std::runtime_error("scan point failed: " + row[qi].error);
      const SolveReport& rep = *row[qi].report;
      E[mi][qi] = rep.energy.total;
      csv += format_double(Ms[mi]) + "," + format_double(qs[qi]) + "," +
             format_double(rep.energy.total) + "," +
             (rep.classification == Classification::two_component ? "2C" : "3C") +
             "," + format_double(rep.u0_mass) + "\n";
    }
  }

  bool mono_q = true, mono_m = true, lipschitz = true, eg0_const = true;
  double max_lip = 0.0;
  for (std::size_t mi = 0; mi < Ms.size(); ++mi)
    for (std::size_t qi = 1; qi < qs.size(); ++qi) {
      const double diff = E[mi][qi] - E[mi][qi - 1];
      if (diff < -1e-10) mono_q = false;
      const double dq = qs[qi] - qs[qi - 1];
      if (dq > 0.0) {
        const double ratio = (std::abs(diff) - 1e-8) / dq;
        max_lip = std::max(max_lip, ratio);
        if (ratio > 1.0) lipschitz = false;
      }
    }
  for (std::size_t qi = 0; qi < qs.size(); ++qi)
    for (std::size_t mi = 1; mi < Ms.size(); ++mi)
      if (E[mi][qi] - E[mi - 1][qi] < -1e-10) mono_m = false;
  for (std::size_t mi = 0; mi < Ms.size(); ++mi) {
    if (Ms[mi] != 0.0) continue;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t qi = 0; qi < qs.size(); ++qi) {
      if (!(qs[qi] > 0.0)) continue;
      lo = std::min(lo, E[mi][qi]);
      hi = std::max(hi, E[mi][qi]);
    }
    if (hi > lo + 1e-8) eg0_const = false;
  }

  fs::create_directories(out_dir);
  if (fmt.csv_on) write_text(fs::path(out_dir) / "eg_surface.csv", csv);
  if (fmt.json_on) {
    json doc;
    doc["config_hash"] = cfg.hash();
    doc["monotone_in_q"] = mono_q;
    doc["monotone_in_M"] = mono_m;
    doc["lipschitz_in_q_ok"] = lipschitz;
    doc["max_lipschitz_ratio"] = max_lip;
    doc["eg_at_m0_constant"] = eg0_const;
    write_text(fs::path(out_dir) / "scan.json", doc.dump(2) + "\n");
  }
  const bool ok = mono_q && mono_m && lipschitz && eg0_const;
  std::cout << "scan-eg: monotone_q=" << mono_q << " monotone_M=" << mono_m
            << " lipschitz=" << lipschitz << " eg0_const=" << eg0_const << "\n";
  return ok ? kExitOk : kExitCheckFailed;
}

int run_counterexample(const RunConfig& cfg, const std::string& out_dir) {
  const GridPtr grid = cfg.make_grid();
  const ModelParams p = cfg.make_model(grid);
  const ConvexityDefect cd = convexity_defect(grid, p);
  json doc;
  doc["config_hash"] = cfg.hash();
  doc["defect"] = cd.d;
  doc["closed_form"] = cd.closed_form;
  doc["gap"] = std::abs(cd.d - cd.closed_form);
  doc["negative"] = cd.d < 0.0;
  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "counterexample.json", doc.dump(2) + "\n");
  std::cout << "midpoint defect " << format_double(cd.d) << " (closed form "
            << format_double(cd.closed_form) << ")\n";
  return cd.d < 0.0 ? kExitOk : kExitCheckFailed;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stod(tok));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ground states, redistribution checks and the 2C/3C phase "
               "boundary of the reduced spin-1 condensate energy"};
  app.require_subcommand(1);

  std::string config_path, out_dir, state_path;
  std::vector<std::string> sets;
  std::string m_list, q_list = "0,0.5,1,2";
  long seed = -1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "flat key=value config file");
    cmd->add_option("--set", sets, "override, key=value (repeatable)");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "solver seed override");
  };

  CLI::App* solve = app.add_subcommand("solve", "full three-component ground state");
  CLI::App* solve2c = app.add_subcommand("solve2c", "two-component ground state");
  CLI::App* verify = app.add_subcommand("verify", "run the verifier suite on a state dump");
  CLI::App* curve = app.add_subcommand("curve", "2C/3C threshold brackets over M");
  CLI::App* scan = app.add_subcommand("scan-eg", "ground energy surface with checks");
  CLI::App* counter = app.add_subcommand("counterexample", "midpoint convexity defect");
  for (CLI::App* cmd : {solve, solve2c, verify, curve, scan, counter}) add_common(cmd);
  verify->add_option("--state", state_path, "state.csv to verify")->required();
  curve->add_option("--M", m_list, "comma-separated magnetizations")->required();
  scan->add_option("--M", m_list, "comma-separated magnetizations");
  scan->add_option("--q", q_list, "comma-separated Zeeman coefficients");

  CLI11_PARSE(app, argc, argv);

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& s : sets) cfg.set(s);
    if (seed >= 0) cfg.set("solver.seed", std::to_string(seed));
    if (out_dir.empty()) out_dir = cfg.get_string("output.dir");
    // touch every typed getter so bad values fail before any compute
    cfg.make_grid();
    cfg.make_constraints();
    cfg.make_solver_options();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (solve->parsed()) return run_solve(cfg, out_dir, false);
    if (solve2c->parsed()) return run_solve(cfg, out_dir, true);
    if (verify->parsed()) return run_verify(cfg, state_path, out_dir);
    if (curve->parsed()) {
      const auto Ms = parse_list(m_list);
      if (Ms.empty()) {
        std::cerr << "config error: empty M list\n";
        return kExitConfig;
      }
      return run_curve(cfg, Ms, out_dir);
    }
    if (scan->parsed()) {
      auto Ms = m_list.empty() ? std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}
                               : parse_list(m_list);
      auto qs = parse_list(q_list);
      if (Ms.empty() || qs.empty()) {
        std::cerr << "config error: empty scan lists\n";
        return kExitConfig;
      }
      return run_scan_eg(cfg, Ms, qs, out_dir);
    }
    if (counter->parsed()) return run_counterexample(cfg, out_dir);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConverge;
  }
  return kExitConfig;
}
