// Command-line laboratory for the focusing fractional NLS
//   i u_t = (-Delta)^s u - |u|^{2 sigma} u
// with cylindrically symmetric data: ground states, evolution with virial
// diagnostics, hypothesis checks, inequality verification, and sweeps.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fnls/config.hpp"
#include "fnls/cutoff.hpp"
#include "fnls/ground_state.hpp"
#include "fnls/inequalities.hpp"
#include "fnls/scenario.hpp"
#include "fnls/snapshot.hpp"
#include "fnls/spectral_ops.hpp"
#include "fnls/virial.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace fnls;

namespace {

constexpr const char* kOutEnv = "FNLS_OUT_DIR";

struct CommonArgs {
  std::string config;
  std::string out;
  int threads = 1;
  long seed = -1;  ///< -1: keep the config's seed
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
  auto* c = cmd->add_option("--config", args.config, "scenario config file");
  if (config_required) c->required();
  const char* env = std::getenv(kOutEnv);
  args.out = env ? env : ".";
  cmd->add_option("--out", args.out, "output directory (default $" + std::string(kOutEnv) + " or .)");
  cmd->add_option("--threads", args.threads, "worker threads (sweep cells)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", args.seed, "override the config seed");
}

Config load_config(const CommonArgs& args) {
  Config cfg = parse_config_file(args.config);
  if (args.seed >= 0) cfg.set("seed", std::to_string(args.seed));
  return cfg;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12e", x);
  return buf;
}

void write_text(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp);
    os << content;
  }
  fs::rename(tmp, path);
}

int cmd_ground_state(const CommonArgs& args) {
  Config cfg = load_config(args);
  ScenarioConfig sc = ScenarioConfig::from_config(cfg);
  GridPtr grid = sc.make_grid_ptr();
  GroundStateResult gs = petviashvili(sc.params, grid);
  fs::create_directories(args.out);

  write_snapshot((fs::path(args.out) / "Q.snap").string(), gs.Q, sc.params, 0.0);
  json j{{"residual", gs.residual},
         {"iterations", gs.iterations},
         {"mass", gs.mass_Q},
         {"energy", gs.energy_Q},
         {"grad_s_norm", gs.grad_s_Q},
         {"s_c", sc.params.s_c()}};
  if (gs.threshold_EM) j["threshold_EM"] = *gs.threshold_EM;
  if (gs.threshold_grad) j["threshold_grad"] = *gs.threshold_grad;
  write_text((fs::path(args.out) / "ground_state.json").string(), j.dump(2) + "\n");
  std::cout << "ground state: residual " << gs.residual << " after "
            << gs.iterations << " iterations; artifacts in " << args.out << "\n";
  return 0;
}

int cmd_evolve(const CommonArgs& args) {
  RunArtifacts art =
      run_scenario(ScenarioConfig::from_config(load_config(args)), args.out);
  std::cout << "status: " << status_string(art.status)
            << "  branch: " << art.verdict.branch;
  if (art.evolution.verdict.detected)
    std::cout << "  detected at t = " << art.evolution.verdict.t_detect << " ("
              << art.evolution.verdict.reason << ")";
  std::cout << "\nseries: " << art.csv_path << "\nsummary: " << art.summary_path
            << "\n";
  return art.exit_code;
}

int cmd_criteria(const CommonArgs& args) {
  Config cfg = load_config(args);
  cfg.set("time.t_end", "0");  // verdict only, no evolution
  RunArtifacts art = run_scenario(ScenarioConfig::from_config(cfg), args.out);
  const CriterionVerdict& v = art.verdict;
  std::cout << "s_c = " << v.s_c << "  E0 = " << v.E0 << "  M0 = " << v.M0
            << "  grad_s = " << v.G0 << "\nbranch: " << v.branch;
  if (!v.reason.empty()) std::cout << "  (" << v.reason << ")";
  std::cout << "\nsummary: " << art.summary_path << "\n";
  return 0;
}

int cmd_virial_check(const CommonArgs& args) {
  Config cfg = load_config(args);
  ScenarioConfig sc = ScenarioConfig::from_config(cfg);
  sc.validate();
  GridPtr grid = sc.make_grid_ptr();
  Field u0 = make_initial(sc, grid);

  // uniform snapshots of the trajectory, then the centered-difference check
  std::vector<std::pair<double, Field>> snaps;
  EvolveController ctl = sc.time;
  ctl.adaptive = false;  // uniform sampling is required by the check
  EvolveResult r = evolve(init_state(u0, sc.params), sc.params, ctl,
                          [&](const SimulationState& st) {
                            snaps.emplace_back(st.t, st.u);
                          });
  if (r.status == RunStatus::NumericalFailure || snaps.size() < 3) {
    std::cerr << "virial-check: trajectory unusable (" << status_string(r.status)
              << ", " << snaps.size() << " snapshots)\n";
    return status_exit_code(RunStatus::NumericalFailure);
  }

  const WeightKind kind =
      sc.symmetry == SymmetryClass::SigmaN ? WeightKind::Phi : WeightKind::Psi;
  static CutoffProfile profile;
  CylWeight w(profile, sc.params.dim, sc.R);
  WeightTables tables = build_weight_tables(w, *grid, kind);
  ResolventQuadrature quad(sc.params.s, sc.quadrature_nodes, 4.0);
  auto residuals = virial_residual(snaps, tables, quad, sc.params, kind, sc.R);

  std::ostringstream csv;
  csv << "t,dMdt_fd,rhs,residual,scale\n";
  double worst = 0.0;
  for (const auto& rs : residuals) {
    csv << fmt(rs.t) << ',' << fmt(rs.dMdt_fd) << ',' << fmt(rs.rhs) << ','
        << fmt(rs.residual) << ',' << fmt(rs.scale) << '\n';
    if (rs.scale > 0.0) worst = std::max(worst, std::abs(rs.residual) / rs.scale);
  }
  fs::create_directories(args.out);
  write_text((fs::path(args.out) / "virial.csv").string(), csv.str());
  json j{{"samples", residuals.size()},
         {"max_relative_residual", worst},
         {"weight", kind == WeightKind::Phi ? "phi_R" : "psi_R"},
         {"R", sc.R}};
  write_text((fs::path(args.out) / "virial.json").string(), j.dump(2) + "\n");
  std::cout << "virial identity: max relative residual " << worst << " over "
            << residuals.size() << " interior samples\n";
  return 0;
}

int cmd_verify(const CommonArgs& args) {
  Config cfg = load_config(args);
  ScenarioConfig sc = ScenarioConfig::from_config(cfg);
  const double s = sc.params.s;
  fs::create_directories(args.out);

  std::vector<RatioSample> rows;
  rows.push_back({"c1s", c1s_constant(s), c1s_closed_form(s),
                  c1s_constant(s) / c1s_closed_form(s)});

  // scale family of Gaussians for the Gagliardo-Nirenberg ratio (1D)
  const double p = 2.0 * sc.params.sigma + 2.0;
  for (double lam : {0.5, 1.0, 2.0, 4.0}) {
    auto g1 = make_grid(1, 1024, 40.0 / lam);
    Field f = sample(g1, [&](const std::vector<double>& x) {
      return std::exp(-lam * lam * x[0] * x[0]);
    });
    rows.push_back(gn_ratio(f, p, s, "gn_lambda_" + std::to_string(lam)));
  }

  // radial Sobolev ratios on ring profiles in the y-plane dimension
  if (sc.params.dim >= 3) {
    auto g2 = make_grid(sc.params.dim - 1, 64, 32.0);
    for (double r0 : {1.5, 2.5, 4.0}) {
      Field f = sample(g2, [&](const std::vector<double>& x) {
        double r2 = 0.0;
        for (double xi : x) r2 += xi * xi;
        const double d = std::sqrt(r2) - r0;
        return std::exp(-d * d);
      });
      rows.push_back(radial_sobolev_ratio(f, s, r0, "radial_r" + std::to_string(r0)));
    }
  }

  // pointwise fractional product identity on a fine 1D grid
  auto gf = make_grid(1, 8192, 64.0);
  Field uf = sample(gf, [](const std::vector<double>& x) {
    return std::exp(-x[0] * x[0]);
  });
  ProductIdentityCheck fid = product_identity_check(uf, s);
  rows.push_back({"product_identity_residual", fid.residual, fid.scale,
                  fid.scale > 0 ? fid.residual / fid.scale : 0.0});

  // exterior tail chain at R and 2R on the configured scenario field
  json chain_json;
  if (sc.params.dim >= 3) {
    GridPtr grid = sc.make_grid_ptr();
    Field u0 = make_initial(sc, grid);
    ChainRecord c1 = chain_ratios(u0, sc.params, sc.R);
    ChainRecord c2 = chain_ratios(u0, sc.params, 2.0 * sc.R);
    rows.push_back(c1.sup_link);
    rows.push_back(c1.interp_link);
    rows.push_back(c1.tail);
    chain_json = {{"R", sc.R},
                  {"tail_ratio_R", c1.tail.ratio},
                  {"tail_ratio_2R", c2.tail.ratio},
                  {"tail_integral_R", c1.tail_integral}};
  }

  std::ostringstream csv;
  csv << "family,lhs,rhs,ratio\n";
  for (const auto& r : rows)
    csv << r.family << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ','
        << fmt(r.ratio) << '\n';
  write_text((fs::path(args.out) / "ratios.csv").string(), csv.str());

  json j{{"s", s},
         {"c1s_agreement", std::abs(rows[0].ratio - 1.0)},
         {"product_identity_relative_residual", fid.scale > 0 ? fid.residual / fid.scale : 0.0},
         {"product_identity_selftest_error", fid.selftest_error}};
  if (!chain_json.is_null()) j["chain"] = chain_json;
  write_text((fs::path(args.out) / "verify.json").string(), j.dump(2) + "\n");
  std::cout << "inequality suite: " << rows.size() << " ratio samples in "
            << args.out << "/ratios.csv\n";
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  SweepResult res = sweep(load_config(args), args.out, args.threads);
  std::cout << "sweep: " << res.cells << " cells, " << res.failures
            << " failures; table " << res.table_path << "\n";
  return res.failures == 0 ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional NLS blow-up laboratory"};
  app.require_subcommand(1);

  CommonArgs args;
  int (*handler)(const CommonArgs&) = nullptr;
  auto reg = [&](const char* name, const char* desc, int (*fn)(const CommonArgs&)) {
    auto* cmd = app.add_subcommand(name, desc);
    add_common(cmd, args);
    cmd->callback([&handler, fn]() { handler = fn; });
  };
  reg("ground-state", "solve for the ground state Q and its thresholds", cmd_ground_state);
  reg("evolve", "run a scenario with virial diagnostics", cmd_evolve);
  reg("virial-check", "finite-difference check of the virial identity", cmd_virial_check);
  reg("verify", "functional inequality suite", cmd_verify);
  reg("criteria", "evaluate the blow-up criteria on the initial data", cmd_criteria);
  reg("sweep", "run a parameter sweep", cmd_sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 64;  // usage problems are config errors
  }

  try {
    return handler(args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 64;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 64;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
