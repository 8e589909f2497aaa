#include "fnls/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fnls/cutoff.hpp"
#include "fnls/snapshot.hpp"
#include "fnls/spectral_ops.hpp"
#include "fnls/virial.hpp"

namespace fnls {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const CutoffProfile& cutoff_profile() {
  static CutoffProfile p;
  return p;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12e", x);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp);
    os << content;
    if (!os) throw std::runtime_error("write failed for " + tmp);
  }
  fs::rename(tmp, path);
}

} // namespace

std::string to_string(SymmetryClass c) {
  return c == SymmetryClass::SigmaN ? "Sigma_N" : "Sigma";
}

SymmetryClass parse_symmetry_class(const std::string& name) {
  if (name == "Sigma_N") return SymmetryClass::SigmaN;
  if (name == "Sigma") return SymmetryClass::Sigma;
  throw ConfigError("symmetry_class must be Sigma_N or Sigma, got '" + name + "'");
}

ScenarioConfig ScenarioConfig::from_config(const Config& cfg) {
  ScenarioConfig sc;
  const int N = cfg.get_int("params.N");
  try {
    sc.params = ModelParams(N, cfg.get_double("params.s"), cfg.get_double("params.sigma"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  auto per_axis = [&](const std::string& key, auto cast) {
    std::vector<decltype(cast(0.0))> out;
    for (double v : cfg.get_list(key)) out.push_back(cast(v));
    if (out.size() == 1) out.assign(static_cast<std::size_t>(N), out[0]);
    if (static_cast<int>(out.size()) != N)
      throw ConfigError("config: '" + key + "' must have 1 or N entries");
    return out;
  };
  sc.n = per_axis("grid.n", [](double v) { return static_cast<int>(v); });
  sc.L = per_axis("grid.L", [](double v) { return v; });

  sc.init.kind = cfg.get("init.kind", "gaussian");
  sc.init.amplitude = cfg.get_double("init.amplitude", 1.0);
  sc.init.y_width = cfg.get_double("init.y_width", 1.0);
  sc.init.xN_width = cfg.get_double("init.xN_width", 1.0);
  sc.init.ring_radius = cfg.get_double("init.ring_radius", 2.0);
  sc.init.factor = cfg.get_double("init.factor", 1.0);
  sc.init.file = cfg.get("init.file", "");

  sc.R = cfg.get_double("R");
  sc.time.dt0 = cfg.get_double("time.dt0", 1e-3);
  sc.time.t_end = cfg.get_double("time.t_end");
  sc.time.sample_interval = cfg.get_double("time.sample_interval", 1e-2);
  sc.time.adaptive = cfg.get_bool("time.adaptive", true);
  sc.time.boundary_threshold = cfg.get_double("time.boundary_threshold", 1e-8);
  sc.time.do_dealias = cfg.get_bool("time.dealias", true);
  sc.time.mass_drift_bound = cfg.get_double("time.mass_drift_bound", 1e-6);
  sc.time.dt_floor = cfg.get_double("time.dt_floor", 1e-12);
  sc.time.detect_ratio = cfg.get_double("detection.ratio", 50.0);
  sc.time.detect_persistence = cfg.get_int("detection.persistence", 10);
  sc.quadrature_nodes = cfg.get_int("quadrature.nodes", 64);
  sc.symmetry = parse_symmetry_class(cfg.get("symmetry_class", "Sigma_N"));
  sc.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
  return sc;
}

GridPtr ScenarioConfig::make_grid_ptr() const { return make_grid(n, L); }

void ScenarioConfig::validate() const {
  if (static_cast<int>(n.size()) != params.dim || n.size() != L.size())
    throw ConfigError("config: grid shape does not match the dimension");
  // the cutoff transition must not wrap around the y-box
  const std::size_t ny = L.size() > 1 ? L.size() - 1 : 1;
  double min_Ly = L[0];
  for (std::size_t a = 0; a < ny; ++a) min_Ly = std::min(min_Ly, L[a]);
  if (!(R > 0.0) || R >= min_Ly / 4.0)
    throw ConfigError("config: need 0 < R < min(L_y)/4 for the cutoff to fit");
  if (!(time.t_end >= 0.0)) throw ConfigError("config: time.t_end must be >= 0");
  if (!(time.dt0 > 0.0)) throw ConfigError("config: time.dt0 must be > 0");
  if (time.t_end > 0.0 && !(time.sample_interval > 0.0))
    throw ConfigError("config: time.sample_interval must be > 0");
  if (quadrature_nodes < 4) throw ConfigError("config: quadrature.nodes too small");
  static const char* kinds[] = {"gaussian", "ring", "ground-state-multiple", "from-file"};
  if (std::find(std::begin(kinds), std::end(kinds), init.kind) == std::end(kinds))
    throw ConfigError("config: unknown init.kind '" + init.kind + "'");
  if (init.kind == "from-file" && !fs::exists(init.file))
    throw ConfigError("config: init.file does not exist: " + init.file);
}

Field make_initial(const ScenarioConfig& cfg, const GridPtr& grid,
                   std::optional<GroundStateResult>* gs_out) {
  const int N = cfg.params.dim;
  if (cfg.init.kind == "gaussian" || cfg.init.kind == "ring") {
    const double A = cfg.init.amplitude;
    const double wy = cfg.init.y_width, wN = cfg.init.xN_width;
    const double r0 = cfg.init.kind == "ring" ? cfg.init.ring_radius : 0.0;
    return sample(grid, [&](const std::vector<double>& x) {
      double r2y = 0.0;
      for (int a = 0; a + 1 < N; ++a) r2y += x[a] * x[a];
      const double ry = std::sqrt(r2y) - r0;
      const double xN = x[N - 1];
      return A * std::exp(-ry * ry / (2.0 * wy * wy) - xN * xN / (2.0 * wN * wN));
    });
  }
  if (cfg.init.kind == "ground-state-multiple") {
    GroundStateResult gs = petviashvili(cfg.params, grid);
    Field u = gs.Q;
    u.v *= cfg.init.factor;
    if (gs_out) *gs_out = std::move(gs);
    return u;
  }
  if (cfg.init.kind == "from-file") {
    Snapshot snap = read_snapshot(cfg.init.file);
    if (!snap.u.grid->same_shape(*grid))
      throw ConfigError("config: snapshot grid does not match grid.n/grid.L");
    if (snap.params.dim != cfg.params.dim || snap.params.s != cfg.params.s ||
        snap.params.sigma != cfg.params.sigma)
      throw ConfigError("config: snapshot params disagree with params.*");
    return std::move(snap.u);
  }
  throw ConfigError("config: unknown init.kind '" + cfg.init.kind + "'");
}

CriterionVerdict check_criteria(const Field& u0, const ModelParams& params,
                                SymmetryClass symmetry, const GroundStateResult* q) {
  CriterionVerdict v;
  v.symmetry_deviation = cyl_symmetry_deviation(u0);
  const double scale = std::max(1.0, u0.v.abs().maxCoeff());
  if (v.symmetry_deviation > 1e-8 * scale)
    throw std::invalid_argument(
        "check_criteria: data violates cylindrical symmetry (deviation " +
        std::to_string(v.symmetry_deviation) + ")");

  v.s_c = params.s_c();
  v.E0 = energy(u0, params);
  v.M0 = mass(u0);
  v.G0 = sobolev_seminorm(u0, params.s);

  const bool base_ranges =
      params.dim >= 3 && params.s > 0.5 && params.s < 1.0 && params.sigma <= params.s;
  v.supercritical_hypotheses = base_ranges && v.s_c > 0.0 && v.s_c <= params.s + 1e-12;
  v.mass_critical_hypotheses = base_ranges && std::abs(v.s_c) <= 1e-12;
  v.sigma_class_hypotheses = params.dim >= 4 && params.s > 0.5 && params.s < 1.0 &&
                             params.sigma > 2.0 * params.s / (params.dim - 1) &&
                             params.sigma <= params.s && v.s_c > 0.0 &&
                             v.s_c <= params.s + 1e-12;

  std::string threshold_note;
  if (v.supercritical_hypotheses) {
    if (v.E0 < 0.0) {
      v.supercritical_satisfied = true;
    } else if (q == nullptr) {
      threshold_note =
          "E[u0] >= 0: the threshold pair (c1)/(c2) needs ground-state data; "
          "rerun with a Q solve";
    } else {
      ThresholdRecord rec = thresholds(*q, params);
      v.rhs_EM = rec.rhs_EM;
      v.rhs_grad = rec.rhs_grad;
      v.lhs_EM = rec.rhs_EM ? std::optional<double>(rec.lhs_EM(v.E0, v.M0)) : std::nullopt;
      v.lhs_grad = std::optional<double>(rec.lhs_grad(v.G0, v.M0));
      v.supercritical_satisfied =
          rec.c1_satisfied(v.E0, v.M0) && rec.c2_satisfied(v.G0, v.M0);
      if (!v.supercritical_satisfied) threshold_note = "threshold pair (c1)/(c2) fails";
    }
  }
  v.mass_critical_satisfied = v.mass_critical_hypotheses && v.E0 < 0.0;
  // Sigma_N data sits inside Sigma, so both declarations qualify here
  v.sigma_class_satisfied = v.sigma_class_hypotheses && v.E0 < 0.0;

  // designate one branch, honoring the declared symmetry class
  if (symmetry == SymmetryClass::SigmaN && v.mass_critical_satisfied) {
    v.branch = "mass-critical";
  } else if (symmetry == SymmetryClass::SigmaN && v.supercritical_satisfied) {
    v.branch = v.E0 < 0.0 ? "negative-energy" : "threshold-pair";
  } else if (v.sigma_class_satisfied) {
    v.branch = "sigma-class";
  } else {
    v.branch = "none";
    std::ostringstream why;
    if (!threshold_note.empty()) {
      why << threshold_note;
    } else if (v.mass_critical_hypotheses && v.E0 >= 0.0) {
      why << "mass-critical ranges hold but E[u0] >= 0";
    } else if ((v.supercritical_hypotheses || v.sigma_class_hypotheses) && v.E0 >= 0.0) {
      why << "parameter ranges hold but E[u0] >= 0";
    } else {
      why << "parameters outside every criterion range (s_c = " << v.s_c << ")";
    }
    if (symmetry == SymmetryClass::Sigma &&
        (v.supercritical_hypotheses || v.mass_critical_hypotheses) &&
        !v.sigma_class_hypotheses)
      why << "; the Sigma_N criteria need the declared class Sigma_N";
    v.reason = why.str();
  }
  return v;
}

GrowthFit fit_growth(const std::vector<double>& t, const std::vector<double>& ratio) {
  GrowthFit fit;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size() && i < ratio.size(); ++i)
    if (t[i] > 0.0 && ratio[i] > 0.0) {
      x.push_back(std::log(t[i]));
      y.push_back(std::log(ratio[i]));
    }
  // trailing half of the usable samples; the transient sits in the front
  const std::size_t start = x.size() / 2;
  const std::size_t m = x.size() - start;
  if (m < 3) return fit;

  double sx = 0, sy = 0;
  for (std::size_t i = start; i < x.size(); ++i) sx += x[i], sy += y[i];
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = start; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) return fit;
  const double slope = sxy / sxx;
  double sse = 0;
  for (std::size_t i = start; i < x.size(); ++i) {
    const double r = y[i] - my - slope * (x[i] - mx);
    sse += r * r;
  }
  fit.valid = true;
  fit.exponent = slope;
  fit.ci = m > 3 ? 2.0 * std::sqrt(sse / (m - 2) / sxx) : 0.0;
  fit.t_start = std::exp(x[start]);
  fit.points = static_cast<int>(m);
  return fit;
}

std::string status_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::BlowupDetected: return "blowup-detected";
    case RunStatus::DomainBreach: return "domain-breach";
    case RunStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

int status_exit_code(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return 0;
    case RunStatus::BlowupDetected: return 2;
    case RunStatus::DomainBreach: return 3;
    case RunStatus::NumericalFailure: return 4;
  }
  return 4;
}

namespace {

struct VirialRow {
  double M_phiR, M_psiR;
  VirialReport rep;  ///< rhs of the identity for the declared symmetry class
};

json verdict_json(const CriterionVerdict& v) {
  json j{{"s_c", v.s_c},
         {"branch", v.branch},
         {"E0", v.E0},
         {"M0", v.M0},
         {"grad_s_norm0", v.G0},
         {"symmetry_deviation", v.symmetry_deviation},
         {"supercritical_hypotheses", v.supercritical_hypotheses},
         {"supercritical_satisfied", v.supercritical_satisfied},
         {"mass_critical_hypotheses", v.mass_critical_hypotheses},
         {"mass_critical_satisfied", v.mass_critical_satisfied},
         {"sigma_class_hypotheses", v.sigma_class_hypotheses},
         {"sigma_class_satisfied", v.sigma_class_satisfied}};
  if (!v.reason.empty()) j["reason"] = v.reason;
  auto opt = [&](const char* key, const std::optional<double>& x) {
    if (x) j[key] = *x;
  };
  opt("lhs_EM", v.lhs_EM);
  opt("rhs_EM", v.rhs_EM);
  opt("lhs_grad", v.lhs_grad);
  opt("rhs_grad", v.rhs_grad);
  return j;
}

} // namespace

RunArtifacts run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  fs::create_directories(out_dir);

  GridPtr grid = cfg.make_grid_ptr();
  std::optional<GroundStateResult> gs;
  Field u0 = make_initial(cfg, grid, &gs);
  write_snapshot((fs::path(out_dir) / "initial.snap").string(), u0, cfg.params, 0.0);

  RunArtifacts art;
  std::string gs_error;
  {
    // a ground-state solve backs the threshold branch when E >= 0; a failed
    // solve leaves the pair unevaluated and is reported, not fatal
    CriterionVerdict probe = check_criteria(u0, cfg.params, cfg.symmetry, nullptr);
    if (!gs && probe.supercritical_hypotheses && probe.E0 >= 0.0) {
      try {
        gs = petviashvili(cfg.params, grid);
      } catch (const std::exception& e) {
        gs_error = e.what();
      }
    }
    art.verdict = check_criteria(u0, cfg.params, cfg.symmetry, gs ? &*gs : nullptr);
  }

  const WeightKind kind =
      cfg.symmetry == SymmetryClass::SigmaN ? WeightKind::Phi : WeightKind::Psi;
  CylWeight weight(cutoff_profile(), cfg.params.dim, cfg.R);
  WeightTables tphi = build_weight_tables(weight, *grid, WeightKind::Phi);
  WeightTables tpsi = build_weight_tables(weight, *grid, WeightKind::Psi);
  ResolventQuadrature quad(cfg.params.s, cfg.quadrature_nodes, 4.0);

  std::vector<VirialRow> vrows;
  auto sampler = [&](const SimulationState& st) {
    VirialRow row;
    row.M_phiR = virial_phi(st.u, tphi);
    row.M_psiR = virial_psi(st.u, tpsi);
    row.rep = virial_rhs(st.u, kind == WeightKind::Phi ? tphi : tpsi, quad,
                         cfg.params, kind, cfg.R);
    vrows.push_back(row);
  };

  if (cfg.time.t_end > 0.0) {
    art.evolution = evolve(init_state(u0, cfg.params), cfg.params, cfg.time, sampler);
    art.status = art.evolution.status;
    write_snapshot((fs::path(out_dir) / "final.snap").string(),
                   art.evolution.state.u, cfg.params, art.evolution.state.t);
    art.fit = fit_growth(art.evolution.verdict.growth_t,
                         art.evolution.verdict.growth_ratio);
  } else {
    art.evolution.state = init_state(u0, cfg.params);
  }
  art.exit_code = status_exit_code(art.status);

  // CSV series; dMdt_fd differences the M column of the declared weight
  // centered over the sample spacing (blank-free: nan at the two ends)
  std::ostringstream csv;
  csv << "t,mass,energy,grad_s_norm,M_phiR,M_psiR,dMdt_fd,rhs_m1_total,"
         "rhs_kinetic,rhs_bilap,rhs_nonlinear,boundary_mass\n";
  const auto& series = art.evolution.series;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const TimeSample& s = series[i];
    const VirialRow& w = vrows.at(i);
    double dMdt = std::nan("");
    if (i > 0 && i + 1 < series.size()) {
      const double Mp = kind == WeightKind::Phi ? vrows[i + 1].M_phiR : vrows[i + 1].M_psiR;
      const double Mm = kind == WeightKind::Phi ? vrows[i - 1].M_phiR : vrows[i - 1].M_psiR;
      dMdt = (Mp - Mm) / (series[i + 1].t - series[i - 1].t);
    }
    csv << fmt(s.t) << ',' << fmt(s.massv) << ',' << fmt(s.energyv) << ','
        << fmt(s.grad_s) << ',' << fmt(w.M_phiR) << ',' << fmt(w.M_psiR) << ','
        << fmt(dMdt) << ',' << fmt(w.rep.rhs_total) << ',' << fmt(w.rep.kinetic)
        << ',' << fmt(w.rep.bilap) << ',' << fmt(w.rep.nonlinear) << ','
        << fmt(s.boundary) << '\n';
  }
  art.csv_path = (fs::path(out_dir) / "series.csv").string();
  write_atomic(art.csv_path, csv.str());

  json summary;
  summary["params"] = {{"N", cfg.params.dim}, {"s", cfg.params.s},
                       {"sigma", cfg.params.sigma}};
  summary["s_c"] = cfg.params.s_c();
  summary["R"] = cfg.R;
  summary["symmetry_class"] = to_string(cfg.symmetry);
  summary["seed"] = cfg.seed;
  summary["criteria"] = verdict_json(art.verdict);
  summary["status"] = status_string(art.status);
  const BlowupVerdict& bv = art.evolution.verdict;
  summary["detection"] = {{"detected", bv.detected},
                          {"t_detect", bv.t_detect},
                          {"reason", bv.reason}};
  summary["growth_fit"] = {{"valid", art.fit.valid},
                           {"exponent", art.fit.exponent},
                           {"ci", art.fit.ci},
                           {"t_start", art.fit.t_start},
                           {"points", art.fit.points}};
  const SimulationState& st0 = art.evolution.state;
  summary["initial"] = {{"mass", st0.mass0}, {"energy", st0.energy0},
                        {"grad_s_norm", st0.grad0}};
  if (!gs_error.empty()) summary["ground_state_error"] = gs_error;
  if (gs) {
    summary["ground_state"] = {{"residual", gs->residual},
                               {"iterations", gs->iterations},
                               {"mass", gs->mass_Q},
                               {"energy", gs->energy_Q},
                               {"grad_s_norm", gs->grad_s_Q}};
  }
  art.summary_path = (fs::path(out_dir) / "summary.json").string();
  write_atomic(art.summary_path, summary.dump(2) + "\n");
  return art;
}

SweepResult sweep(const Config& cfg, const std::string& out_dir, int threads) {
  struct Axis {
    std::string sweep_key;   // key in the sweep.* namespace
    std::string target_key;  // scenario key the values override
    std::vector<double> values;
  };
  static const std::pair<const char*, const char*> known[] = {
      {"sweep.amplitude", "init.amplitude"},
      {"sweep.sigma", "params.sigma"},
      {"sweep.s", "params.s"},
      {"sweep.R", "R"}};
  std::vector<Axis> axes;
  std::size_t cells = 1;
  for (const auto& [skey, tkey] : known)
    if (cfg.has(skey)) {
      axes.push_back({skey, tkey, cfg.get_list(skey)});
      cells *= axes.back().values.size();
    }
  if (axes.empty()) throw ConfigError("sweep: no sweep.* axes configured");
  if (cells > 4096) throw ConfigError("sweep: product size exceeds 4096 cells");

  fs::create_directories(out_dir);

  struct Cell {
    std::size_t index;
    std::vector<double> values;  // one per axis
    std::string dir;
    bool failed = false;
    std::string error;
  };
  std::vector<Cell> grid_cells(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    Cell& cell = grid_cells[c];
    cell.index = c;
    std::size_t rem = c;
    for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
      cell.values.insert(cell.values.begin(), it->values[rem % it->values.size()]);
      rem /= it->values.size();
    }
    char name[32];
    std::snprintf(name, sizeof(name), "cell_%04zu", c);
    cell.dir = (fs::path(out_dir) / name).string();
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= cells) return;
      Cell& cell = grid_cells[c];
      if (fs::exists(fs::path(cell.dir) / "summary.json")) continue;  // resume
      try {
        Config local = cfg;
        for (std::size_t a = 0; a < axes.size(); ++a)
          local.set(axes[a].target_key, fmt(cell.values[a]));
        run_scenario(ScenarioConfig::from_config(local), cell.dir);
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.error = e.what();
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(cells)));
  std::vector<std::thread> pool;
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  // single-threaded merge of the per-cell summaries
  std::ostringstream table;
  table << "cell";
  for (const auto& ax : axes) table << ',' << ax.target_key;
  table << ",status,branch,detected,t_detect,E0,growth_exponent\n";
  SweepResult result;
  result.cells = static_cast<int>(cells);
  for (const Cell& cell : grid_cells) {
    table << cell.index;
    for (double v : cell.values) table << ',' << fmt(v);
    if (cell.failed) {
      ++result.failures;
      std::string msg = cell.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      table << ",cell-error," << msg << ",,,,\n";
      continue;
    }
    std::ifstream is(fs::path(cell.dir) / "summary.json");
    if (!is) {
      ++result.failures;
      table << ",cell-error,missing summary,,,,\n";
      continue;
    }
    json j = json::parse(is);
    table << ',' << j["status"].get<std::string>() << ','
          << j["criteria"]["branch"].get<std::string>() << ','
          << (j["detection"]["detected"].get<bool>() ? 1 : 0) << ','
          << fmt(j["detection"]["t_detect"].get<double>()) << ','
          << fmt(j["criteria"]["E0"].get<double>()) << ','
          << fmt(j["growth_fit"]["exponent"].get<double>()) << '\n';
  }
  result.table_path = (fs::path(out_dir) / "sweep.csv").string();
  write_atomic(result.table_path, table.str());
  return result;
}

} // namespace fnls
