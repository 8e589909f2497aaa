#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fnls/config.hpp"
#include "fnls/scenario.hpp"
#include "fnls/snapshot.hpp"
#include "fnls/spectral_ops.hpp"

using namespace fnls;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// double the amplitude until the energy goes negative
Field amplify_negative(Field u, const ModelParams& p) {
  for (int i = 0; i < 24 && energy(u, p) >= 0.0; ++i) u.v *= 2.0;
  REQUIRE(energy(u, p) < 0.0);
  return u;
}

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "fnls_harness" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// a small scenario that exercises the whole pipeline quickly
Config base_scenario() {
  return parse_config(R"(
params.N = 2
params.s = 0.7
params.sigma = 0.5
grid.n = 48
grid.L = 20
init.kind = gaussian
init.amplitude = 0.8
init.y_width = 1.0
init.xN_width = 1.0
R = 2.0
time.dt0 = 5e-3
time.t_end = 0.1
time.sample_interval = 0.05
time.boundary_threshold = 1e-3
quadrature.nodes = 32
seed = 7
)");
}

} // namespace

TEST_CASE("config parsing") {
  Config c = parse_config(
      "a.b = 1.5   # trailing comment\n"
      "\n"
      "# full-line comment\n"
      "name = gaussian\n"
      "flag = true\n"
      "list = 1, 2.5, -3\n"
      "a.b = 2.5\n");  // later key wins
  CHECK(c.get_double("a.b") == 2.5);
  CHECK(c.get("name") == "gaussian");
  CHECK(c.get_bool("flag", false));
  CHECK(c.get_bool("absent", true));
  auto l = c.get_list("list");
  REQUIRE(l.size() == 3);
  CHECK(l[1] == 2.5);
  CHECK(l[2] == -3.0);

  CHECK_THROWS_AS((void)c.get("missing"), ConfigError);
  CHECK_THROWS_AS((void)c.get_double("name"), ConfigError);
  CHECK_THROWS_AS((void)c.get_int("list"), ConfigError);
  CHECK_THROWS_AS(parse_config("no equals sign here"), ConfigError);
  CHECK_THROWS_AS(parse_config_file("/nonexistent/cfg"), ConfigError);
}

TEST_CASE("config get_int rejects fractional values") {
  Config c = parse_config("x = 2.5\ny = 42\n");
  CHECK(c.get_int("y") == 42);
  CHECK_THROWS_AS((void)c.get_int("x"), ConfigError);
}

TEST_CASE("snapshot round trip is bit exact") {
  auto dir = scratch_dir("snapshot");
  ModelParams p(2, 0.7, 0.5);
  auto g = make_grid({32, 48}, {20.0, 24.0});
  Field u = random_cylindrical(g, 11);
  const std::string path = (dir / "u.snap").string();
  write_snapshot(path, u, p, 1.25);

  Snapshot snap = read_snapshot(path);
  CHECK(snap.t == 1.25);
  CHECK(snap.params.dim == 2);
  CHECK(snap.params.s == 0.7);
  CHECK(snap.params.sigma == 0.5);
  CHECK(snap.u.grid->same_shape(*g));
  for (Eigen::Index i = 0; i < u.v.size(); ++i) CHECK(snap.u.v[i] == u.v[i]);

  // corrupted inputs are rejected
  {
    std::ofstream os(dir / "bad.snap", std::ios::binary);
    os << "NOPE" << std::string(64, '\0');
  }
  CHECK_THROWS(read_snapshot((dir / "bad.snap").string()));
  {
    std::string whole = slurp(path);
    std::ofstream os(dir / "trunc.snap", std::ios::binary);
    os << whole.substr(0, whole.size() / 2);
  }
  CHECK_THROWS(read_snapshot((dir / "trunc.snap").string()));
}

TEST_CASE("scenario config validation") {
  Config c = base_scenario();
  ScenarioConfig sc = ScenarioConfig::from_config(c);
  CHECK_NOTHROW(sc.validate());
  CHECK(sc.n == std::vector<int>{48, 48});
  CHECK(sc.L == std::vector<double>{20.0, 20.0});

  SUBCASE("cutoff radius must fit the y-box") {
    Config bad = base_scenario();
    bad.set("R", "6.0");  // >= L_y/4 = 5
    CHECK_THROWS_AS(ScenarioConfig::from_config(bad).validate(), ConfigError);
  }
  SUBCASE("unknown init kind") {
    Config bad = base_scenario();
    bad.set("init.kind", "vortex");
    CHECK_THROWS_AS(ScenarioConfig::from_config(bad).validate(), ConfigError);
  }
  SUBCASE("missing required key") {
    Config bad = base_scenario();
    Config stripped;
    for (const auto& [k, v] : bad.items())
      if (k != "R") stripped.set(k, v);
    CHECK_THROWS_AS(ScenarioConfig::from_config(stripped), ConfigError);
  }
  SUBCASE("per-axis grid lists") {
    Config c2 = base_scenario();
    c2.set("grid.n", "32, 48");
    c2.set("grid.L", "20, 24");
    ScenarioConfig sc2 = ScenarioConfig::from_config(c2);
    CHECK(sc2.n == std::vector<int>{32, 48});
    c2.set("grid.n", "32, 48, 64");  // arity mismatch
    CHECK_THROWS_AS(ScenarioConfig::from_config(c2), ConfigError);
  }
  SUBCASE("bad symmetry class name") {
    Config bad = base_scenario();
    bad.set("symmetry_class", "radial");
    CHECK_THROWS_AS(ScenarioConfig::from_config(bad), ConfigError);
  }
}

TEST_CASE("criteria: mass-critical branch at sigma = 2s/N") {
  ModelParams p(3, 0.75, 0.5);  // sigma = 2s/N exactly
  REQUIRE(p.mass_critical());
  auto g = make_grid(3, 24, 16.0);

  Field lo = sample(g, [](const std::vector<double>& x) {
    return 0.3 * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
  });
  CriterionVerdict v = check_criteria(lo, p, SymmetryClass::SigmaN);
  CHECK(v.s_c == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(v.mass_critical_hypotheses);
  CHECK(v.branch == "none");  // E > 0 for small data
  CHECK(!v.reason.empty());

  Field hi = amplify_negative(lo, p);
  CriterionVerdict vh = check_criteria(hi, p, SymmetryClass::SigmaN);
  REQUIRE(vh.E0 < 0.0);
  CHECK(vh.branch == "mass-critical");
  CHECK(vh.mass_critical_satisfied);
}

TEST_CASE("criteria: negative-energy supercritical branch") {
  ModelParams p(3, 0.7, 0.6);
  REQUIRE(p.s_c() > 0.0);
  auto g = make_grid(3, 24, 16.0);
  Field u = amplify_negative(sample(g, [](const std::vector<double>& x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
  }), p);

  CriterionVerdict v = check_criteria(u, p, SymmetryClass::SigmaN);
  CHECK(v.supercritical_hypotheses);
  CHECK(v.branch == "negative-energy");

  // the Sigma_N criteria are unavailable under the weaker declaration
  CriterionVerdict vs = check_criteria(u, p, SymmetryClass::Sigma);
  CHECK(vs.branch == "none");
}

TEST_CASE("criteria: threshold pair evaluated from the ground-state run") {
  ModelParams p(3, 0.7, 0.6);
  auto g = make_grid(3, 32, 24.0);
  PetviashviliOptions opts;
  opts.tol_residual = 1e-5;  // h = 0.75 discretization floor
  GroundStateResult gs = petviashvili(p, g, nullptr, opts);

  Field u = gs.Q;
  u.v *= 1.1;
  CriterionVerdict v = check_criteria(u, p, SymmetryClass::SigmaN, &gs);
  REQUIRE(v.lhs_grad.has_value());
  REQUIRE(v.rhs_grad.has_value());
  CHECK(*v.lhs_grad > *v.rhs_grad);  // (c2) holds for amplified Q
  CHECK((v.branch == "negative-energy" || v.branch == "threshold-pair"));

  // E >= 0 without Q: rejected with an instruction, not silently unsatisfied
  Field small = gs.Q;
  small.v *= 0.05;
  REQUIRE(energy(small, p) >= 0.0);
  CriterionVerdict vm = check_criteria(small, p, SymmetryClass::SigmaN, nullptr);
  CHECK(vm.branch == "none");
  CHECK(vm.reason.find("ground-state") != std::string::npos);
}

TEST_CASE("criteria: sigma-class branch for Sigma data in N = 4") {
  ModelParams p(4, 0.75, 0.55);  // 2s/(N-1) = 0.5 < sigma <= s
  auto g = make_grid(4, 12, 12.0);
  Field u = amplify_negative(sample(g, [](const std::vector<double>& x) {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    return std::exp(-r2);
  }), p);
  CriterionVerdict v = check_criteria(u, p, SymmetryClass::Sigma);
  CHECK(v.sigma_class_hypotheses);
  CHECK(v.branch == "sigma-class");
}

TEST_CASE("criteria: asymmetric data is rejected") {
  ModelParams p(3, 0.7, 0.6);
  auto g = make_grid(3, 16, 12.0);
  Field u = sample(g, [](const std::vector<double>& x) {
    return std::exp(-(x[0] - 1.0) * (x[0] - 1.0) - x[1] * x[1] - x[2] * x[2]);
  });
  CHECK_THROWS(check_criteria(u, p, SymmetryClass::SigmaN));
}

TEST_CASE("growth fit recovers a power law") {
  std::vector<double> t, ratio;
  for (int i = 1; i <= 40; ++i) {
    t.push_back(0.05 * i);
    ratio.push_back(std::pow(0.05 * i, 1.5));
  }
  GrowthFit fit = fit_growth(t, ratio);
  REQUIRE(fit.valid);
  CHECK(fit.exponent == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(fit.ci < 1e-8);
  CHECK(fit.points == 20);

  GrowthFit none = fit_growth({0.1, 0.2}, {1.0, 1.0});
  CHECK(!none.valid);
}

TEST_CASE("run_scenario with t_end = 0: summary only") {
  auto dir = scratch_dir("criteria_only");
  Config c = base_scenario();
  c.set("time.t_end", "0");
  RunArtifacts art = run_scenario(ScenarioConfig::from_config(c), dir.string());
  CHECK(art.exit_code == 0);
  CHECK(art.evolution.series.empty());
  CHECK(fs::exists(dir / "initial.snap"));
  CHECK(!fs::exists(dir / "final.snap"));

  const std::string csv = slurp(art.csv_path);
  CHECK(csv ==
        "t,mass,energy,grad_s_norm,M_phiR,M_psiR,dMdt_fd,rhs_m1_total,"
        "rhs_kinetic,rhs_bilap,rhs_nonlinear,boundary_mass\n");
  const std::string summary = slurp(art.summary_path);
  CHECK(summary.find("\"status\": \"completed\"") != std::string::npos);
  CHECK(summary.find("\"s_c\"") != std::string::npos);
}

TEST_CASE("run_scenario produces the full artifact bundle") {
  auto dir = scratch_dir("full_run");
  RunArtifacts art =
      run_scenario(ScenarioConfig::from_config(base_scenario()), dir.string());
  CHECK(art.status == RunStatus::Completed);
  CHECK(art.evolution.series.size() == 3);
  CHECK(fs::exists(dir / "final.snap"));

  // row arithmetic: 3 samples, centered difference defined only in the middle
  std::ifstream is(art.csv_path);
  std::string line;
  std::getline(is, line);  // header
  int rows = 0, nan_rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    if (line.find("nan") != std::string::npos) ++nan_rows;
  }
  CHECK(rows == 3);
  CHECK(nan_rows == 2);

  Snapshot fin = read_snapshot((dir / "final.snap").string());
  CHECK(fin.t == doctest::Approx(0.1));
}

TEST_CASE("determinism: same config and seed give byte-identical CSV") {
  auto d1 = scratch_dir("det_a");
  auto d2 = scratch_dir("det_b");
  ScenarioConfig sc = ScenarioConfig::from_config(base_scenario());
  run_scenario(sc, d1.string());
  run_scenario(sc, d2.string());
  CHECK(slurp((d1 / "series.csv").string()) == slurp((d2 / "series.csv").string()));
}

TEST_CASE("sweep: single cell matches run_scenario, resume is idempotent") {
  Config c = base_scenario();
  c.set("sweep.amplitude", "0.8");

  auto sdir = scratch_dir("sweep_single");
  SweepResult res = sweep(c, sdir.string(), 1);
  CHECK(res.cells == 1);
  CHECK(res.failures == 0);

  auto rdir = scratch_dir("sweep_ref");
  run_scenario(ScenarioConfig::from_config(base_scenario()), rdir.string());
  CHECK(slurp((sdir / "cell_0000" / "series.csv").string()) ==
        slurp((rdir / "series.csv").string()));

  // a second pass skips every finished cell and reproduces the table
  const std::string table = slurp(res.table_path);
  SweepResult res2 = sweep(c, sdir.string(), 1);
  CHECK(slurp(res2.table_path) == table);
}

TEST_CASE("sweep: amplitude axis flips the verdict across E = 0") {
  Config c = base_scenario();
  c.set("params.N", "3");
  c.set("params.s", "0.7");
  c.set("params.sigma", "0.6");
  c.set("grid.n", "16");
  c.set("grid.L", "12");
  c.set("time.t_end", "0");
  c.set("sweep.amplitude", "0.2, 12.0");

  auto dir = scratch_dir("sweep_flip");
  SweepResult res = sweep(c, dir.string(), 2);
  CHECK(res.cells == 2);
  CHECK(res.failures == 0);

  std::ifstream is(res.table_path);
  std::string header, row0, row1;
  std::getline(is, header);
  std::getline(is, row0);
  std::getline(is, row1);
  CHECK(row0.find("none") != std::string::npos);
  CHECK(row1.find("negative-energy") != std::string::npos);

  // partial results: wiping one cell and resuming restores the same table
  const std::string table = slurp(res.table_path);
  fs::remove_all(dir / "cell_0001");
  SweepResult res3 = sweep(c, dir.string(), 1);
  CHECK(slurp(res3.table_path) == table);
}

TEST_CASE("sweep rejects empty or oversized axis products") {
  Config c = base_scenario();
  auto dir = scratch_dir("sweep_bad");
  CHECK_THROWS_AS(sweep(c, dir.string(), 1), ConfigError);
}
