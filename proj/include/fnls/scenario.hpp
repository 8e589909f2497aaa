#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fnls/config.hpp"
#include "fnls/evolution.hpp"
#include "fnls/ground_state.hpp"
#include "fnls/model.hpp"

namespace fnls {

enum class SymmetryClass { SigmaN, Sigma };

std::string to_string(SymmetryClass c);
SymmetryClass parse_symmetry_class(const std::string& name);

/// Initial condition descriptor. Generated profiles are cylindrically
/// symmetric by construction.
struct InitialCondition {
  std::string kind = "gaussian";  ///< gaussian | ring | ground-state-multiple | from-file
  double amplitude = 1.0;
  double y_width = 1.0;
  double xN_width = 1.0;
  double ring_radius = 2.0;  ///< ring center in |y|
  double factor = 1.0;       ///< multiple of the ground state
  std::string file;          ///< snapshot path for from-file
};

struct ScenarioConfig {
  ModelParams params;
  std::vector<int> n;
  std::vector<double> L;
  InitialCondition init;
  double R = 5.0;
  EvolveController time;       ///< dt0, t_end, sample_interval, detection, budget
  int quadrature_nodes = 64;
  SymmetryClass symmetry = SymmetryClass::SigmaN;
  std::uint64_t seed = 0;

  /// Keys: params.{N,s,sigma}, grid.{n,L} (scalar or per-axis list),
  /// init.{kind,amplitude,y_width,xN_width,ring_radius,factor,file}, R,
  /// time.{dt0,t_end,sample_interval,adaptive,boundary_threshold,dealias,
  /// mass_drift_bound,dt_floor},
  /// quadrature.nodes, detection.{ratio,persistence}, symmetry_class, seed.
  static ScenarioConfig from_config(const Config& cfg);

  GridPtr make_grid_ptr() const;
  void validate() const;  ///< throws ConfigError
};

/// Materialize the initial condition; for ground-state-multiple the solve
/// result is also returned so the criteria check can reuse its thresholds.
Field make_initial(const ScenarioConfig& cfg, const GridPtr& grid,
                   std::optional<GroundStateResult>* gs_out = nullptr);

/// Hypothesis check against the three blow-up criteria.
struct CriterionVerdict {
  double s_c = 0.0;
  /// negative-energy | threshold-pair | mass-critical | sigma-class | none
  std::string branch = "none";
  std::string reason;  ///< set when branch is none or Q was required but absent
  double E0 = 0.0;
  double M0 = 0.0;
  double G0 = 0.0;  ///< ||(-Delta)^{s/2} u0||_2
  double symmetry_deviation = 0.0;
  std::optional<double> lhs_EM, rhs_EM;      ///< the (c1) pair
  std::optional<double> lhs_grad, rhs_grad;  ///< the (c2) pair
  bool supercritical_hypotheses = false;  ///< Sigma_N ranges: N>=3, 1/2<s<1, 0<s_c<=s, sigma<=s
  bool supercritical_satisfied = false;
  bool mass_critical_hypotheses = false;  ///< s_c = 0 within 1e-12 plus the same ranges
  bool mass_critical_satisfied = false;
  bool sigma_class_hypotheses = false;    ///< N>=4, 2s/(N-1) < sigma <= s
  bool sigma_class_satisfied = false;
};

/// Rejects data outside the declared symmetry class (deviation > 1e-8).
/// q supplies the ground-state thresholds; required only when the
/// supercritical branch must fall back to the (c1)/(c2) pair.
CriterionVerdict check_criteria(const Field& u0, const ModelParams& params,
                                SymmetryClass symmetry,
                                const GroundStateResult* q = nullptr);

/// Least-squares fit of log(G/G0) against log t over the trailing half of
/// the growth samples; ci is the 95% half-width of the exponent.
struct GrowthFit {
  bool valid = false;
  double exponent = 0.0;
  double ci = 0.0;
  double t_start = 0.0;  ///< start of the fitted window
  int points = 0;
};

GrowthFit fit_growth(const std::vector<double>& t, const std::vector<double>& ratio);

std::string status_string(RunStatus s);
int status_exit_code(RunStatus s);

struct RunArtifacts {
  RunStatus status = RunStatus::Completed;
  int exit_code = 0;
  CriterionVerdict verdict;
  GrowthFit fit;
  EvolveResult evolution;  ///< series and final state (empty when t_end = 0)
  std::string csv_path;
  std::string summary_path;
};

/// Full scenario: initial condition, criteria check, evolution with virial
/// columns sampled at every sample time, atomically written CSV series,
/// JSON summary, and initial/final snapshots under out_dir.
RunArtifacts run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

/// Sweep axes are config keys sweep.amplitude / sweep.sigma / sweep.s /
/// sweep.R holding comma-separated values. Cells run in a bounded worker
/// pool; each cell writes into its own subdirectory and a finished cell is
/// skipped on resume. The merged verdict table lands in out_dir/sweep.csv.
struct SweepResult {
  std::string table_path;
  int cells = 0;
  int failures = 0;
};

SweepResult sweep(const Config& cfg, const std::string& out_dir, int threads);

} // namespace fnls
