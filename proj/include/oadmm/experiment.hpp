#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oadmm/baselines.hpp"
#include "oadmm/toml_lite.hpp"

namespace oadmm {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// One [solver.<name>] table: a solver kind plus key overrides applied on top
/// of the experiment-level defaults.
struct SolverEntry {
  std::string name;
  std::string kind;  // oadmm | subgrad | spgm_ep | fixed_beta_admm
  toml::Table options;
};

struct ExperimentSpec {
  std::string dataset;       // dataset descriptor (data.hpp grammar)
  Eigen::Index r = 20;       // components
  double rho_dot = 50.0;     // regularization strength
  Eigen::Index k = 0;        // sparsity level; 0 = ceil(n r / 10) once n is known
  int budget = 2000;         // iteration budget per solver
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  bool deterministic = false;
  bool literal_centering = false;
  std::vector<SolverEntry> solvers;

  static ExperimentSpec from_toml(const toml::Document& doc);
  static ExperimentSpec from_file(const std::string& path);
};

struct RunOutput {
  std::string name;
  std::string kind;
  std::vector<IterationTrace> trace;
  std::optional<std::string> error;  // set when the solver failed
  double wall_time_s = 0.0;
};

/// Exact header: t,objective,crit,theta,primal_residual,beta,eta,backtracks,elapsed_s.
/// Absent fields serialize as empty, never as zero.
void write_trace_csv(const std::string& path, const std::vector<IterationTrace>& trace);

/// Per-solver summary (final/best objective, final crit, iterations, wall
/// time) plus a config echo, as a JSON string.
std::string emit_summary(const ExperimentSpec& spec, const std::vector<RunOutput>& outputs);

/// Runs every listed solver from a common random initialization, writing one
/// trace CSV per solver, summary.json, and plot_objective.csv into out_dir.
/// Returns 0 on success, 1 when any solver failed numerically, 2 on
/// configuration problems detected before any run. Honors OADMM_THREADS.
int run_experiment(const ExperimentSpec& spec);

/// Condensed invariant suite behind `oadmm check`; prints one line per group
/// and returns true when everything holds.
bool run_invariant_suite();

}  // namespace oadmm
