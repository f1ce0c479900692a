#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "oadmm/diagnostics.hpp"
#include "oadmm/problem.hpp"

namespace oadmm {

enum class Variant { EuclideanProjection, RiemannianRetraction };
enum class BbMode { Fixed, Bb1, Bb2 };

/// All hyperparameters of the penalty-continuation ADMM. Defaults follow the
/// recommended settings: p = 1/3, theta = 1.01, sigma = 1.1, rho = 1,
/// gamma = 1/2, delta = 1e-3, xi = 1, alpha just inside its admissible
/// interval for the projection variant, tau at its lower bound 4/(2-sigma).
struct SolverConfig {
  Variant variant = Variant::EuclideanProjection;

  double p = 1.0 / 3.0;      // penalty growth exponent, (0,1)
  double xi = 1.0;           // penalty growth factor, [0,1] (0 = constant beta)
  double theta = 1.01;       // proximal over-estimation factor, > 1
  double sigma = 1.1;        // dual over-relaxation, [1,2)
  double tau = 4.0 / 0.9;    // smoothing coupling mu beta = tau, >= 4/(2-sigma)
  double alpha = 0.0;        // extrapolation weight (EP only; RR forces 0)
  double beta0 = 100.0;      // initial penalty, > 0 and >= 2 tau W_h

  double rho = 1.0;          // search-direction parameter, > 0
  double gamma = 0.5;        // line-search decay, (0,1)
  double delta = 1e-3;       // sufficient-decrease constant, (0, 1/max(1,2 rho))

  BbMode bb = BbMode::Fixed;
  double bb_fixed = 1.0;     // step constant in Fixed mode
  double bb_lo = 1e-3;       // clamp and fallback for curvature ratios
  double bb_hi = 1e3;

  int max_iters = 1000;
  double crit_tol = 0.0;     // stop when crit <= tol; <= 0 disables
  std::uint64_t seed = 0;

  bool deterministic = false;     // omit wall-clock from traces
  bool check_invariants = true;   // per-iteration runtime assertions

  /// Largest admissible extrapolation weight, (theta-1)/((theta+1)(xi+2)).
  double alpha_bound() const { return (theta - 1.0) / ((theta + 1.0) * (xi + 2.0)); }

  /// Defaults for a variant: EP gets alpha = alpha_bound - 1e-12, RR gets 0.
  static SolverConfig defaults(Variant v);

  void validate() const;  // throws ConfigInvalidError on any violated bound
};

/// Iterate tuple after t completed iterations. The smoothing parameter is
/// always derived as mu = tau / beta, never stored separately.
struct SolverState {
  StiefelPoint x;
  StiefelPoint x_prev;
  Eigen::VectorXd y;
  Eigen::VectorXd z;
  Eigen::VectorXd y_breve;
  Eigen::VectorXd b;  // y-update target A(X) + z/beta from the last iteration
  int t = 0;
  double beta = 0.0;
  double tau = 0.0;

  double mu() const { return tau / beta; }
};

/// Snapshot handed to the per-iteration observer (references are only valid
/// during the call). Index t >= 1 counts completed iterations; beta_used and
/// mu_used are the penalty/smoothing values of the update that produced this
/// state, beta the schedule value at the new index.
struct IterationInfo {
  int t;
  const StiefelPoint& x;
  const StiefelPoint& x_prev;
  const Eigen::VectorXd& y;
  const Eigen::VectorXd& y_breve;
  const Eigen::VectorXd& z;
  const Eigen::VectorXd& z_prev;
  double beta;
  double beta_used;
  double mu_used;
  double objective;
  double crit;
  double theta;
  double primal_residual;
  double dual_identity_residual;
  std::optional<double> eta;
  std::optional<int> backtracks;
};

using IterationObserver = std::function<void(const IterationInfo&)>;

struct SolveResult {
  SolverState state;
  std::vector<IterationTrace> trace;
};

/// Penalty schedule beta^t = beta0 (1 + xi t^p).
double penalty_at(const SolverConfig& cfg, int t);

/// Smoothed augmented Lagrangian
///   L(X, y, z, beta) = f(X) + <z, A(X) - y> + beta/2 ||A(X) - y||^2
///                      - g(X) + h_{tau/beta}(y)
/// for feasible X. Throws SmoothingTooCoarseError when tau/beta > 1/(2 W_h).
double smoothed_lagrangian(const CompositeProblem& prob, const StiefelPoint& x,
                           const Eigen::VectorXd& y, const Eigen::VectorXd& z,
                           double beta, double tau);

/// Projection X-update: extrapolate to X_c = X + alpha (X - X_prev), take the
/// gradient step X_c - G / (theta l(beta)) with G the smoothed-Lagrangian
/// gradient at X_c minus a subgradient of g at X, and project back onto the
/// manifold. Rank-deficient projection inputs are retried once after a
/// 1e-12-scale seeded perturbation.
StiefelPoint x_update_ep(const CompositeProblem& prob, const SolverState& state,
                         const SolverConfig& cfg);

struct RrStep {
  StiefelPoint x_new;
  double eta = 0.0;
  int backtracks = 0;
  Eigen::MatrixXd g_one;  // rho = 1 direction, kept for the next BB ratio
};

/// Retraction X-update with monotone backtracking: pick the step constant b_t
/// (Barzilai-Borwein against g_one_prev when available, the configured
/// constant otherwise), scale the search direction G_rho by
/// eta = b_t gamma^j / beta and retract, increasing j until
///   L(trial) - L(X) <= -delta eta ||G_rho||_F^2.
/// Throws LineSearchStalledError beyond 200 backtracks.
RrStep x_update_rr(const CompositeProblem& prob, const SolverState& state,
                   const SolverConfig& cfg,
                   const Eigen::MatrixXd* g_one_prev = nullptr);

struct YUpdate {
  Eigen::VectorXd y_bar;
  Eigen::VectorXd y_breve;
  Eigen::VectorXd b;       // A(X_new) + z / beta
  Eigen::VectorXd ax_new;  // A(X_new)
};

/// y-update via the coupled smoothing subproblem at b = A(X_new) + z/beta.
YUpdate y_update(const CompositeProblem& prob, const SolverState& state,
                 const StiefelPoint& x_new);

/// Over-relaxed dual ascent z + sigma beta (A(X_new) - y_new).
Eigen::VectorXd z_update(const Eigen::VectorXd& z, const Eigen::VectorXd& ax_new,
                         const Eigen::VectorXd& y_new, double sigma, double beta);

/// Barzilai-Borwein step from S = X - X_prev and Z = G1_prev - G1:
/// bb1 = <S,S>/<S,Z>, bb2 = <S,Z>/<Z,Z>, clamped to [bb_lo, bb_hi]. Non-finite
/// or non-positive ratios fall back to bb_lo; Fixed mode returns the constant.
double bb_step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_prev,
               const Eigen::MatrixXd& g_one, const Eigen::MatrixXd& g_one_prev,
               BbMode mode, double fixed, double lo, double hi);

/// Run the full loop from (X0, y0, z0) for max_iters iterations or until
/// crit <= crit_tol. The observer, when set, fires after every iteration.
SolveResult solve(const CompositeProblem& prob, const SolverConfig& cfg,
                  const StiefelPoint& x0, const Eigen::VectorXd& y0,
                  const Eigen::VectorXd& z0, const IterationObserver& observer = {});

}  // namespace oadmm
