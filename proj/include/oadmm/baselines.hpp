#pragma once

#include <cstdint>

#include "oadmm/solver.hpp"

namespace oadmm {

struct BaselineResult {
  StiefelPoint x;
  std::vector<IterationTrace> trace;
};

/// Euclidean-projection subgradient method with diminishing steps
/// eta_t = eta0 / sqrt(t + 1).
struct SubgradConfig {
  double eta0 = 0.0;  // <= 0 picks 1/L_f
  int max_iters = 1000;
  std::uint64_t seed = 0;
  bool deterministic = false;
};

/// X^{t+1} = Proj_M(X^t - eta_t G^t) with G^t in dF(X^t) built from
/// grad f - dg + A^T dh(A(X)) using the deterministic subgradient elements.
BaselineResult subgrad_solve(const CompositeProblem& prob, const SubgradConfig& cfg,
                             const StiefelPoint& x0);

/// Smoothing proximal gradient with Euclidean projection: alternates a
/// projected gradient step on f + ||A(X) - y||^2 / (2 mu) + (-g) and the exact
/// y-minimizer y = prox(A(X); mu), on the schedule mu_t = mu0 / (1+t)^{1/3}.
struct SpgmConfig {
  double mu0 = 0.01;
  int max_iters = 1000;
  std::uint64_t seed = 0;
  bool deterministic = false;
};

BaselineResult spgm_ep_solve(const CompositeProblem& prob, const SpgmConfig& cfg,
                             const StiefelPoint& x0, const Eigen::VectorXd& y0);

/// Fixed-penalty ADMM: the retraction loop run degenerate with xi = 0 (so
/// beta^t == beta), sigma = 1, alpha = 0, sharing every sub-update.
struct FixedBetaAdmmConfig {
  double beta = 100.0;
  int max_iters = 1000;
  std::uint64_t seed = 0;
  bool deterministic = false;
};

/// The exact degenerate SolverConfig the fixed-penalty baseline runs.
SolverConfig fixed_beta_admm_config(const FixedBetaAdmmConfig& cfg);

SolveResult fixed_beta_admm_solve(const CompositeProblem& prob,
                                  const FixedBetaAdmmConfig& cfg, const StiefelPoint& x0,
                                  const Eigen::VectorXd& y0, const Eigen::VectorXd& z0);

}  // namespace oadmm
