#include "oadmm/baselines.hpp"

#include <chrono>
#include <cmath>

#include "oadmm/rng.hpp"

namespace oadmm {

namespace {

StiefelPoint project_with_retry(const Eigen::MatrixXd& candidate, std::uint64_t seed,
                                int t) {
  try {
    return project_to_stiefel(candidate);
  } catch (const RankDeficientError&) {
    GaussianSampler rng(seed ^ (0x517cc1b727220a95ULL + static_cast<std::uint64_t>(t)));
    Eigen::MatrixXd perturbed =
        candidate + 1e-12 * rng.matrix(candidate.rows(), candidate.cols());
    return project_to_stiefel(perturbed);
  }
}

std::optional<double> elapsed_since(const std::chrono::steady_clock::time_point& start,
                                    bool deterministic) {
  if (deterministic) return std::nullopt;
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

BaselineResult subgrad_solve(const CompositeProblem& prob, const SubgradConfig& cfg,
                             const StiefelPoint& x0) {
  prob.validate();
  if (cfg.max_iters < 1) throw ConfigInvalidError("subgrad_solve: max_iters must be >= 1");
  const double eta0 = (cfg.eta0 > 0.0) ? cfg.eta0 : 1.0 / prob.f->smoothness();
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) {
    throw ConfigInvalidError("subgrad_solve: step scale must be positive and finite");
  }

  BaselineResult result{x0, {}};
  const auto start = std::chrono::steady_clock::now();
  for (int t = 0; t < cfg.max_iters; ++t) {
    const Eigen::MatrixXd& x = result.x.matrix();
    Eigen::MatrixXd g = prob.f->gradient(x) - prob.g->subgradient(x) +
                        prob.a->adjoint(prob.h->subgradient(prob.a->apply(x)));
    const double eta = eta0 / std::sqrt(static_cast<double>(t) + 1.0);
    result.x = project_with_retry(x - eta * g, cfg.seed, t);

    IterationTrace row;
    row.t = t + 1;
    row.objective = objective(prob, result.x);
    row.step_eta = eta;
    row.elapsed_seconds = elapsed_since(start, cfg.deterministic);
    if (row.t <= 10000 || row.t % 10 == 0) result.trace.push_back(std::move(row));
  }
  return result;
}

BaselineResult spgm_ep_solve(const CompositeProblem& prob, const SpgmConfig& cfg,
                             const StiefelPoint& x0, const Eigen::VectorXd& y0) {
  prob.validate();
  if (cfg.max_iters < 1) throw ConfigInvalidError("spgm_ep_solve: max_iters must be >= 1");
  if (!(cfg.mu0 > 0.0)) throw ConfigInvalidError("spgm_ep_solve: mu0 must be positive");
  if (y0.size() != prob.m) throw DimensionMismatchError("spgm_ep_solve: y0 has wrong size");
  const double w_h = prob.h->weak_convexity();
  if (w_h > 0.0 && cfg.mu0 > 1.0 / (2.0 * w_h)) {
    throw SmoothingTooCoarseError("spgm_ep_solve: mu0 exceeds 1/(2 W_h)");
  }
  const double a_bar = prob.a->op_norm();

  BaselineResult result{x0, {}};
  Eigen::VectorXd y = y0;
  const auto start = std::chrono::steady_clock::now();
  for (int t = 0; t < cfg.max_iters; ++t) {
    const double mu = cfg.mu0 / std::cbrt(static_cast<double>(t) + 1.0);
    const Eigen::MatrixXd& x = result.x.matrix();
    Eigen::MatrixXd g = prob.f->gradient(x) +
                        prob.a->adjoint((prob.a->apply(x) - y) / mu) -
                        prob.g->subgradient(x);
    const double eta = 1.0 / (prob.f->smoothness() + a_bar * a_bar / mu);
    result.x = project_with_retry(x - eta * g, cfg.seed, t);
    Eigen::VectorXd ax = prob.a->apply(result.x.matrix());
    y = prob.h->prox(ax, mu);

    IterationTrace row;
    row.t = t + 1;
    row.objective = objective(prob, result.x);
    row.primal_residual = (ax - y).norm();
    row.step_eta = eta;
    row.elapsed_seconds = elapsed_since(start, cfg.deterministic);
    if (row.t <= 10000 || row.t % 10 == 0) result.trace.push_back(std::move(row));
  }
  return result;
}

SolverConfig fixed_beta_admm_config(const FixedBetaAdmmConfig& cfg) {
  if (!(cfg.beta > 0.0)) throw ConfigInvalidError("fixed_beta_admm: beta must be positive");
  SolverConfig sc = SolverConfig::defaults(Variant::RiemannianRetraction);
  sc.xi = 0.0;     // constant penalty schedule
  sc.sigma = 1.0;  // no over-relaxation
  sc.alpha = 0.0;
  sc.tau = 4.0;    // lower bound 4/(2 - sigma) at sigma = 1
  sc.beta0 = cfg.beta;
  sc.max_iters = cfg.max_iters;
  sc.seed = cfg.seed;
  sc.deterministic = cfg.deterministic;
  return sc;
}

SolveResult fixed_beta_admm_solve(const CompositeProblem& prob,
                                  const FixedBetaAdmmConfig& cfg, const StiefelPoint& x0,
                                  const Eigen::VectorXd& y0, const Eigen::VectorXd& z0) {
  return solve(prob, fixed_beta_admm_config(cfg), x0, y0, z0);
}

}  // namespace oadmm
