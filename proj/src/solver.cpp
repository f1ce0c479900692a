#include "oadmm/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "oadmm/rng.hpp"

namespace oadmm {

namespace {

constexpr int kMaxBacktracks = 200;

/// Gradient of S(X, y, z, beta) = f(X) + <z, A(X)-y> + beta/2 ||A(X)-y||^2
/// with respect to X, at an arbitrary ambient point.
Eigen::MatrixXd grad_smooth_part(const CompositeProblem& prob, const Eigen::MatrixXd& x,
                                 const Eigen::VectorXd& y, const Eigen::VectorXd& z,
                                 double beta) {
  Eigen::VectorXd ax = prob.a->apply(x);
  return prob.f->gradient(x) + prob.a->adjoint(z + beta * (ax - y));
}

StiefelPoint project_with_retry(const Eigen::MatrixXd& candidate, std::uint64_t seed,
                                int t) {
  try {
    return project_to_stiefel(candidate);
  } catch (const RankDeficientError&) {
    GaussianSampler rng(seed ^ (0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(t)));
    Eigen::MatrixXd perturbed =
        candidate + 1e-12 * rng.matrix(candidate.rows(), candidate.cols());
    return project_to_stiefel(perturbed);  // second failure is a hard error
  }
}

}  // namespace

SolverConfig SolverConfig::defaults(Variant v) {
  SolverConfig cfg;
  cfg.variant = v;
  cfg.alpha = (v == Variant::EuclideanProjection) ? cfg.alpha_bound() - 1e-12 : 0.0;
  return cfg;
}

void SolverConfig::validate() const {
  if (!(p > 0.0 && p < 1.0)) throw ConfigInvalidError("p must lie in (0,1)");
  if (!(xi >= 0.0 && xi <= 1.0)) {
    throw ConfigInvalidError("xi must lie in [0,1] (0 only for constant-penalty runs)");
  }
  if (!(theta > 1.0)) throw ConfigInvalidError("theta must exceed 1");
  if (!(sigma >= 1.0 && sigma < 2.0)) throw ConfigInvalidError("sigma must lie in [1,2)");
  if (!(tau >= 4.0 / (2.0 - sigma))) {
    throw ConfigInvalidError("tau must be at least 4/(2-sigma)");
  }
  if (!(beta0 > 0.0)) throw ConfigInvalidError("beta0 must be positive");
  if (variant == Variant::EuclideanProjection) {
    if (!(alpha >= 0.0 && alpha < alpha_bound())) {
      throw ConfigInvalidError("alpha must lie in [0, (theta-1)/((theta+1)(xi+2)))");
    }
  } else if (alpha != 0.0) {
    throw ConfigInvalidError("the retraction variant requires alpha = 0");
  }
  if (!(rho > 0.0)) throw ConfigInvalidError("rho must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigInvalidError("gamma must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0 / std::max(1.0, 2.0 * rho))) {
    throw ConfigInvalidError("delta must lie in (0, 1/max(1, 2 rho))");
  }
  if (!(bb_fixed > 0.0)) throw ConfigInvalidError("fixed step constant must be positive");
  if (!(bb_lo > 0.0 && bb_lo <= bb_hi)) {
    throw ConfigInvalidError("step clamp must satisfy 0 < bb_lo <= bb_hi");
  }
  if (max_iters < 1) throw ConfigInvalidError("max_iters must be >= 1");
}

double penalty_at(const SolverConfig& cfg, int t) {
  if (t < 0) throw ConfigInvalidError("penalty_at: t must be >= 0");
  return cfg.beta0 * (1.0 + cfg.xi * std::pow(static_cast<double>(t), cfg.p));
}

double smoothed_lagrangian(const CompositeProblem& prob, const StiefelPoint& x,
                           const Eigen::VectorXd& y, const Eigen::VectorXd& z,
                           double beta, double tau) {
  const Eigen::MatrixXd& xm = x.matrix();
  Eigen::VectorXd residual = prob.a->apply(xm) - y;
  return prob.f->value(xm) + z.dot(residual) + 0.5 * beta * residual.squaredNorm() -
         prob.g->evaluate(xm) + moreau_value(*prob.h, tau / beta, y);
}

StiefelPoint x_update_ep(const CompositeProblem& prob, const SolverState& state,
                         const SolverConfig& cfg) {
  const Eigen::MatrixXd& x = state.x.matrix();
  Eigen::MatrixXd x_c = x + cfg.alpha * (x - state.x_prev.matrix());
  Eigen::MatrixXd g = grad_smooth_part(prob, x_c, state.y, state.z, state.beta) -
                      prob.g->subgradient(x);
  const double step_scale =
      cfg.theta * (state.beta * prob.a->op_norm() * prob.a->op_norm() + prob.f->smoothness());
  Eigen::MatrixXd candidate = x_c - g / step_scale;
  StiefelPoint x_new = project_with_retry(candidate, cfg.seed, state.t);

  if (cfg.check_invariants) {
    // Optimality of the projected step: X^t was a feasible candidate.
    const double lhs = (x_new.matrix() - x).cwiseProduct(g).sum() +
                       0.5 * step_scale * (x_new.matrix() - x_c).squaredNorm();
    const double rhs = 0.5 * step_scale * (x - x_c).squaredNorm();
    const double slack = 1e-8 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
    if (!(lhs <= rhs + slack)) {
      throw NumericalError("x_update_ep: projected step violates its optimality inequality");
    }
  }
  return x_new;
}

RrStep x_update_rr(const CompositeProblem& prob, const SolverState& state,
                   const SolverConfig& cfg, const Eigen::MatrixXd* g_one_prev) {
  const Eigen::MatrixXd& x = state.x.matrix();
  Eigen::MatrixXd g = grad_smooth_part(prob, x, state.y, state.z, state.beta) -
                      prob.g->subgradient(x);
  Eigen::MatrixXd g_rho = descent_direction(state.x, g, cfg.rho);
  Eigen::MatrixXd g_one = descent_direction(state.x, g, 1.0);
  const double b_t =
      (cfg.bb == BbMode::Fixed)
          ? cfg.bb_fixed
          : (g_one_prev ? bb_step(x, state.x_prev.matrix(), g_one, *g_one_prev, cfg.bb,
                                  cfg.bb_fixed, cfg.bb_lo, cfg.bb_hi)
                        : cfg.bb_lo);
  const double g_rho_sq = g_rho.squaredNorm();
  const double l_ref = smoothed_lagrangian(prob, state.x, state.y, state.z, state.beta,
                                           state.tau);
  // Differences below the rounding noise of evaluating L are not measurable,
  // so the sufficient-decrease test gets this much absolute slack and a fully
  // sub-noise search direction means the iterate is already stationary in X
  // at working precision.
  const double noise_floor =
      64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(l_ref));
  if (b_t / state.beta * g_rho_sq <= noise_floor) {
    return RrStep{state.x, b_t / state.beta, 0, std::move(g_one)};
  }

  for (int j = 0; j <= kMaxBacktracks; ++j) {
    const double eta = b_t * std::pow(cfg.gamma, j) / state.beta;
    // G_rho is tangent in exact arithmetic; re-projecting keeps the
    // retraction precondition satisfied in floating point.
    TangentVector step = tangent_project(state.x, -eta * g_rho);
    StiefelPoint trial = polar_retraction(state.x, step);
    const double l_trial =
        smoothed_lagrangian(prob, trial, state.y, state.z, state.beta, state.tau);
    if (l_trial - l_ref <= -cfg.delta * eta * g_rho_sq + noise_floor) {
      return RrStep{std::move(trial), eta, j, std::move(g_one)};
    }
  }
  throw LineSearchStalledError("x_update_rr: no sufficient decrease within " +
                               std::to_string(kMaxBacktracks) + " backtracks");
}

YUpdate y_update(const CompositeProblem& prob, const SolverState& state,
                 const StiefelPoint& x_new) {
  YUpdate out;
  out.ax_new = prob.a->apply(x_new.matrix());
  out.b = out.ax_new + state.z / state.beta;
  YSubproblemSolution sol = y_subproblem(*prob.h, state.mu(), state.beta, out.b);
  out.y_bar = std::move(sol.y_bar);
  out.y_breve = std::move(sol.y_breve);
  return out;
}

Eigen::VectorXd z_update(const Eigen::VectorXd& z, const Eigen::VectorXd& ax_new,
                         const Eigen::VectorXd& y_new, double sigma, double beta) {
  return z + sigma * beta * (ax_new - y_new);
}

double bb_step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_prev,
               const Eigen::MatrixXd& g_one, const Eigen::MatrixXd& g_one_prev,
               BbMode mode, double fixed, double lo, double hi) {
  if (mode == BbMode::Fixed) return fixed;
  Eigen::MatrixXd s = x - x_prev;
  Eigen::MatrixXd zm = g_one_prev - g_one;
  const double sz = s.cwiseProduct(zm).sum();
  const double ratio = (mode == BbMode::Bb1) ? s.squaredNorm() / sz : sz / zm.squaredNorm();
  if (!std::isfinite(ratio) || ratio <= 0.0) return lo;
  return std::clamp(ratio, lo, hi);
}

SolveResult solve(const CompositeProblem& prob, const SolverConfig& cfg,
                  const StiefelPoint& x0, const Eigen::VectorXd& y0,
                  const Eigen::VectorXd& z0, const IterationObserver& observer) {
  cfg.validate();
  prob.validate();
  if (x0.rows() != prob.n || x0.cols() != prob.r) {
    throw DimensionMismatchError("solve: X0 has wrong shape");
  }
  if (y0.size() != prob.m || z0.size() != prob.m) {
    throw DimensionMismatchError("solve: y0/z0 have wrong size");
  }
  const double w_h = prob.h->weak_convexity();
  if (!(cfg.beta0 >= 2.0 * cfg.tau * w_h)) {
    throw ConfigInvalidError("solve: beta0 must be at least 2 tau W_h");
  }

  const double c_h = prob.h->lipschitz();
  const double dual_bound = z0.norm() + cfg.sigma * c_h / (2.0 - cfg.sigma);

  SolveResult result{SolverState{x0, x0, y0, z0, y0, y0, 0, penalty_at(cfg, 0), cfg.tau},
                     {}};
  SolverState& state = result.state;
  Eigen::MatrixXd g_one_prev;
  bool have_bb_history = false;

  const auto start = std::chrono::steady_clock::now();
  for (int it = 0; it < cfg.max_iters; ++it) {
    state.t = it;
    state.beta = penalty_at(cfg, it);  // S1
    const double beta_t = state.beta;
    const double mu_t = state.mu();

    // S2: primal X-update.
    StiefelPoint x_new = state.x;
    std::optional<double> eta;
    std::optional<int> backtracks;
    if (cfg.variant == Variant::EuclideanProjection) {
      x_new = x_update_ep(prob, state, cfg);
    } else {
      RrStep step = x_update_rr(prob, state, cfg, have_bb_history ? &g_one_prev : nullptr);
      x_new = std::move(step.x_new);
      eta = step.eta;
      backtracks = step.backtracks;
      g_one_prev = std::move(step.g_one);
      have_bb_history = true;
    }

    // S3: y-update through the smoothing subproblem.
    YUpdate yu = y_update(prob, state, x_new);

    // S4: over-relaxed dual ascent.
    Eigen::VectorXd residual = yu.ax_new - yu.y_bar;
    Eigen::VectorXd z_new = state.z + cfg.sigma * beta_t * residual;

    // z^t + beta^t (A(X^{t+1}) - y^{t+1}) must equal grad h_mu(y^{t+1}).
    const double identity_residual =
        (moreau_grad(*prob.h, mu_t, yu.y_bar) - (state.z + beta_t * residual)).norm();

    if (cfg.check_invariants) {
      if (!(z_new.norm() <= dual_bound * (1.0 + 1e-9) + 1e-9)) {
        throw NumericalError("solve: dual iterate escaped its a-priori bound");
      }
      if (!(identity_residual <= 1e-8)) {
        throw NumericalError("solve: dual/primal identity residual " +
                             std::to_string(identity_residual) + " exceeds 1e-8");
      }
    }

    const Eigen::VectorXd canonical = beta_t * (yu.b - yu.y_bar);
    const double crit_val = crit(prob, x_new, yu.y_breve, z_new, &canonical);

    // Advance the state to iterate index t+1.
    const int t_new = it + 1;
    Eigen::VectorXd z_prev = std::move(state.z);
    state.x_prev = std::move(state.x);
    state.x = std::move(x_new);
    state.y = std::move(yu.y_bar);
    state.y_breve = std::move(yu.y_breve);
    state.b = std::move(yu.b);
    state.z = std::move(z_new);
    state.t = t_new;
    state.beta = penalty_at(cfg, t_new);

    const double objective_val = objective(prob, state.x);
    const double theta_val = lyapunov(prob, state, cfg);
    const double primal_residual = residual.norm();

    std::optional<double> elapsed;
    if (!cfg.deterministic) {
      elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
    }

    if (t_new <= 10000 || t_new % 10 == 0) {
      IterationTrace row;
      row.t = t_new;
      row.objective = objective_val;
      row.crit = crit_val;
      row.theta = theta_val;
      row.primal_residual = primal_residual;
      row.beta = state.beta;
      row.step_eta = eta;
      row.backtracks = backtracks;
      row.elapsed_seconds = elapsed;
      result.trace.push_back(std::move(row));
    }

    if (observer) {
      observer(IterationInfo{t_new, state.x, state.x_prev, state.y, state.y_breve,
                             state.z, z_prev, state.beta, beta_t, mu_t, objective_val,
                             crit_val, theta_val, primal_residual, identity_residual,
                             eta, backtracks});
    }

    if (cfg.crit_tol > 0.0 && crit_val <= cfg.crit_tol) break;
  }
  return result;
}

}  // namespace oadmm
