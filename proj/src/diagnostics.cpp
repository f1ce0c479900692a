#include "oadmm/diagnostics.hpp"

#include "oadmm/solver.hpp"

namespace oadmm {

double crit(const CompositeProblem& prob, const StiefelPoint& x,
            const Eigen::VectorXd& y_breve, const Eigen::VectorXd& z,
            const Eigen::VectorXd* canonical_element) {
  if (x.rows() != prob.n || x.cols() != prob.r) {
    throw DimensionMismatchError("crit: X has wrong shape");
  }
  const Eigen::MatrixXd& xm = x.matrix();

  const double primal = (prob.a->apply(xm) - y_breve).norm();

  double dual;
  if (prob.h->has_subdiff_dist()) {
    dual = prob.h->subdiff_dist(y_breve, z);
  } else if (canonical_element != nullptr) {
    dual = (*canonical_element - z).norm();
  } else {
    throw MissingCanonicalElementError(
        "crit: h has no exact subdifferential distance and no canonical element was given");
  }

  Eigen::MatrixXd station =
      prob.f->gradient(xm) - prob.g->subgradient(xm) + prob.a->adjoint(z);
  const double projected = tangent_project(x, station).norm();

  return primal + dual + projected;
}

double lyapunov(const CompositeProblem& prob, const SolverState& state,
                const SolverConfig& cfg) {
  if (state.t < 1) {
    throw InsufficientHistoryError("lyapunov: defined only for t >= 1");
  }
  const double beta = state.beta;
  const double beta_prev = penalty_at(cfg, state.t - 1);
  const double c_h = prob.h->lipschitz();

  const double lagr = smoothed_lagrangian(prob, state.x, state.y, state.z, beta, cfg.tau);

  // c = eps_beta + tau C_h^2 + (2/sigma) * 12 sigma^2 C_h^2 / (p (2-sigma)^2),
  // with the free constant eps_beta fixed to 1.
  const double sigma_ddot =
      12.0 * cfg.sigma * cfg.sigma * c_h * c_h / (cfg.p * (2.0 - cfg.sigma) * (2.0 - cfg.sigma));
  const double c = 1.0 + cfg.tau * c_h * c_h + (2.0 / cfg.sigma) * sigma_ddot;

  const double ell = beta * prob.a->op_norm() * prob.a->op_norm() + prob.f->smoothness();
  const double momentum = 0.5 * cfg.alpha * (cfg.theta + 1.0) * ell *
                          (state.x.matrix() - state.x_prev.matrix()).squaredNorm();

  const double residual_sq = (prob.a->apply(state.x.matrix()) - state.y).squaredNorm();
  const double dual_history = 2.0 * beta_prev * (cfg.sigma - 1.0) / (2.0 - cfg.sigma) *
                              cfg.sigma * cfg.sigma * residual_sq;

  return lagr + c / beta + momentum + dual_history;
}

std::vector<std::pair<int, double>> ergodic_crit(const std::vector<IterationTrace>& trace) {
  std::vector<std::pair<int, double>> out;
  double sum = 0.0;
  int count = 0;
  for (const IterationTrace& row : trace) {
    if (!row.crit) continue;
    sum += *row.crit;
    ++count;
    out.emplace_back(row.t, sum / count);
  }
  if (out.empty()) throw EmptyTraceError("ergodic_crit: no crit values in trace");
  return out;
}

}  // namespace oadmm
