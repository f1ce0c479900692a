#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "oadmm/problem.hpp"

namespace oadmm {

struct SolverConfig;  // solver.hpp
struct SolverState;

/// One per-iteration record. Fields that a given solver does not produce stay
/// empty (and serialize as empty CSV fields, not zeros).
struct IterationTrace {
  int t = 0;
  double objective = 0.0;
  std::optional<double> crit;
  std::optional<double> theta;
  std::optional<double> primal_residual;
  std::optional<double> beta;
  std::optional<double> step_eta;
  std::optional<int> backtracks;
  std::optional<double> elapsed_seconds;
};

/// Stationarity measure
///   Crit(X, y, z) = ||A(X) - y|| + dist(dh(y), z)
///                 + ||Proj_{T_X M}(grad f(X) - dg(X) + A^T(z))||_F,
/// evaluated at the half-iterate y = y_breve. The middle term uses the exact
/// subdifferential distance when the catalog entry provides one, otherwise
/// ||s - z|| for the canonical element s = beta (b - y_bar) supplied by the
/// solver (an upper bound on the distance). With neither available, throws
/// MissingCanonicalElementError.
double crit(const CompositeProblem& prob, const StiefelPoint& x,
            const Eigen::VectorXd& y_breve, const Eigen::VectorXd& z,
            const Eigen::VectorXd* canonical_element = nullptr);

/// Lyapunov potential at iterate index t >= 1:
///   Theta^t = L(X^t, y^t, z^t, beta^t) + c / beta^t + P^t + D^t
/// with L the smoothed augmented Lagrangian, c = eps_beta + tau C_h^2 +
/// (2/sigma) sigma_ddot, sigma_ddot = 12 sigma^2 C_h^2 / (p (2-sigma)^2),
/// eps_beta fixed to 1,
///   P^t = alpha (theta + 1) l(beta^t) / 2 * ||X^t - X^{t-1}||_F^2,
///   D^t = 2 beta^{t-1} (sigma-1)/(2-sigma) * ||sigma (A(X^t) - y^t)||^2.
/// Throws InsufficientHistoryError for t = 0.
double lyapunov(const CompositeProblem& prob, const SolverState& state,
                const SolverConfig& cfg);

/// Running averages (T, mean of crit over rows with t <= T), one entry per
/// trace row that carries a crit value. Throws EmptyTraceError when none do.
std::vector<std::pair<int, double>> ergodic_crit(const std::vector<IterationTrace>& trace);

}  // namespace oadmm
