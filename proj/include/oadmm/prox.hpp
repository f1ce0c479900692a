#pragma once

#include <memory>

#include <Eigen/Core>

#include "oadmm/errors.hpp"

namespace oadmm {

/// A weakly convex function h with an exact proximal operator.
///
/// Entries report their Lipschitz constant C_h and weak-convexity modulus W_h
/// (h + W_h/2 ||.||^2 convex). The proximal operator is single-valued for
/// mu < 1/W_h; all envelope machinery additionally requires mu <= 1/(2 W_h).
class ProxFunction {
 public:
  virtual ~ProxFunction() = default;

  virtual double evaluate(const Eigen::VectorXd& y) const = 0;

  /// argmin_u  h(u) + ||u - y||^2 / (2 mu).
  virtual Eigen::VectorXd prox(const Eigen::VectorXd& y, double mu) const = 0;

  /// A deterministic element of dh(y) (used by subgradient-based baselines).
  virtual Eigen::VectorXd subgradient(const Eigen::VectorXd& y) const = 0;

  virtual double lipschitz() const = 0;       // C_h
  virtual double weak_convexity() const = 0;  // W_h

  /// Exact dist(z, dh(y)) when the catalog entry can compute it.
  virtual bool has_subdiff_dist() const { return false; }
  virtual double subdiff_dist(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const;
};

/// A convex Lipschitz function g with a deterministic subgradient selection.
class SubgradFunction {
 public:
  virtual ~SubgradFunction() = default;
  virtual double evaluate(const Eigen::MatrixXd& x) const = 0;
  virtual Eigen::MatrixXd subgradient(const Eigen::MatrixXd& x) const = 0;
  virtual double lipschitz() const = 0;  // C_g
};

// --- Catalog -------------------------------------------------------------

/// h(y) = lambda ||y||_1 on R^dim. C_h = lambda sqrt(dim), W_h = 0.
class ScaledL1 : public ProxFunction {
 public:
  ScaledL1(double lambda, Eigen::Index dim);
  double evaluate(const Eigen::VectorXd& y) const override;
  Eigen::VectorXd prox(const Eigen::VectorXd& y, double mu) const override;
  Eigen::VectorXd subgradient(const Eigen::VectorXd& y) const override;
  double lipschitz() const override { return lipschitz_; }
  double weak_convexity() const override { return 0.0; }
  bool has_subdiff_dist() const override { return true; }
  double subdiff_dist(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const override;
  double lambda() const { return lambda_; }

 private:
  double lambda_;
  double lipschitz_;
};

/// Separable minimax concave penalty with scale lambda and knee a:
///   phi(t) = lambda |t| - t^2 / (2a)   for |t| <= a lambda,
///   phi(t) = a lambda^2 / 2            otherwise.
/// W_h = 1/a, C_h = lambda sqrt(dim). The prox is closed-form for mu < a.
class MinimaxConcavePenalty : public ProxFunction {
 public:
  MinimaxConcavePenalty(double lambda, double a, Eigen::Index dim);
  double evaluate(const Eigen::VectorXd& y) const override;
  Eigen::VectorXd prox(const Eigen::VectorXd& y, double mu) const override;
  Eigen::VectorXd subgradient(const Eigen::VectorXd& y) const override;
  double lipschitz() const override { return lipschitz_; }
  double weak_convexity() const override { return 1.0 / a_; }
  bool has_subdiff_dist() const override { return true; }
  double subdiff_dist(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const override;

 private:
  double lambda_;
  double a_;
  double lipschitz_;
};

/// h == 0 (prox is the identity, dh = {0}).
class ZeroProx : public ProxFunction {
 public:
  double evaluate(const Eigen::VectorXd&) const override { return 0.0; }
  Eigen::VectorXd prox(const Eigen::VectorXd& y, double) const override { return y; }
  Eigen::VectorXd subgradient(const Eigen::VectorXd& y) const override {
    return Eigen::VectorXd::Zero(y.size());
  }
  double lipschitz() const override { return 0.0; }
  double weak_convexity() const override { return 0.0; }
  bool has_subdiff_dist() const override { return true; }
  double subdiff_dist(const Eigen::VectorXd&, const Eigen::VectorXd& z) const override {
    return z.norm();
  }
};

/// g(X) = rho ||X||_[k], the l1 norm of the k largest-magnitude entries.
class LargestKNorm : public SubgradFunction {
 public:
  LargestKNorm(double rho, Eigen::Index k);
  double evaluate(const Eigen::MatrixXd& x) const override;
  Eigen::MatrixXd subgradient(const Eigen::MatrixXd& x) const override;
  double lipschitz() const override;

 private:
  double rho_;
  Eigen::Index k_;
};

/// g == 0.
class ZeroSubgrad : public SubgradFunction {
 public:
  double evaluate(const Eigen::MatrixXd&) const override { return 0.0; }
  Eigen::MatrixXd subgradient(const Eigen::MatrixXd& x) const override {
    return Eigen::MatrixXd::Zero(x.rows(), x.cols());
  }
  double lipschitz() const override { return 0.0; }
};

// --- Moreau envelope operations -------------------------------------------

/// h_mu(y) = h(p) + ||p - y||^2 / (2 mu) with p = prox(y, mu).
/// Requires mu in (0, 1/(2 W_h)] when W_h > 0 (SmoothingTooCoarseError).
double moreau_value(const ProxFunction& h, double mu, const Eigen::VectorXd& y);

/// grad h_mu(y) = (y - prox(y, mu)) / mu. Same precondition as moreau_value.
Eigen::VectorXd moreau_grad(const ProxFunction& h, double mu, const Eigen::VectorXd& y);

struct YSubproblemSolution {
  Eigen::VectorXd y_bar;    // argmin_y h_mu(y) + beta/2 ||y - b||^2
  Eigen::VectorXd y_breve;  // prox(b; mu + 1/beta)
};

/// Closed-form minimizer of the coupled smoothing subproblem:
///   y_breve = prox(b; mu + 1/beta),  y_bar = (y_breve + mu beta b) / (1 + mu beta).
/// Requires beta > 1/mu (BetaTooSmallError) and the envelope precondition.
YSubproblemSolution y_subproblem(const ProxFunction& h, double mu, double beta,
                                 const Eigen::VectorXd& b);

// --- Free scalar/matrix helpers -------------------------------------------

/// Componentwise soft threshold: sign(y_i) max(|y_i| - lambda, 0).
Eigen::VectorXd l1_prox(const Eigen::VectorXd& y, double lambda);

/// Sum of the k largest absolute entries of X.
double largest_k_value(const Eigen::MatrixXd& x, Eigen::Index k);

/// Element of the subdifferential of ||.||_[k]: sign(X_ij) at the k selected
/// positions, 0 elsewhere. Selection is by (|value| desc, row-major index asc)
/// so the element is deterministic across runs.
Eigen::MatrixXd largest_k_subgradient(const Eigen::MatrixXd& x, Eigen::Index k);

/// Euclidean distance from z to d(lambda ||.||_1)(y), exact per coordinate.
double l1_subdiff_dist(const Eigen::VectorXd& y, const Eigen::VectorXd& z, double lambda);

}  // namespace oadmm
