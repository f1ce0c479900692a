#pragma once

#include <memory>

#include <Eigen/Core>

#include "oadmm/prox.hpp"
#include "oadmm/stiefel.hpp"

namespace oadmm {

/// Linear map A from n x r matrices to R^m together with its adjoint and an
/// operator-norm bound A_bar >= ||A(V)|| / ||V||_F.
class LinearMap {
 public:
  virtual ~LinearMap() = default;
  virtual Eigen::VectorXd apply(const Eigen::MatrixXd& x) const = 0;
  virtual Eigen::MatrixXd adjoint(const Eigen::VectorXd& z) const = 0;
  virtual double op_norm() const = 0;
  virtual Eigen::Index input_rows() const = 0;
  virtual Eigen::Index input_cols() const = 0;
  virtual Eigen::Index output_dim() const = 0;
};

/// A(X) = vec(X) (column-major), m = n r, A_bar = 1.
class VectorizingIdentityMap : public LinearMap {
 public:
  VectorizingIdentityMap(Eigen::Index n, Eigen::Index r);
  Eigen::VectorXd apply(const Eigen::MatrixXd& x) const override;
  Eigen::MatrixXd adjoint(const Eigen::VectorXd& z) const override;
  double op_norm() const override { return 1.0; }
  Eigen::Index input_rows() const override { return n_; }
  Eigen::Index input_cols() const override { return r_; }
  Eigen::Index output_dim() const override { return n_ * r_; }

 private:
  Eigen::Index n_, r_;
};

/// The smooth objective part f with its gradient and certified constants.
class SmoothPart {
 public:
  virtual ~SmoothPart() = default;
  virtual double value(const Eigen::MatrixXd& x) const = 0;
  virtual Eigen::MatrixXd gradient(const Eigen::MatrixXd& x) const = 0;
  virtual double smoothness() const = 0;  // L_f
  virtual double grad_bound() const = 0;  // C_f, valid on the manifold
};

/// f == 0.
class ZeroSmooth : public SmoothPart {
 public:
  explicit ZeroSmooth(double smoothness = 1.0) : smoothness_(smoothness) {}
  double value(const Eigen::MatrixXd&) const override { return 0.0; }
  Eigen::MatrixXd gradient(const Eigen::MatrixXd& x) const override {
    return Eigen::MatrixXd::Zero(x.rows(), x.cols());
  }
  double smoothness() const override { return smoothness_; }
  double grad_bound() const override { return 0.0; }

 private:
  double smoothness_;
};

/// f(X) = ||X X^T D - D||_F^2 / (2 m_dot) for a data matrix D in R^{n x m_dot}.
///
/// Gradient (ambient, no orthogonality assumed): with M = X X^T D - D,
///   grad f(X) = (M D^T + D M^T) X / m_dot,
/// evaluated as M (D^T X) + D (M^T X) to avoid the n x n product.
///
/// Smoothness certificate: along any direction V at X,
///   d^2/dt^2 f(X + tV)|_0 = (||(V X^T + X V^T) D||_F^2 + 2 <M, V V^T D>) / m_dot
///                        <= (4 ||X||_2^2 + 2 max(||X||_2^2, 1)) ||D||_2^2 ||V||_F^2 / m_dot,
/// so L_f = 8 ||D||_2^2 / m_dot covers the operator-norm ball ||X||_2 <= 1.15,
/// which contains the manifold and every extrapolated point the solvers visit.
/// Gradient bound on the manifold: ||M||_F <= ||D||_F gives
///   C_f = 2 ||D||_2 ||D||_F / m_dot.
class SparsePcaSmooth : public SmoothPart {
 public:
  explicit SparsePcaSmooth(Eigen::MatrixXd data);
  double value(const Eigen::MatrixXd& x) const override;
  Eigen::MatrixXd gradient(const Eigen::MatrixXd& x) const override;
  double smoothness() const override { return smoothness_; }
  double grad_bound() const override { return grad_bound_; }
  const Eigen::MatrixXd& data() const { return data_; }

 private:
  Eigen::MatrixXd data_;
  double smoothness_;
  double grad_bound_;
};

/// The composite problem F(X) = f(X) - g(X) + h(A(X)) over X^T X = I_r.
struct CompositeProblem {
  std::shared_ptr<const SmoothPart> f;
  std::shared_ptr<const SubgradFunction> g;
  std::shared_ptr<const ProxFunction> h;
  std::shared_ptr<const LinearMap> a;
  Eigen::Index n = 0, r = 0, m = 0;

  void validate() const;  // dimension consistency between A and (n, r, m)
};

/// F(X) = f(X) - g(X) + h(A(X)).
double objective(const CompositeProblem& prob, const StiefelPoint& x);

/// Sparse-PCA instance of the composite problem:
///   f = ||X X^T D - D||_F^2 / (2 m_dot),  g = rho_dot ||X||_[k],
///   h = rho_dot ||.||_1,  A = vec.
/// r is the requested number of components (fixes m = n r).
CompositeProblem make_sparse_pca(const Eigen::MatrixXd& data, double rho_dot,
                                 Eigen::Index k, Eigen::Index r);

}  // namespace oadmm
