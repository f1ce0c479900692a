#pragma once

#include <Eigen/Core>

#include "oadmm/errors.hpp"

namespace oadmm {

/// An n x r matrix with orthonormal columns (a point on the Stiefel
/// manifold M = {X : X^T X = I_r}). Feasibility is checked at construction;
/// every operation that returns a StiefelPoint re-establishes it.
class StiefelPoint {
 public:
  static constexpr double kFeasTol = 1e-10;

  explicit StiefelPoint(Eigen::MatrixXd data);

  const Eigen::MatrixXd& matrix() const { return data_; }
  Eigen::Index rows() const { return data_.rows(); }
  Eigen::Index cols() const { return data_.cols(); }

  /// ||X^T X - I||_F for an arbitrary candidate matrix.
  static double feasibility_error(const Eigen::MatrixXd& candidate);

 private:
  Eigen::MatrixXd data_;
};

/// An element of the tangent space T_X M = {Y : X^T Y + Y^T X = 0},
/// carrying the base point it is tangent at.
class TangentVector {
 public:
  TangentVector(const StiefelPoint& base, Eigen::MatrixXd data);

  const Eigen::MatrixXd& matrix() const { return data_; }
  const StiefelPoint& base() const { return base_; }
  double norm() const { return data_.norm(); }

 private:
  StiefelPoint base_;
  Eigen::MatrixXd data_;
};

/// Nearest point on M in Frobenius norm, via the thin SVD U diag(s) V^T:
/// returns U V^T. Throws RankDeficientError when the smallest singular value
/// falls below 1e-12 times the largest (projection no longer unique).
StiefelPoint project_to_stiefel(const Eigen::MatrixXd& m);

/// Orthogonal projection onto T_X M: Delta - X (Delta^T X + X^T Delta) / 2.
/// Never expands: ||result||_F <= ||Delta||_F.
TangentVector tangent_project(const StiefelPoint& x, const Eigen::MatrixXd& delta);

/// Polar retraction (X + Delta)(I + Delta^T Delta)^{-1/2}. Computed through
/// the actual Gram matrix of X + Delta, which coincides with I + Delta^T Delta
/// for tangent Delta and keeps the result feasible to machine precision.
StiefelPoint polar_retraction(const StiefelPoint& x, const TangentVector& delta);

/// QR retraction qf(X + Delta): the thin-QR Q-factor, with the R diagonal
/// forced positive so qf() is a function rather than a relation.
StiefelPoint qr_retraction(const StiefelPoint& x, const TangentVector& delta);

/// Search direction G_rho = G - rho X G^T X - (1 - rho) X X^T G. Tangent at X
/// for every rho > 0; rho = 1 gives G - X G^T X.
Eigen::MatrixXd descent_direction(const StiefelPoint& x, const Eigen::MatrixXd& g,
                                  double rho);

/// ||G - X G^T X||_F, an upper bound on dist(0, dI_M(X) + G) for a gradient G.
double stationarity_residual(const StiefelPoint& x, const Eigen::MatrixXd& g);

}  // namespace oadmm
