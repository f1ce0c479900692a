#include "oadmm/stiefel.hpp"

#include <Eigen/Dense>

namespace oadmm {

namespace {

void require_same_shape(const StiefelPoint& x, const Eigen::MatrixXd& delta,
                        const char* what) {
  if (delta.rows() != x.rows() || delta.cols() != x.cols()) {
    throw ShapeMismatchError(std::string(what) + ": expected " +
                             std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                             ", got " + std::to_string(delta.rows()) + "x" +
                             std::to_string(delta.cols()));
  }
}

}  // namespace

StiefelPoint::StiefelPoint(Eigen::MatrixXd data) : data_(std::move(data)) {
  if (data_.rows() < data_.cols() || data_.cols() < 1) {
    throw ShapeMismatchError("StiefelPoint requires n >= r >= 1, got " +
                             std::to_string(data_.rows()) + "x" +
                             std::to_string(data_.cols()));
  }
  const double err = feasibility_error(data_);
  if (!(err <= kFeasTol)) {
    throw NumericalError("StiefelPoint: ||X^T X - I||_F = " + std::to_string(err) +
                         " exceeds " + std::to_string(kFeasTol));
  }
}

double StiefelPoint::feasibility_error(const Eigen::MatrixXd& candidate) {
  const Eigen::Index r = candidate.cols();
  Eigen::MatrixXd gram = candidate.transpose() * candidate;
  gram -= Eigen::MatrixXd::Identity(r, r);
  return gram.norm();
}

TangentVector::TangentVector(const StiefelPoint& base, Eigen::MatrixXd data)
    : base_(base), data_(std::move(data)) {
  require_same_shape(base_, data_, "TangentVector");
  Eigen::MatrixXd sym = base_.matrix().transpose() * data_;
  sym += sym.transpose().eval();
  const double err = sym.norm();
  if (!(err <= 1e-8 * std::max(1.0, data_.norm()))) {
    throw NumericalError("TangentVector: ||X^T D + D^T X||_F = " +
                         std::to_string(err) + " is not tangent at the base point");
  }
}

StiefelPoint project_to_stiefel(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-12 * sv(0)) {
    throw RankDeficientError("project_to_stiefel: input is (numerically) rank deficient");
  }
  return StiefelPoint(svd.matrixU() * svd.matrixV().transpose());
}

TangentVector tangent_project(const StiefelPoint& x, const Eigen::MatrixXd& delta) {
  require_same_shape(x, delta, "tangent_project");
  Eigen::MatrixXd sym = delta.transpose() * x.matrix();
  sym += x.matrix().transpose() * delta;
  return TangentVector(x, delta - 0.5 * x.matrix() * sym);
}

StiefelPoint polar_retraction(const StiefelPoint& x, const TangentVector& delta) {
  require_same_shape(x, delta.matrix(), "polar_retraction");
  if (delta.matrix().isZero(0.0)) return x;  // Retr_X(0) = X, bit-exact
  Eigen::MatrixXd shifted = x.matrix() + delta.matrix();
  Eigen::MatrixXd gram = shifted.transpose() * shifted;  // = I + D^T D for tangent D
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  Eigen::MatrixXd inv_sqrt = eig.eigenvectors() *
                             eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                             eig.eigenvectors().transpose();
  return StiefelPoint(shifted * inv_sqrt);
}

StiefelPoint qr_retraction(const StiefelPoint& x, const TangentVector& delta) {
  require_same_shape(x, delta.matrix(), "qr_retraction");
  if (delta.matrix().isZero(0.0)) return x;
  const Eigen::Index n = x.rows(), r = x.cols();
  Eigen::MatrixXd shifted = x.matrix() + delta.matrix();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(shifted);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
  Eigen::VectorXd diag = qr.matrixQR().topLeftCorner(r, r).diagonal();
  const double dmax = diag.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < r; ++j) {
    if (std::abs(diag(j)) <= 1e-12 * dmax) {
      throw RankDeficientError("qr_retraction: X + Delta is rank deficient");
    }
    if (diag(j) < 0.0) q.col(j) = -q.col(j);  // positive-diagonal convention
  }
  return StiefelPoint(std::move(q));
}

Eigen::MatrixXd descent_direction(const StiefelPoint& x, const Eigen::MatrixXd& g,
                                  double rho) {
  require_same_shape(x, g, "descent_direction");
  if (!(rho > 0.0)) {
    throw ConfigInvalidError("descent_direction: rho must be positive");
  }
  const Eigen::MatrixXd& xm = x.matrix();
  return g - rho * xm * (g.transpose() * xm) - (1.0 - rho) * xm * (xm.transpose() * g);
}

double stationarity_residual(const StiefelPoint& x, const Eigen::MatrixXd& g) {
  require_same_shape(x, g, "stationarity_residual");
  return (g - x.matrix() * (g.transpose() * x.matrix())).norm();
}

}  // namespace oadmm
