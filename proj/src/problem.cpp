#include "oadmm/problem.hpp"

#include <Eigen/Dense>

namespace oadmm {

VectorizingIdentityMap::VectorizingIdentityMap(Eigen::Index n, Eigen::Index r)
    : n_(n), r_(r) {
  if (n < 1 || r < 1) throw DimensionMismatchError("VectorizingIdentityMap: dims must be >= 1");
}

Eigen::VectorXd VectorizingIdentityMap::apply(const Eigen::MatrixXd& x) const {
  if (x.rows() != n_ || x.cols() != r_) {
    throw DimensionMismatchError("VectorizingIdentityMap::apply: shape mismatch");
  }
  return Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
}

Eigen::MatrixXd VectorizingIdentityMap::adjoint(const Eigen::VectorXd& z) const {
  if (z.size() != n_ * r_) {
    throw DimensionMismatchError("VectorizingIdentityMap::adjoint: size mismatch");
  }
  return Eigen::Map<const Eigen::MatrixXd>(z.data(), n_, r_);
}

SparsePcaSmooth::SparsePcaSmooth(Eigen::MatrixXd data) : data_(std::move(data)) {
  if (data_.size() == 0) throw EmptyDataError("SparsePcaSmooth: empty data matrix");
  const double m_dot = static_cast<double>(data_.cols());
  const double op = data_.jacobiSvd().singularValues()(0);
  smoothness_ = 8.0 * op * op / m_dot;
  grad_bound_ = 2.0 * op * data_.norm() / m_dot;
}

double SparsePcaSmooth::value(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd residual = x * (x.transpose() * data_) - data_;
  return residual.squaredNorm() / (2.0 * data_.cols());
}

Eigen::MatrixXd SparsePcaSmooth::gradient(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd residual = x * (x.transpose() * data_) - data_;
  return (residual * (data_.transpose() * x) + data_ * (residual.transpose() * x)) /
         static_cast<double>(data_.cols());
}

void CompositeProblem::validate() const {
  if (!f || !g || !h || !a) throw ConfigInvalidError("CompositeProblem: missing part");
  if (n < 1 || r < 1 || r > n) throw DimensionMismatchError("CompositeProblem: need n >= r >= 1");
  if (a->input_rows() != n || a->input_cols() != r || a->output_dim() != m) {
    throw DimensionMismatchError("CompositeProblem: A dimensions disagree with (n, r, m)");
  }
}

double objective(const CompositeProblem& prob, const StiefelPoint& x) {
  if (x.rows() != prob.n || x.cols() != prob.r) {
    throw DimensionMismatchError("objective: X has wrong shape");
  }
  const Eigen::MatrixXd& xm = x.matrix();
  return prob.f->value(xm) - prob.g->evaluate(xm) + prob.h->evaluate(prob.a->apply(xm));
}

CompositeProblem make_sparse_pca(const Eigen::MatrixXd& data, double rho_dot,
                                 Eigen::Index k, Eigen::Index r) {
  if (data.size() == 0) throw EmptyDataError("make_sparse_pca: empty data matrix");
  const Eigen::Index n = data.rows();
  if (r < 1 || r > n) throw DimensionMismatchError("make_sparse_pca: need 1 <= r <= n");
  if (k < 1 || k > n * r) {
    throw KOutOfRangeError("make_sparse_pca: k outside [1, n r]");
  }
  CompositeProblem prob;
  prob.n = n;
  prob.r = r;
  prob.m = n * r;
  prob.f = std::make_shared<SparsePcaSmooth>(data);
  if (rho_dot > 0.0) {
    prob.g = std::make_shared<LargestKNorm>(rho_dot, k);
    prob.h = std::make_shared<ScaledL1>(rho_dot, prob.m);
  } else {
    prob.g = std::make_shared<ZeroSubgrad>();
    prob.h = std::make_shared<ZeroProx>();
  }
  prob.a = std::make_shared<VectorizingIdentityMap>(n, r);
  prob.validate();
  return prob;
}

}  // namespace oadmm
