#include "oadmm/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace oadmm {

namespace {

double sign(double v) { return (v > 0.0) - (v < 0.0); }

void check_envelope_mu(const ProxFunction& h, double mu) {
  if (!(mu > 0.0)) throw SmoothingTooCoarseError("mu must be positive");
  const double wh = h.weak_convexity();
  if (wh > 0.0 && mu > 1.0 / (2.0 * wh)) {
    throw SmoothingTooCoarseError("mu = " + std::to_string(mu) +
                                  " exceeds 1/(2 W_h) = " + std::to_string(0.5 / wh));
  }
}

/// Row-major linear indices of the k largest-magnitude entries, ties broken
/// by ascending index. Deterministic regardless of the sort implementation
/// because (|value|, index) pairs are totally ordered.
std::vector<Eigen::Index> largest_k_indices(const Eigen::MatrixXd& x, Eigen::Index k) {
  const Eigen::Index total = x.size();
  if (k < 1 || k > total) {
    throw KOutOfRangeError("k = " + std::to_string(k) + " outside [1, " +
                           std::to_string(total) + "]");
  }
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(total));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  const Eigen::Index cols = x.cols();
  auto abs_at = [&](Eigen::Index i) { return std::abs(x(i / cols, i % cols)); };
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                    [&](Eigen::Index a, Eigen::Index b) {
                      const double va = abs_at(a), vb = abs_at(b);
                      if (va != vb) return va > vb;
                      return a < b;
                    });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

}  // namespace

double ProxFunction::subdiff_dist(const Eigen::VectorXd&, const Eigen::VectorXd&) const {
  throw MissingCanonicalElementError("this ProxFunction has no exact subdifferential distance");
}

// --- ScaledL1 --------------------------------------------------------------

ScaledL1::ScaledL1(double lambda, Eigen::Index dim) : lambda_(lambda) {
  if (!(lambda > 0.0)) throw ConfigInvalidError("ScaledL1: lambda must be positive");
  if (dim < 1) throw ConfigInvalidError("ScaledL1: dim must be >= 1");
  // ||lambda sign(y)|| <= lambda sqrt(dim) is the l2 Lipschitz bound.
  lipschitz_ = lambda * std::sqrt(static_cast<double>(dim));
}

double ScaledL1::evaluate(const Eigen::VectorXd& y) const {
  return lambda_ * y.lpNorm<1>();
}

Eigen::VectorXd ScaledL1::prox(const Eigen::VectorXd& y, double mu) const {
  if (!(mu > 0.0)) throw SmoothingTooCoarseError("prox step must be positive");
  return l1_prox(y, lambda_ * mu);
}

Eigen::VectorXd ScaledL1::subgradient(const Eigen::VectorXd& y) const {
  return y.unaryExpr([this](double v) { return lambda_ * sign(v); });
}

double ScaledL1::subdiff_dist(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const {
  return l1_subdiff_dist(y, z, lambda_);
}

// --- MinimaxConcavePenalty --------------------------------------------------

MinimaxConcavePenalty::MinimaxConcavePenalty(double lambda, double a, Eigen::Index dim)
    : lambda_(lambda), a_(a) {
  if (!(lambda > 0.0) || !(a > 0.0)) {
    throw ConfigInvalidError("MinimaxConcavePenalty: lambda and a must be positive");
  }
  if (dim < 1) throw ConfigInvalidError("MinimaxConcavePenalty: dim must be >= 1");
  lipschitz_ = lambda * std::sqrt(static_cast<double>(dim));
}

double MinimaxConcavePenalty::evaluate(const Eigen::VectorXd& y) const {
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double t = std::abs(y(i));
    total += (t <= a_ * lambda_) ? lambda_ * t - t * t / (2.0 * a_)
                                 : 0.5 * a_ * lambda_ * lambda_;
  }
  return total;
}

Eigen::VectorXd MinimaxConcavePenalty::prox(const Eigen::VectorXd& y, double mu) const {
  if (!(mu > 0.0)) throw SmoothingTooCoarseError("prox step must be positive");
  if (!(mu < a_)) {
    throw SmoothingTooCoarseError("MCP prox is single-valued only for mu < a");
  }
  Eigen::VectorXd out(y.size());
  const double shrink = 1.0 - mu / a_;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double v = y(i), t = std::abs(v);
    if (t <= lambda_ * mu) {
      out(i) = 0.0;
    } else if (t <= a_ * lambda_) {
      out(i) = sign(v) * (t - lambda_ * mu) / shrink;
    } else {
      out(i) = v;
    }
  }
  return out;
}

Eigen::VectorXd MinimaxConcavePenalty::subgradient(const Eigen::VectorXd& y) const {
  Eigen::VectorXd out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double v = y(i), t = std::abs(v);
    out(i) = (t < a_ * lambda_) ? lambda_ * sign(v) - v / a_ : 0.0;
  }
  return out;
}

double MinimaxConcavePenalty::subdiff_dist(const Eigen::VectorXd& y,
                                           const Eigen::VectorXd& z) const {
  double sq = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double t = y(i);
    double gap;
    if (t == 0.0) {
      gap = std::max(std::abs(z(i)) - lambda_, 0.0);  // dphi(0) = [-lambda, lambda]
    } else {
      const double d = (std::abs(t) < a_ * lambda_) ? lambda_ * sign(t) - t / a_ : 0.0;
      gap = std::abs(z(i) - d);
    }
    sq += gap * gap;
  }
  return std::sqrt(sq);
}

// --- LargestKNorm ------------------------------------------------------------

LargestKNorm::LargestKNorm(double rho, Eigen::Index k) : rho_(rho), k_(k) {
  if (!(rho > 0.0)) throw ConfigInvalidError("LargestKNorm: rho must be positive");
  if (k < 1) throw KOutOfRangeError("LargestKNorm: k must be >= 1");
}

double LargestKNorm::evaluate(const Eigen::MatrixXd& x) const {
  return rho_ * largest_k_value(x, k_);
}

Eigen::MatrixXd LargestKNorm::subgradient(const Eigen::MatrixXd& x) const {
  return rho_ * largest_k_subgradient(x, k_);
}

double LargestKNorm::lipschitz() const {
  return rho_ * std::sqrt(static_cast<double>(k_));
}

// --- Envelope operations -----------------------------------------------------

double moreau_value(const ProxFunction& h, double mu, const Eigen::VectorXd& y) {
  check_envelope_mu(h, mu);
  const Eigen::VectorXd p = h.prox(y, mu);
  return h.evaluate(p) + (p - y).squaredNorm() / (2.0 * mu);
}

Eigen::VectorXd moreau_grad(const ProxFunction& h, double mu, const Eigen::VectorXd& y) {
  check_envelope_mu(h, mu);
  return (y - h.prox(y, mu)) / mu;
}

YSubproblemSolution y_subproblem(const ProxFunction& h, double mu, double beta,
                                 const Eigen::VectorXd& b) {
  check_envelope_mu(h, mu);
  if (!(beta > 1.0 / mu)) {
    throw BetaTooSmallError("y_subproblem requires beta > 1/mu (beta = " +
                            std::to_string(beta) + ", 1/mu = " + std::to_string(1.0 / mu) +
                            ")");
  }
  YSubproblemSolution out;
  out.y_breve = h.prox(b, mu + 1.0 / beta);
  out.y_bar = (out.y_breve + mu * beta * b) / (1.0 + mu * beta);
  return out;
}

// --- Free helpers -------------------------------------------------------------

Eigen::VectorXd l1_prox(const Eigen::VectorXd& y, double lambda) {
  if (!(lambda > 0.0)) throw ConfigInvalidError("l1_prox: lambda must be positive");
  return y.unaryExpr([lambda](double v) {
    return sign(v) * std::max(std::abs(v) - lambda, 0.0);
  });
}

double largest_k_value(const Eigen::MatrixXd& x, Eigen::Index k) {
  const auto idx = largest_k_indices(x, k);
  const Eigen::Index cols = x.cols();
  double total = 0.0;
  for (Eigen::Index i : idx) total += std::abs(x(i / cols, i % cols));
  return total;
}

Eigen::MatrixXd largest_k_subgradient(const Eigen::MatrixXd& x, Eigen::Index k) {
  const auto idx = largest_k_indices(x, k);
  const Eigen::Index cols = x.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  for (Eigen::Index i : idx) {
    out(i / cols, i % cols) = sign(x(i / cols, i % cols));  // 0 for selected zeros
  }
  return out;
}

double l1_subdiff_dist(const Eigen::VectorXd& y, const Eigen::VectorXd& z, double lambda) {
  if (!(lambda > 0.0)) throw ConfigInvalidError("l1_subdiff_dist: lambda must be positive");
  if (y.size() != z.size()) throw ShapeMismatchError("l1_subdiff_dist: size mismatch");
  double sq = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double gap = (y(i) != 0.0) ? std::abs(z(i) - lambda * sign(y(i)))
                                     : std::max(std::abs(z(i)) - lambda, 0.0);
    sq += gap * gap;
  }
  return std::sqrt(sq);
}

}  // namespace oadmm
