#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace oadmm {

/// Seeded standard-normal sampler with a pinned Box-Muller transform.
///
/// std::normal_distribution is not specified bit-exactly by the standard, so
/// reproducible data generation goes through this class instead. Given the
/// same seed, the stream of samples is identical on every run.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0,1], u2 in [0,1).
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd out(rows, cols);
    // Row-major fill so the sample order matches the written CSV layout.
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = next();
    return out;
  }

  Eigen::VectorXd vector(Eigen::Index size) {
    Eigen::VectorXd out(size);
    for (Eigen::Index i = 0; i < size; ++i) out(i) = next();
    return out;
  }

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace oadmm
