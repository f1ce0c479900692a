#include <doctest.h>

#include <cmath>

#include "oadmm/prox.hpp"
#include "oadmm/rng.hpp"

using namespace oadmm;

namespace {

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

/// Test-local Huber form of the scalar l1 envelope (independent of the prox
/// path used by the implementation): lambda |v| - lambda^2 mu / 2 outside the
/// quadratic region |v| <= lambda mu, v^2 / (2 mu) inside.
double huber(double v, double lambda, double mu) {
  return (std::abs(v) <= lambda * mu) ? v * v / (2.0 * mu)
                                      : lambda * std::abs(v) - 0.5 * lambda * lambda * mu;
}

}  // namespace

TEST_CASE("moreau_value of |.| matches the analytic soft-threshold cases") {
  ScaledL1 h(1.0, 1);
  CHECK(moreau_value(h, 0.5, scalar(2.0)) == doctest::Approx(1.75));
  CHECK(moreau_value(h, 0.5, scalar(0.0)) == doctest::Approx(0.0));
  CHECK(moreau_value(h, 0.5, scalar(0.3)) == doctest::Approx(0.09));
}

TEST_CASE("moreau_value never exceeds h and rejects coarse smoothing") {
  MinimaxConcavePenalty h(1.0, 2.0, 3);  // W_h = 0.5, so mu must stay <= 1
  GaussianSampler rng(21);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd y = rng.vector(3);
    CHECK(moreau_value(h, 0.8, y) <= h.evaluate(y) + 1e-12);
  }
  CHECK_THROWS_AS(moreau_value(h, 1.01, scalar(1.0)), SmoothingTooCoarseError);
  CHECK_THROWS_AS(moreau_value(h, -0.1, scalar(1.0)), SmoothingTooCoarseError);
}

TEST_CASE("moreau_grad saturates at the subgradient scale") {
  ScaledL1 h(1.0, 1);
  CHECK(moreau_grad(h, 0.5, scalar(2.0))(0) == doctest::Approx(1.0));
  CHECK(moreau_grad(h, 0.5, scalar(0.0))(0) == doctest::Approx(0.0));
}

TEST_CASE("moreau_grad matches central differences of moreau_value") {
  GaussianSampler rng(22);
  ScaledL1 l1(1.3, 4);
  MinimaxConcavePenalty mcp(0.9, 2.5, 4);
  const ProxFunction* entries[] = {&l1, &mcp};
  const double step = 1e-6;
  for (const ProxFunction* h : entries) {
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd y = 2.0 * rng.vector(4);
      const double mu = 0.1 + 0.05 * rng.uniform01();
      Eigen::VectorXd grad = moreau_grad(*h, mu, y);
      Eigen::VectorXd fd(4);
      for (int i = 0; i < 4; ++i) {
        Eigen::VectorXd up = y, down = y;
        up(i) += step;
        down(i) -= step;
        fd(i) = (moreau_value(*h, mu, up) - moreau_value(*h, mu, down)) / (2.0 * step);
      }
      CHECK((grad - fd).norm() <= 1e-5 * std::max(1.0, grad.norm()));
    }
  }
}

TEST_CASE("moreau_grad is 1/mu Lipschitz") {
  GaussianSampler rng(23);
  ScaledL1 h(2.0, 5);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd a = rng.vector(5), b = rng.vector(5);
    const double mu = 0.05 + rng.uniform01();
    CHECK((moreau_grad(h, mu, a) - moreau_grad(h, mu, b)).norm() <=
          (a - b).norm() / mu + 1e-10);
  }
}

TEST_CASE("envelope value gap and gradient drift obey their mu bounds") {
  GaussianSampler rng(24);
  ScaledL1 l1(1.1, 4);
  MinimaxConcavePenalty mcp(1.4, 2.0, 4);
  const ProxFunction* entries[] = {&l1, &mcp};
  for (const ProxFunction* h : entries) {
    const double c_h = h->lipschitz();
    const double mu_cap = (h->weak_convexity() > 0.0) ? 0.5 / h->weak_convexity() : 1.5;
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::VectorXd y = 3.0 * rng.vector(4);
      const double mu1 = mu_cap * (0.2 + 0.8 * rng.uniform01());
      const double mu2 = mu1 * (0.05 + 0.9 * rng.uniform01());
      const double gap = moreau_value(*h, mu2, y) - moreau_value(*h, mu1, y);
      CHECK(gap >= -1e-9);
      CHECK(gap <= std::min(mu1 / (2.0 * mu2), 1.0) * (mu1 - mu2) * c_h * c_h + 1e-9);
      const double drift = (moreau_grad(*h, mu1, y) - moreau_grad(*h, mu2, y)).norm();
      CHECK(drift <= (mu1 / mu2 - 1.0) * c_h + 1e-9);
    }
  }
}

TEST_CASE("prox moves by at most mu C_h and is first-order optimal") {
  GaussianSampler rng(25);
  ScaledL1 l1(1.0, 4);
  MinimaxConcavePenalty mcp(1.0, 2.0, 4);
  const ProxFunction* entries[] = {&l1, &mcp};
  for (const ProxFunction* h : entries) {
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd y = 3.0 * rng.vector(4);
      const double mu = 0.05 + 0.4 * rng.uniform01();
      Eigen::VectorXd p = h->prox(y, mu);
      CHECK((y - p).norm() <= mu * h->lipschitz() + 1e-12);
      // 0 in dh(p) + (p - y)/mu
      CHECK(h->subdiff_dist(p, (y - p) / mu) <= 1e-10);
    }
  }
}

TEST_CASE("y_subproblem closed form matches its worked example") {
  ScaledL1 h(1.0, 1);
  YSubproblemSolution sol = y_subproblem(h, 0.1, 20.0, scalar(1.0));
  CHECK(sol.y_breve(0) == doctest::Approx(0.85));
  CHECK(sol.y_bar(0) == doctest::Approx(0.95));
}

TEST_CASE("y_subproblem is stationary, symmetric at zero, and rejects small beta") {
  ScaledL1 h(1.0, 3);
  CHECK_THROWS_AS(y_subproblem(h, 0.1, 9.0, Eigen::VectorXd::Zero(3)), BetaTooSmallError);

  YSubproblemSolution at_zero = y_subproblem(h, 0.1, 20.0, Eigen::VectorXd::Zero(3));
  CHECK(at_zero.y_bar.norm() == doctest::Approx(0.0));
  CHECK(at_zero.y_breve.norm() == doctest::Approx(0.0));

  GaussianSampler rng(26);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd b = 2.0 * rng.vector(3);
    const double mu = 0.02 + 0.2 * rng.uniform01();
    const double beta = (1.0 / mu) * (1.5 + 3.0 * rng.uniform01());
    YSubproblemSolution sol = y_subproblem(h, mu, beta, b);
    // grad h_mu(y_bar) + beta (y_bar - b) = 0
    CHECK((moreau_grad(h, mu, sol.y_bar) + beta * (sol.y_bar - b)).norm() <= 1e-8);
    // beta (b - y_bar) lands in dh(y_breve)
    CHECK(h.subdiff_dist(sol.y_breve, beta * (b - sol.y_bar)) <= 1e-8);
    // the half-iterates stay mu C_h close
    CHECK((sol.y_bar - sol.y_breve).norm() <= mu * h.lipschitz() + 1e-12);
  }
}

TEST_CASE("y_subproblem minimizes against a 1-D grid with bisection refinement") {
  ScaledL1 h(1.0, 1);
  GaussianSampler rng(27);
  for (int trial = 0; trial < 50; ++trial) {
    const double b = 4.0 * (rng.uniform01() - 0.5);
    const double mu = 0.05 + 0.2 * rng.uniform01();
    const double beta = (1.0 / mu) * (1.2 + 2.0 * rng.uniform01());
    YSubproblemSolution sol = y_subproblem(h, mu, beta, scalar(b));

    auto envelope_grad = [&](double v) {  // Huber derivative, test-local
      return (std::abs(v) <= mu) ? v / mu : (v > 0 ? 1.0 : -1.0);
    };
    auto total = [&](double v) { return huber(v, 1.0, mu) + 0.5 * beta * (v - b) * (v - b); };

    double lo = std::min(0.0, b) - 1.0, hi = std::max(0.0, b) + 1.0;
    double best = lo, best_val = total(lo);
    for (double v = lo; v <= hi; v += 1e-4) {
      const double val = total(v);
      if (val < best_val) {
        best_val = val;
        best = v;
      }
    }
    double a = best - 2e-4, c = best + 2e-4;
    for (int iter = 0; iter < 100; ++iter) {
      const double mid = 0.5 * (a + c);
      if (envelope_grad(mid) + beta * (mid - b) > 0.0) {
        c = mid;
      } else {
        a = mid;
      }
    }
    CHECK(std::abs(sol.y_bar(0) - 0.5 * (a + c)) <= 1e-6);
  }
}

TEST_CASE("l1_prox soft-thresholds and matches a per-coordinate grid search") {
  CHECK(l1_prox(scalar(3.0), 1.0)(0) == doctest::Approx(2.0));
  CHECK(l1_prox(scalar(-0.5), 1.0)(0) == doctest::Approx(0.0));

  GaussianSampler rng(28);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd y = 3.0 * rng.vector(3);
    const double lambda = 0.2 + rng.uniform01();
    Eigen::VectorXd out = l1_prox(y, lambda);
    for (int i = 0; i < 3; ++i) {
      double best = 0.0, best_val = 0.5 * y(i) * y(i);
      for (double u = -5.0; u <= 5.0; u += 1e-4) {
        const double val = 0.5 * (u - y(i)) * (u - y(i)) + lambda * std::abs(u);
        if (val < best_val) {
          best_val = val;
          best = u;
        }
      }
      CHECK(std::abs(out(i) - best) <= 1e-4);
      const double impl_val =
          0.5 * (out(i) - y(i)) * (out(i) - y(i)) + lambda * std::abs(out(i));
      CHECK(impl_val <= best_val + 1e-8);
    }
  }
}

TEST_CASE("MCP prox minimizes its subproblem against a grid") {
  MinimaxConcavePenalty h(1.2, 2.0, 1);
  auto phi = [&](double t) {
    const double at = std::abs(t);
    return (at <= 2.0 * 1.2) ? 1.2 * at - t * t / 4.0 : 0.5 * 2.0 * 1.2 * 1.2;
  };
  GaussianSampler rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    const double y = 5.0 * (rng.uniform01() - 0.5);
    const double mu = 0.1 + 0.8 * rng.uniform01();  // stays below a/2 = 1
    const double p = h.prox(scalar(y), mu)(0);
    const double p_val = phi(p) + (p - y) * (p - y) / (2.0 * mu);
    for (double u = -6.0; u <= 6.0; u += 1e-4) {
      CHECK(p_val <= phi(u) + (u - y) * (u - y) / (2.0 * mu) + 1e-7);
    }
  }
}

TEST_CASE("largest_k_value selects the top magnitudes") {
  Eigen::MatrixXd x(1, 3);
  x << 3.0, -1.0, 2.0;
  CHECK(largest_k_value(x, 2) == doctest::Approx(5.0));
  CHECK(largest_k_value(x, 3) == doctest::Approx(x.cwiseAbs().sum()));
  CHECK_THROWS_AS(largest_k_value(x, 0), KOutOfRangeError);
  CHECK_THROWS_AS(largest_k_value(x, 4), KOutOfRangeError);
}

TEST_CASE("largest_k_value equals the full sort oracle") {
  GaussianSampler rng(30);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd x = rng.matrix(4, 3);
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng.uniform01() * 11.99);
    std::vector<double> magnitudes(x.data(), x.data() + x.size());
    for (double& v : magnitudes) v = std::abs(v);
    std::sort(magnitudes.rbegin(), magnitudes.rend());
    double expected = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) expected += magnitudes[i];
    CHECK(largest_k_value(x, k) == doctest::Approx(expected));
  }
}

TEST_CASE("largest_k_subgradient marks signs at selected entries") {
  Eigen::MatrixXd x(1, 3);
  x << 3.0, -1.0, 2.0;
  Eigen::MatrixXd sub = largest_k_subgradient(x, 2);
  CHECK(sub(0, 0) == 1.0);
  CHECK(sub(0, 1) == 0.0);
  CHECK(sub(0, 2) == 1.0);

  Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(2, 2);
  CHECK(largest_k_subgradient(zeros, 3).norm() == 0.0);
}

TEST_CASE("largest_k_subgradient satisfies the convexity inequality") {
  GaussianSampler rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd x = rng.matrix(3, 3);
    const Eigen::Index k = 4;
    Eigen::MatrixXd sub = largest_k_subgradient(x, k);
    CHECK(sub.cwiseProduct(x).sum() == doctest::Approx(largest_k_value(x, k)));
    for (int probe = 0; probe < 100; ++probe) {
      Eigen::MatrixXd other = rng.matrix(3, 3);
      CHECK(largest_k_value(other, k) >=
            largest_k_value(x, k) + sub.cwiseProduct(other - x).sum() - 1e-10);
    }
  }
}

TEST_CASE("l1_subdiff_dist handles active and inactive coordinates") {
  CHECK(l1_subdiff_dist(scalar(1.0), scalar(0.7), 0.7) == doctest::Approx(0.0));
  CHECK(l1_subdiff_dist(scalar(0.0), scalar(0.35), 0.7) == doctest::Approx(0.0));
  CHECK(l1_subdiff_dist(scalar(0.0), scalar(1.0), 0.7) == doctest::Approx(0.3));
}

TEST_CASE("l1_subdiff_dist equals the interval-projection oracle") {
  GaussianSampler rng(32);
  const double lambda = 0.8;
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd y = rng.vector(5);
    Eigen::VectorXd z = rng.vector(5);
    for (int i = 0; i < 5; ++i) {
      if (rng.uniform01() < 0.4) y(i) = 0.0;
    }
    double expected_sq = 0.0;
    for (int i = 0; i < 5; ++i) {
      double nearest;
      if (y(i) != 0.0) {
        nearest = lambda * (y(i) > 0 ? 1.0 : -1.0);
      } else {
        nearest = std::clamp(z(i), -lambda, lambda);
      }
      expected_sq += (z(i) - nearest) * (z(i) - nearest);
    }
    CHECK(l1_subdiff_dist(y, z, lambda) ==
          doctest::Approx(std::sqrt(expected_sq)).epsilon(1e-12));
  }
}

TEST_CASE("subgradient selections are bounded by the Lipschitz constants") {
  GaussianSampler rng(33);
  LargestKNorm g(2.0, 5);
  ScaledL1 h(1.5, 6);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd x = rng.matrix(3, 4);
    CHECK(g.subgradient(x).norm() <= g.lipschitz() + 1e-12);
    Eigen::VectorXd y = rng.vector(6);
    CHECK(h.subgradient(y).norm() <= h.lipschitz() + 1e-12);
  }
}
