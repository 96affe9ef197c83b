#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "infbo/distributions.hpp"
#include "infbo/errors.hpp"
#include "infbo/linalg.hpp"

using namespace infbo;

namespace {

Eigen::MatrixXd random_spd(int n, RngStream& rng, double ridge = 1.0) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = sample_normal(0.0, 1.0, rng);
  Eigen::MatrixXd m = a * a.transpose();
  m.diagonal().array() += ridge;
  return m;
}

}  // namespace

TEST_CASE("cholesky of a 1x1 matrix is the scalar square root") {
  Eigen::MatrixXd m(1, 1);
  m << 4.0;
  const CholeskyFactor f = cholesky_jittered(m, 0.0);
  CHECK(f.lower(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(f.jitter_used == 0.0);
}

TEST_CASE("cholesky of the identity is the identity") {
  const CholeskyFactor f = cholesky_jittered(Eigen::MatrixXd::Identity(2, 2), 1e-8);
  CHECK((f.lower - Eigen::MatrixXd::Identity(2, 2)).norm() == doctest::Approx(0.0));
  CHECK(f.jitter_used == 0.0);
}

TEST_CASE("random SPD factorization reconstructs the input") {
  RngStream rng(512);
  const Eigen::MatrixXd m = random_spd(5, rng);
  const CholeskyFactor f = cholesky_jittered(m, 1e-8);
  CHECK((f.lower * f.lower.transpose() - m).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("indefinite matrix exhausts the jitter escalation") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
  CHECK_THROWS_AS(cholesky_jittered(m, 1e-8), FactorizationFailure);
  CHECK_THROWS_AS(cholesky_jittered(m, 0.0), FactorizationFailure);
}

TEST_CASE("near-singular matrix succeeds through jitter and records it") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 1.0, 1.0, 1.0;
  const CholeskyFactor f = cholesky_jittered(m, 1e-8);
  CHECK(f.jitter_used > 0.0);
  CHECK((f.lower * f.lower.transpose() -
         (m + f.jitter_used * Eigen::MatrixXd::Identity(2, 2)))
            .cwiseAbs()
            .maxCoeff() < 1e-8);
}

TEST_CASE("conditioning on a perfectly correlated duplicate") {
  Eigen::MatrixXd cov(2, 2);
  cov << 1.0, 1.0, 1.0, 1.0;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd obs(1);
  obs << 0.7;
  const Conditional c = mvn_condition(cov, mean, {0}, obs);
  CHECK(c.mean[0] == doctest::Approx(0.7).epsilon(1e-8));
  CHECK(std::abs(c.cov(0, 0)) < 1e-6);
}

TEST_CASE("zero cross-correlation leaves the marginal untouched") {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(3, 3);
  cov(0, 0) = 2.5;
  Eigen::VectorXd mean(3);
  mean << -1.0, 0.5, 2.0;
  Eigen::VectorXd obs(2);
  obs << 9.0, -9.0;
  const Conditional c = mvn_condition(cov, mean, {1, 2}, obs);
  CHECK(c.mean[0] == doctest::Approx(-1.0));
  CHECK(c.cov(0, 0) == doctest::Approx(2.5));
}

TEST_CASE("conditioning matches the explicit-inverse formula") {
  RngStream rng(64);
  const Eigen::MatrixXd cov = random_spd(4, rng);
  Eigen::VectorXd mean(4);
  for (int i = 0; i < 4; ++i) mean[i] = sample_normal(0.0, 1.0, rng);
  Eigen::VectorXd obs(2);
  obs << 0.4, -1.2;
  const std::vector<int> oidx = {1, 3};
  const Conditional c = mvn_condition(cov, mean, oidx, obs);

  Eigen::MatrixXd s11(2, 2), s21(2, 2), s22(2, 2);
  Eigen::VectorXd mu1(2), mu2(2);
  const std::vector<int> pidx = {0, 2};
  for (int a = 0; a < 2; ++a) {
    mu1[a] = mean[oidx[a]];
    mu2[a] = mean[pidx[a]];
    for (int b = 0; b < 2; ++b) {
      s11(a, b) = cov(oidx[a], oidx[b]);
      s21(a, b) = cov(pidx[a], oidx[b]);
      s22(a, b) = cov(pidx[a], pidx[b]);
    }
  }
  const Eigen::MatrixXd s11_inv = s11.inverse();
  const Eigen::VectorXd mean_ref = mu2 + s21 * s11_inv * (obs - mu1);
  const Eigen::MatrixXd cov_ref = s22 - s21 * s11_inv * s21.transpose();
  CHECK((c.mean - mean_ref).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((c.cov - cov_ref).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("conditional covariance stays PSD with shrunken diagonal") {
  RngStream rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const int dim = 2 + static_cast<int>(rng.uniform01() * 7);  // up to 8
    const Eigen::MatrixXd cov = random_spd(dim, rng, 0.5);
    const Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    const int nobs = 1 + static_cast<int>(rng.uniform01() * (dim - 1));
    std::vector<int> oidx;
    for (int i = 0; i < nobs; ++i) oidx.push_back(i);
    Eigen::VectorXd obs(nobs);
    for (int i = 0; i < nobs; ++i) obs[i] = sample_normal(0.0, 1.0, rng);

    const Conditional c = mvn_condition(cov, mean, oidx, obs);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.cov);
    CHECK(es.eigenvalues().minCoeff() > -1e-8 * std::max(c.cov.trace(), 1.0));
    for (int i = 0; i < c.cov.rows(); ++i)
      CHECK(c.cov(i, i) <= cov(nobs + i, nobs + i) + 1e-10);

    // Cross-check against the dense inverse on every trial.
    Eigen::MatrixXd s11 = cov.topLeftCorner(nobs, nobs);
    Eigen::MatrixXd s21 = cov.bottomLeftCorner(dim - nobs, nobs);
    Eigen::MatrixXd s22 = cov.bottomRightCorner(dim - nobs, dim - nobs);
    const Eigen::MatrixXd ref_cov = s22 - s21 * s11.inverse() * s21.transpose();
    const Eigen::VectorXd ref_mean = s21 * s11.inverse() * obs;
    CHECK((c.cov - ref_cov).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((c.mean - ref_mean).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("mvn_sample with zero covariance returns the mean exactly") {
  RngStream rng(9);
  Eigen::VectorXd mean(3);
  mean << 1.0, -2.0, 0.25;
  const Eigen::VectorXd draw = mvn_sample(mean, Eigen::MatrixXd::Zero(3, 3), rng);
  CHECK((draw - mean).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mvn_sample empirical mean obeys the CLT bound") {
  RngStream rng(2718);
  const int n = 10000;
  Eigen::Vector2d acc = Eigen::Vector2d::Zero();
  for (int i = 0; i < n; ++i)
    acc += mvn_sample(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2), rng);
  for (int k = 0; k < 2; ++k) CHECK(std::abs(acc[k] / n) < 4.0 / std::sqrt(n));
}

TEST_CASE("mvn_sample is deterministic under a fixed seed") {
  RngStream rng1(31), rng2(31);
  Eigen::MatrixXd cov(2, 2);
  cov << 2.0, 0.3, 0.3, 1.0;
  Eigen::VectorXd mean(2);
  mean << 5.0, -5.0;
  const Eigen::VectorXd a = mvn_sample(mean, cov, rng1);
  const Eigen::VectorXd b = mvn_sample(mean, cov, rng2);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("is_symmetric tolerates rounding but flags real asymmetry") {
  RngStream rng(4);
  Eigen::MatrixXd m = random_spd(4, rng);
  CHECK(is_symmetric(m));
  m(0, 1) += 1e-6;
  CHECK_FALSE(is_symmetric(m));
}
