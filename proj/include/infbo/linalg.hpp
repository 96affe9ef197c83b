#pragma once

#include <Eigen/Dense>
#include <vector>

#include "infbo/rng.hpp"

namespace infbo {

// Lower-triangular factor of a (possibly jittered) symmetric matrix.
// lower * lower^T reproduces the jittered input; jitter_used records the
// diagonal inflation that was required.
struct CholeskyFactor {
  Eigen::MatrixXd lower;
  double jitter_used = 0.0;

  Eigen::Index dim() const { return lower.rows(); }

  // Solve (L L^T) x = b via two triangular solves.
  template <typename Derived>
  typename Derived::PlainObject solve(const Eigen::MatrixBase<Derived>& b) const {
    typename Derived::PlainObject y =
        lower.template triangularView<Eigen::Lower>().solve(b.derived());
    return lower.transpose().template triangularView<Eigen::Upper>().solve(y);
  }

  // Solve L x = b only (useful for quadratic forms: |L^{-1}b|^2 = b^T A^{-1} b).
  template <typename Derived>
  typename Derived::PlainObject forward_solve(const Eigen::MatrixBase<Derived>& b) const {
    return lower.template triangularView<Eigen::Lower>().solve(b.derived());
  }

  double log_det() const;  // of the factored (jittered) matrix
};

bool is_symmetric(const Eigen::MatrixXd& m, double rel_tol = 1e-12);

// Factor m + jitter*I where jitter is the smallest of
// {0, base_jitter, 10*base_jitter, ..., 1e6*base_jitter} that succeeds.
// Throws FactorizationFailure when the whole escalation fails.
CholeskyFactor cholesky_jittered(const Eigen::MatrixXd& m, double base_jitter);

// base_jitter default used by the model code: 1e-8 * mean(diag(m)).
CholeskyFactor cholesky_default_jitter(const Eigen::MatrixXd& m);

// Gaussian conditioning of the unobserved block given observed coordinates.
// Returns the conditional mean and covariance of the complement of
// observed_idx, in ascending index order. This is the dense oracle every
// kriging path is checked against.
struct Conditional {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};
Conditional mvn_condition(const Eigen::MatrixXd& joint_cov,
                          const Eigen::VectorXd& joint_mean,
                          const std::vector<int>& observed_idx,
                          const Eigen::VectorXd& observed_vals);

// mean + L*z with z iid standard normal; deterministic given the stream.
Eigen::VectorXd mvn_sample(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                           RngStream& rng);
Eigen::VectorXd mvn_sample(const Eigen::VectorXd& mean, const CholeskyFactor& chol,
                           RngStream& rng);

}  // namespace infbo
