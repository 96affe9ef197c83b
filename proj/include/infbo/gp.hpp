#pragma once

#include <Eigen/Dense>

#include "infbo/history.hpp"
#include "infbo/linalg.hpp"
#include "infbo/rng.hpp"

namespace infbo {

// Anisotropic squared-exponential kernel
//   k(x, x') = sigma2 * exp(-sum_k phi[k] * (x_k - x'_k)^2),
// with each length-scale parameter constrained to (0, b_phi].
struct KernelParams {
  double sigma2 = 1.0;
  Eigen::VectorXd phi;  // length d
  double b_phi = 1.0;

  void validate() const;
};

// m x k matrix of kernel values between the rows of a and b.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                              const KernelParams& kp);

// Correlation-only version (sigma2 factored out); used where the signal
// variance cancels or is applied separately.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                   const Eigen::VectorXd& phi);

// Factored training-set correlation, shared by every surface of one Gibbs
// state: all surfaces condition on the same inputs with the same kernel.
struct KrigingContext {
  Eigen::MatrixXd train;    // n x d
  KernelParams kp;
  Eigen::MatrixXd rho;      // correlation over train
  CholeskyFactor rho_chol;  // factor of rho (+ jitter)

  static KrigingContext build(const Eigen::MatrixXd& train, const KernelParams& kp);
};

struct KrigingResult {
  Eigen::VectorXd mean;  // length m
  Eigen::MatrixXd cov;   // m x m joint posterior covariance
};

// Noiseless GP conditioning of one surface on its values at the training
// inputs, evaluated jointly over the query rows.
KrigingResult kriging(const KrigingContext& ctx, const Eigen::VectorXd& surface_vals,
                      const Eigen::MatrixXd& query);

// Convenience overload that builds the context internally.
KrigingResult kriging(const Eigen::VectorXd& surface_vals, const Eigen::MatrixXd& train,
                      const Eigen::MatrixXd& query, const KernelParams& kp);

// Classical GP surrogate fitted on noisy rewards: covariance
// sigma2*rho + tau2*I over the training set, zero prior mean on centered
// targets.
struct GpPosterior {
  Eigen::MatrixXd train;
  KernelParams kp;
  double tau2 = 0.0;
  double y_center = 0.0;
  CholeskyFactor chol;    // factor of sigma2*rho + tau2*I
  Eigen::VectorXd alpha;  // (K + tau2 I)^{-1} (y - y_center)

  // Latent posterior over the query rows (observation noise excluded from
  // the covariance).
  KrigingResult predict(const Eigen::MatrixXd& query) const;
};

struct GpPriors {
  double a_tau = 2.0, b_tau = 1.0;
  double a_sigma = 2.0, b_sigma = 1.0;
  double b_phi = 1.0;
};

struct BaselineFit {
  GpPosterior posterior;
  double sigma2 = 0.0;
  double tau2 = 0.0;
  Eigen::VectorXd phi;
  double acceptance_rate = 0.0;
};

// Fully Bayesian hyperparameter treatment for the baselines: random-walk
// Metropolis over (log sigma2, log tau2, log phi), 500 iterations with the
// first half discarded, post-burn-in average as the point estimate.
BaselineFit baseline_gp_fit(const ObservationHistory& h, const GpPriors& priors,
                            RngStream& rng, int chain_length = 500);

// Acquisition rules over a finite candidate set. Ties break to the lowest
// index. `n` is the number of observations so far (drives the UCB schedule).
int acquire_ucb(const GpPosterior& post, const Eigen::MatrixXd& candidates, int n);
int acquire_ei(const GpPosterior& post, const Eigen::MatrixXd& candidates,
               double incumbent_best);
int acquire_gp_ts(const GpPosterior& post, const Eigen::MatrixXd& candidates,
                  RngStream& rng);

// Closed-form expected improvement for a single Gaussian belief.
double expected_improvement(double mean, double sd, double incumbent_best);

double normal_cdf(double z);
double normal_pdf(double z);

int argmax_lowest_index(const Eigen::VectorXd& v);

}  // namespace infbo
