#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "infbo/benchmarks.hpp"
#include "infbo/gp.hpp"
#include "infbo/history.hpp"
#include "infbo/infgp.hpp"

namespace infbo {

enum class CandidateScheme { kUniform, kLatinHypercube };

struct AcquisitionConfig {
  double c1 = 1.0;       // exploration schedule zeta_n = c1 * n^{-lambda1}
  double lambda1 = 0.5;  // in (0, 1)
  int num_candidates = 0;  // 0 resolves to 256 * d
  CandidateScheme scheme = CandidateScheme::kLatinHypercube;

  int resolved_candidates(int dim) const {
    return num_candidates > 0 ? num_candidates : 256 * dim;
  }
  double zeta(int n) const;
  void validate() const;
};

Eigen::MatrixXd uniform_candidates(const Box& bounds, int count, RngStream& rng);
Eigen::MatrixXd latin_hypercube_candidates(const Box& bounds, int count, RngStream& rng);
Eigen::MatrixXd generate_candidates(const Box& bounds, int count, CandidateScheme scheme,
                                    RngStream& rng);

// Posterior over the next surface value at every candidate: reuse surface j
// with weight n_j/(nu+n) (kriging posterior on that surface's row), or open a
// fresh surface with weight nu/(nu+n) (the GP prior). All reused components
// share one posterior covariance since they condition on the same inputs.
struct PredictiveMixture {
  double new_surface_weight = 1.0;
  std::vector<double> component_weights;  // occupied surfaces only
  std::vector<int> component_surface;     // surface-table row of each component
  Eigen::MatrixXd component_means;        // K x m
  Eigen::MatrixXd component_cov;          // m x m, shared across components
  CholeskyFactor component_cov_chol;
  Eigen::MatrixXd prior_cov;              // m x m
  CholeskyFactor prior_cov_chol;

  int candidate_count() const { return static_cast<int>(prior_cov.rows()); }
  double weight_total() const;
};

// One joint draw of the expected-reward path over the candidate set.
struct PosteriorDraw {
  Eigen::VectorXd beta_hat;
  Eigen::VectorXd path;      // x^T beta + surface draw, per candidate
  int chosen_component = -1;  // surface-table row, or -1 for a fresh surface
};

PredictiveMixture build_predictive(const GibbsState& state, const Eigen::MatrixXd& candidates);

PosteriorDraw sample_path(const PredictiveMixture& mix, const Eigen::VectorXd& beta_hat,
                          const Eigen::MatrixXd& candidates, RngStream& rng);

// sample_path followed by an argmax with lowest-index tie breaking.
int ts_choose_index(const PredictiveMixture& mix, const Eigen::VectorXd& beta_hat,
                    const Eigen::MatrixXd& candidates, RngStream& rng);

// One zeta-greedy Thompson step: uniform draw from the box with probability
// zeta(n), otherwise the argmax of a sampled path over a fresh candidate set.
Eigen::VectorXd ts_step(const ObservationHistory& h, const GibbsState& state,
                        const AcquisitionConfig& cfg, const Box& bounds, RngStream& rng);

enum class Algorithm { kInfGpTs, kGpTs, kGpUcb, kGpEi };

Algorithm algorithm_from_name(const std::string& name);
std::string algorithm_name(Algorithm a);

// Prior settings with 0 meaning "derive": b_tau/b_sigma default to the
// variance of the standardized rewards (that is, 1), b_phi from the box.
struct PriorSettings {
  double a_tau = 2.0, b_tau = 0.0;
  double a_sigma = 2.0, b_sigma = 0.0;
  double a_nu = 2.0, b_nu = 2.0;
  double b_phi = 0.0;
  double beta0 = 0.0;
  double sigma_beta_scale = 100.0;
  int phi_grid_size = 30;

  PriorSpec resolve(const Box& bounds) const;
};

struct OptimizeConfig {
  Algorithm algorithm = Algorithm::kInfGpTs;
  int budget = 100;  // N
  AcquisitionConfig acq;
  int gibbs_sweeps = 500;
  bool warm_start = true;
  PhiMode phi_mode = PhiMode::kIsotropicGrid;
  int l_max = 16;
  double kappa = -1.0;  // negative resolves to the current nu estimate
  PriorSettings priors;
};

struct OptimizeResult {
  RegretTrace trace;
  // Stick-breaking weights after each fit (surrogate runs only), padded to
  // the largest truncation level seen.
  std::vector<Eigen::VectorXd> surface_weights;
  bool failed = false;
  std::string failure;
};

// Full zeta-greedy BO loop: seed max(3, 2d) uniform points, then iterate
// fit -> acquire -> evaluate -> append for `budget` steps. Rewards are
// standardized against the seeding design for model fitting; the trace keeps
// original units. A numeric failure aborts the replication with a diagnostic
// instead of propagating.
OptimizeResult optimize(const Objective& obj, const OptimizeConfig& cfg, RngStream& rng);

}  // namespace infbo
