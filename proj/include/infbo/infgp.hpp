#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "infbo/gp.hpp"
#include "infbo/history.hpp"
#include "infbo/linalg.hpp"
#include "infbo/rng.hpp"

namespace infbo {

// Two-layer prior for the mixture-of-surfaces model: Gaussian trend
// coefficients, inverse-gamma observation and surface variances, gamma
// concentration, uniform length scales on (0, b_phi].
struct PriorSpec {
  Eigen::VectorXd beta0;       // d
  Eigen::MatrixXd sigma_beta;  // d x d SPD
  double a_tau = 2.0, b_tau = 1.0;
  double a_sigma = 2.0, b_sigma = 1.0;
  double a_nu = 2.0, b_nu = 2.0;
  double b_phi = 1.0;
  int phi_grid_size = 30;

  // beta0 = 0, Sigma_beta = 100 I, and b_phi chosen so that correlation has
  // decayed below 0.05 at 1% of the box diameter.
  static PriorSpec defaults(const Box& bounds);

  void validate() const;

  double prior_mean_tau2() const { return b_tau / (a_tau - 1.0); }
  double prior_mean_sigma2() const { return b_sigma / (a_sigma - 1.0); }
  double prior_mean_nu() const { return a_nu / b_nu; }
};

struct HyperParams {
  Eigen::VectorXd beta;
  double tau2 = 1.0;
  double nu = 1.0;
  double sigma2 = 1.0;
  Eigen::VectorXd phi;
};

// Latent surface values at the evaluated inputs, surface assignments,
// stick-breaking weights and per-surface occupancy counts.
struct SurfaceTable {
  int L = 0;
  Eigen::MatrixXd values;        // L x n
  std::vector<int> assignments;  // n entries in [0, L)
  Eigen::VectorXd weights;       // length L, simplex
  std::vector<int> counts;       // length L, counts[l] = #{i : z_i = l}

  int n() const { return static_cast<int>(values.cols()); }
  int occupied_count() const;
  void recount();
  void validate() const;  // throws on violated invariants
};

enum class PhiMode { kIsotropicGrid, kAnisotropicMle };

struct GibbsConfig {
  int sweeps = 500;  // B
  int truncation = 2;  // L for this run
  bool warm_start = true;
  PhiMode phi_mode = PhiMode::kIsotropicGrid;
};

// Per-input-set precomputation for the isotropic length-scale update:
// correlation factors and log determinants at every grid value. They depend
// only on the inputs and the grid, never on the chain state.
struct PhiGrid {
  Eigen::VectorXd values;
  std::vector<CholeskyFactor> chols;
  Eigen::VectorXd log_dets;

  static PhiGrid build(const Eigen::MatrixXd& inputs, double b_phi, int size);
  int closest_index(double phi) const;
};

// One joint state of the chain. Self-contained: carries its own copy of the
// inputs and the factored correlation matrix at the current length scales,
// shared by every surface.
struct GibbsState {
  HyperParams hp;
  SurfaceTable table;
  PriorSpec priors;
  Eigen::MatrixXd inputs;  // n x d
  Eigen::MatrixXd rho;     // correlation over inputs at hp.phi
  CholeskyFactor rho_chol;
  int phi_grid_index = -1;  // valid in isotropic mode

  int n() const { return static_cast<int>(inputs.rows()); }
  KernelParams kernel() const;
  void refresh_correlation();  // rebuild rho and its factor from hp.phi
  void validate() const;
};

// w_1 = v_1, w_l = v_l * prod_{r<l} (1 - v_r), closing weight clamped into
// [0, 1]. Input length L-1, output length L.
Eigen::VectorXd stick_breaking(const Eigen::VectorXd& v);

// Full conditional draws, applied in the order surfaces -> weights ->
// labels -> hyperparameters by gibbs_sweep. `rewards` must be aligned with
// state.inputs. All functions tolerate n = 0, where they reduce to prior
// draws.
void gibbs_step_surfaces(GibbsState& state, const Eigen::VectorXd& rewards, RngStream& rng);
void gibbs_step_weights(GibbsState& state, RngStream& rng);
void gibbs_step_labels(GibbsState& state, const Eigen::VectorXd& rewards, RngStream& rng);
void gibbs_step_hypers(GibbsState& state, const Eigen::VectorXd& rewards,
                       const PhiGrid* grid, PhiMode phi_mode, RngStream& rng);

// Concentration draw given the closing stick weight; the weights are assumed
// freshly redrawn. Gamma(a_nu + L - 1, b_nu - log(w_last)) with w_last
// floored at 1e-300 before the log.
double sample_nu_conditional(double w_last, int truncation, const PriorSpec& priors,
                             RngStream& rng);

// Same conditional fed with log(w_last) directly. The sweep uses this path:
// the closing weight is accumulated in log space while the sticks are drawn,
// so it stays exact even when the weight itself underflows to zero (a capped
// rate would trap the concentration near zero and distort its posterior).
double sample_nu_conditional_from_log(double log_w_last, int truncation,
                                      const PriorSpec& priors, RngStream& rng);

void gibbs_sweep(GibbsState& state, const Eigen::VectorXd& rewards, const PhiGrid* grid,
                 PhiMode phi_mode, RngStream& rng);

// Cold-started state: every point on surface one, zero surface values,
// hyperparameters at prior means -- except the observation variance, which
// starts at the sample reward variance when that is larger. With zero
// surfaces the whole reward spread initially lives in the noise term, and a
// tighter start contradicts the state it accompanies.
GibbsState cold_start(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& rewards,
                      const PriorSpec& priors, int truncation, PhiMode phi_mode,
                      const PhiGrid* grid);

// Extend a previous state by the newest observation: the new surface-table
// column is imputed per surface by kriging from that surface's existing row,
// the label is the most likely one, and the table grows to `truncation` with
// prior-drawn rows if needed.
GibbsState warm_extend(const GibbsState& prev, const Eigen::MatrixXd& inputs,
                       const Eigen::VectorXd& rewards, int truncation, RngStream& rng);

// Run B full sweeps and return the final state as the single posterior draw
// Thompson sampling needs. `warm_from` is used when cfg.warm_start is set and
// the state matches the history minus its last observation.
GibbsState run_gibbs(const ObservationHistory& h, const PriorSpec& priors,
                     const GibbsConfig& cfg, RngStream& rng,
                     const GibbsState* warm_from = nullptr);

// L_n = min(L_max, max(2, ceil((nu + kappa) ln n) + 1)).
int truncation_level(double nu_hat, int n, double kappa, int l_max);

// Exact expected number of occupied surfaces: sum_{i=1..n} nu / (nu + i - 1).
double expected_surface_count(double nu, int n);

}  // namespace infbo
