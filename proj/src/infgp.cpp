#include "infbo/infgp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "infbo/distributions.hpp"
#include "infbo/errors.hpp"

namespace infbo {

PriorSpec PriorSpec::defaults(const Box& bounds) {
  PriorSpec p;
  const int d = bounds.dim();
  p.beta0 = Eigen::VectorXd::Zero(d);
  p.sigma_beta = 100.0 * Eigen::MatrixXd::Identity(d, d);
  const double diam = std::max(bounds.diameter(), 1e-12);
  p.b_phi = 3.0 / (0.01 * diam);
  return p;
}

void PriorSpec::validate() const {
  if (beta0.size() == 0) throw InvalidParameter("PriorSpec: beta0 is empty");
  if (sigma_beta.rows() != beta0.size() || sigma_beta.cols() != beta0.size())
    throw InvalidParameter("PriorSpec: sigma_beta shape mismatch");
  if (!(a_tau > 1.0) || !(b_tau > 0.0) || !(a_sigma > 1.0) || !(b_sigma > 0.0))
    throw InvalidParameter("PriorSpec: variance priors need shape > 1 and scale > 0");
  if (!(a_nu > 0.0) || !(b_nu > 0.0)) throw InvalidParameter("PriorSpec: nu prior invalid");
  if (!(b_phi > 0.0)) throw InvalidParameter("PriorSpec: b_phi must be > 0");
  if (phi_grid_size < 1) throw InvalidParameter("PriorSpec: phi_grid_size must be >= 1");
}

int SurfaceTable::occupied_count() const {
  int k = 0;
  for (int c : counts) k += (c > 0);
  return k;
}

void SurfaceTable::recount() {
  counts.assign(static_cast<size_t>(L), 0);
  for (int z : assignments) ++counts[static_cast<size_t>(z)];
}

void SurfaceTable::validate() const {
  if (static_cast<int>(values.rows()) != L || weights.size() != L ||
      static_cast<int>(counts.size()) != static_cast<size_t>(L))
    throw InvalidParameter("SurfaceTable: inconsistent truncation level");
  if (static_cast<int>(assignments.size()) != n())
    throw InvalidParameter("SurfaceTable: assignment count != n");
  double total = 0.0;
  for (int l = 0; l < L; ++l) {
    if (weights[l] < 0.0 || weights[l] > 1.0)
      throw InvalidParameter("SurfaceTable: weight outside [0,1]");
    total += weights[l];
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw InvalidParameter("SurfaceTable: weights do not sum to 1");
  std::vector<int> expect(static_cast<size_t>(L), 0);
  for (int z : assignments) {
    if (z < 0 || z >= L) throw InvalidParameter("SurfaceTable: assignment out of range");
    ++expect[static_cast<size_t>(z)];
  }
  if (expect != counts) throw InvalidParameter("SurfaceTable: counts do not match assignments");
  if (occupied_count() > std::min(L, std::max(n(), 0)) && n() > 0)
    throw InvalidParameter("SurfaceTable: occupied count exceeds min(L, n)");
}

KernelParams GibbsState::kernel() const {
  KernelParams kp;
  kp.sigma2 = hp.sigma2;
  kp.phi = hp.phi;
  kp.b_phi = priors.b_phi;
  return kp;
}

void GibbsState::refresh_correlation() {
  rho = correlation_matrix(inputs, inputs, hp.phi);
  rho = 0.5 * (rho + rho.transpose().eval());
  rho_chol = cholesky_default_jitter(rho);
}

void GibbsState::validate() const {
  table.validate();
  if (!(hp.tau2 > 0.0) || !(hp.sigma2 > 0.0) || !(hp.nu > 0.0))
    throw InvalidParameter("GibbsState: variance-like hyperparameters must be positive");
  for (Eigen::Index k = 0; k < hp.phi.size(); ++k)
    if (!(hp.phi[k] > 0.0) || hp.phi[k] > priors.b_phi)
      throw InvalidParameter("GibbsState: phi outside (0, b_phi]");
  if (table.n() != n()) throw InvalidParameter("GibbsState: table size != input count");
}

Eigen::VectorXd stick_breaking(const Eigen::VectorXd& v) {
  const Eigen::Index lm1 = v.size();
  Eigen::VectorXd w(lm1 + 1);
  double remaining = 1.0;
  double partial = 0.0;
  for (Eigen::Index l = 0; l < lm1; ++l) {
    w[l] = v[l] * remaining;
    partial += w[l];
    remaining *= (1.0 - v[l]);
  }
  w[lm1] = std::clamp(1.0 - partial, 0.0, 1.0);
  return w;
}

PhiGrid PhiGrid::build(const Eigen::MatrixXd& inputs, double b_phi, int size) {
  if (size < 1) throw InvalidParameter("PhiGrid: size must be >= 1");
  PhiGrid grid;
  grid.values.resize(size);
  grid.log_dets.resize(size);
  grid.chols.reserve(static_cast<size_t>(size));
  // Log-spaced over three decades up to b_phi; the prior support is the open
  // interval (0, b_phi], so the grid needs a positive floor.
  const double lo = b_phi * 1e-3;
  for (int m = 0; m < size; ++m) {
    const double t = (size == 1) ? 1.0 : static_cast<double>(m) / (size - 1);
    grid.values[m] = lo * std::pow(b_phi / lo, t);
  }
  const int d = static_cast<int>(inputs.cols());
  for (int m = 0; m < size; ++m) {
    const Eigen::VectorXd phi = Eigen::VectorXd::Constant(d, grid.values[m]);
    Eigen::MatrixXd rho = correlation_matrix(inputs, inputs, phi);
    rho = 0.5 * (rho + rho.transpose().eval());
    grid.chols.push_back(cholesky_default_jitter(rho));
    grid.log_dets[m] = grid.chols.back().log_det();
  }
  return grid;
}

int PhiGrid::closest_index(double phi) const {
  int best = 0;
  for (int m = 1; m < values.size(); ++m)
    if (std::abs(std::log(values[m]) - std::log(phi)) <
        std::abs(std::log(values[best]) - std::log(phi)))
      best = m;
  return best;
}

void gibbs_step_surfaces(GibbsState& state, const Eigen::VectorXd& rewards, RngStream& rng) {
  const int n = state.n();
  const int L = state.table.L;
  const double sigma = std::sqrt(state.hp.sigma2);
  const double tau2 = state.hp.tau2;

  Eigen::VectorXd resid;
  if (n > 0) resid = rewards - state.inputs * state.hp.beta;

  for (int l = 0; l < L; ++l) {
    // Prior path draw, shared with the posterior draw below.
    Eigen::VectorXd prior_draw(n);
    {
      Eigen::VectorXd z(n);
      for (int i = 0; i < n; ++i) z[i] = sample_normal(0.0, 1.0, rng);
      prior_draw = sigma * (state.rho_chol.lower * z);
    }
    if (state.table.counts[static_cast<size_t>(l)] == 0 || n == 0) {
      state.table.values.row(l) = prior_draw.transpose();
      continue;
    }
    // Matheron update: condition the prior draw on the noisy residuals at
    // this surface's assigned points. Exactly N((1/tau2) Lam I (y - Xb), Lam)
    // with Lam = (Sigma0^{-1} + I/tau2)^{-1}, but only needs an M x M factor.
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (state.table.assignments[static_cast<size_t>(i)] == l) idx.push_back(i);
    const int m = static_cast<int>(idx.size());
    Eigen::MatrixXd a(m, m);
    Eigen::MatrixXd cross(n, m);
    for (int p = 0; p < m; ++p) {
      for (int q = 0; q < m; ++q)
        a(p, q) = state.hp.sigma2 * state.rho(idx[static_cast<size_t>(p)],
                                              idx[static_cast<size_t>(q)]);
      a(p, p) += tau2;
      cross.col(p) = state.hp.sigma2 * state.rho.col(idx[static_cast<size_t>(p)]);
    }
    Eigen::VectorXd gap(m);
    for (int p = 0; p < m; ++p) {
      const double noise = sample_normal(0.0, std::sqrt(tau2), rng);
      gap[p] = resid[idx[static_cast<size_t>(p)]] - prior_draw[idx[static_cast<size_t>(p)]] -
               noise;
    }
    const CholeskyFactor a_chol = cholesky_default_jitter(a);
    state.table.values.row(l) = (prior_draw + cross * a_chol.solve(gap)).transpose();
  }
}

namespace {

// Draw V_l ~ Beta(1 + M_l, nu + sum_{j>l} M_j), rebuild the weights by stick
// breaking and return log of the closing weight. The log is accumulated from
// the underlying gamma draws, which keeps it finite when a stick saturates
// at V = 1 in floating point.
double refresh_stick_weights(SurfaceTable& table, double nu, RngStream& rng) {
  const int L = table.L;
  if (L < 2) {
    table.weights = Eigen::VectorXd::Ones(std::max(L, 0));
    return 0.0;
  }
  Eigen::VectorXd v(L - 1);
  double log_closing = 0.0;
  int tail = 0;
  for (int l = L - 1; l >= 1; --l) tail += table.counts[static_cast<size_t>(l)];
  for (int l = 0; l < L - 1; ++l) {
    const double a = 1.0 + table.counts[static_cast<size_t>(l)];
    const double b = nu + tail;
    const double x = sample_gamma(a, 1.0, rng);
    const GammaDraw y = sample_gamma_with_log(b, 1.0, rng);
    v[l] = x / (x + y.value);
    log_closing += y.log_value - std::log(x + y.value);
    tail -= table.counts[static_cast<size_t>(l + 1)];
  }
  table.weights = stick_breaking(v);
  return log_closing;
}

}  // namespace

void gibbs_step_weights(GibbsState& state, RngStream& rng) {
  refresh_stick_weights(state.table, state.hp.nu, rng);
}

void gibbs_step_labels(GibbsState& state, const Eigen::VectorXd& rewards, RngStream& rng) {
  const int n = state.n();
  const int L = state.table.L;
  if (n == 0) return;
  const Eigen::VectorXd resid = rewards - state.inputs * state.hp.beta;
  const double inv2t = 0.5 / state.hp.tau2;
  Eigen::VectorXd logw(L);
  for (int l = 0; l < L; ++l)
    logw[l] = state.table.weights[l] > 0.0 ? std::log(state.table.weights[l])
                                           : -std::numeric_limits<double>::infinity();
  Eigen::VectorXd logp(L);
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < L; ++l) {
      const double r = resid[i] - state.table.values(l, i);
      logp[l] = logw[l] - inv2t * r * r;
    }
    state.table.assignments[static_cast<size_t>(i)] = sample_categorical_log(logp, rng);
  }
  state.table.recount();
}

double sample_nu_conditional(double w_last, int truncation, const PriorSpec& priors,
                             RngStream& rng) {
  return sample_nu_conditional_from_log(std::log(std::max(w_last, 1e-300)), truncation,
                                        priors, rng);
}

double sample_nu_conditional_from_log(double log_w_last, int truncation,
                                      const PriorSpec& priors, RngStream& rng) {
  const double rate = priors.b_nu - log_w_last;
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw InvalidParameter("sample_nu_conditional: nonpositive posterior rate");
  return sample_gamma(priors.a_nu + truncation - 1.0, rate, rng);
}

namespace {

// Quadratic form sum_l xi_l^T rho^{-1} xi_l via one forward solve.
double surface_quadratic(const Eigen::MatrixXd& values, const CholeskyFactor& chol) {
  if (values.cols() == 0) return 0.0;
  const Eigen::MatrixXd solved = chol.forward_solve(values.transpose());
  return solved.squaredNorm();
}

void update_phi_isotropic(GibbsState& state, const PhiGrid& grid, RngStream& rng) {
  const int grid_size = static_cast<int>(grid.values.size());
  const double half_l = 0.5 * state.table.L;
  Eigen::VectorXd logp(grid_size);
  for (int m = 0; m < grid_size; ++m) {
    const double quad = surface_quadratic(state.table.values, grid.chols[static_cast<size_t>(m)]);
    logp[m] = -half_l * grid.log_dets[m] - quad / (2.0 * state.hp.sigma2);
  }
  const int pick = sample_categorical_log(logp, rng);
  state.phi_grid_index = pick;
  state.hp.phi = Eigen::VectorXd::Constant(state.inputs.cols(), grid.values[pick]);
  state.rho_chol = grid.chols[static_cast<size_t>(pick)];
  const Eigen::VectorXd phi = state.hp.phi;
  state.rho = correlation_matrix(state.inputs, state.inputs, phi);
  state.rho = 0.5 * (state.rho + state.rho.transpose().eval());
}

// Conditional MLE for anisotropic length scales: minimize
//   (L/2) logdet rho + (1/(2 sigma2)) sum_l xi^T rho^{-1} xi
// by projected gradient descent with backtracking.
void update_phi_anisotropic(GibbsState& state) {
  const int n = state.n();
  const int d = static_cast<int>(state.inputs.cols());
  if (n == 0) return;
  const double b_phi = state.priors.b_phi;
  const double floor_phi = 1e-6 * b_phi;
  const double half_l = 0.5 * state.table.L;
  const double inv2s = 1.0 / (2.0 * state.hp.sigma2);

  std::vector<Eigen::MatrixXd> sq_dist(static_cast<size_t>(d));
  for (int k = 0; k < d; ++k) {
    sq_dist[static_cast<size_t>(k)].resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double diff = state.inputs(i, k) - state.inputs(j, k);
        sq_dist[static_cast<size_t>(k)](i, j) = diff * diff;
      }
  }

  Eigen::VectorXd phi = state.hp.phi;
  auto objective = [&](const Eigen::VectorXd& p, Eigen::MatrixXd* rho_out,
                       CholeskyFactor* chol_out) {
    Eigen::MatrixXd rho = correlation_matrix(state.inputs, state.inputs, p);
    rho = 0.5 * (rho + rho.transpose().eval());
    CholeskyFactor chol = cholesky_default_jitter(rho);
    const double value =
        half_l * chol.log_det() + inv2s * surface_quadratic(state.table.values, chol);
    if (rho_out) *rho_out = std::move(rho);
    if (chol_out) *chol_out = std::move(chol);
    return value;
  };

  Eigen::MatrixXd rho;
  CholeskyFactor chol;
  double value = objective(phi, &rho, &chol);
  const int max_iters = 100;
  double step = 1e-2;
  for (int it = 0; it < max_iters; ++it) {
    const Eigen::MatrixXd rho_inv = chol.solve(Eigen::MatrixXd::Identity(n, n));
    const Eigen::MatrixXd solved = chol.solve(state.table.values.transpose());  // n x L
    Eigen::VectorXd grad(d);
    for (int k = 0; k < d; ++k) {
      const Eigen::MatrixXd dk = -sq_dist[static_cast<size_t>(k)].cwiseProduct(rho);
      double tr = (rho_inv.cwiseProduct(dk)).sum();
      double quad = 0.0;
      for (int l = 0; l < state.table.L; ++l)
        quad += solved.col(l).dot(dk * solved.col(l));
      grad[k] = half_l * tr - inv2s * quad;
    }
    bool moved = false;
    double trial_step = step;
    for (int bt = 0; bt < 20; ++bt) {
      Eigen::VectorXd cand = phi - trial_step * grad;
      for (int k = 0; k < d; ++k) cand[k] = std::clamp(cand[k], floor_phi, b_phi);
      Eigen::MatrixXd cand_rho;
      CholeskyFactor cand_chol;
      const double cand_value = objective(cand, &cand_rho, &cand_chol);
      if (cand_value < value) {
        phi = cand;
        value = cand_value;
        rho = std::move(cand_rho);
        chol = std::move(cand_chol);
        moved = true;
        step = trial_step * 1.5;
        break;
      }
      trial_step *= 0.5;
    }
    if (!moved) break;
  }
  state.hp.phi = phi;
  state.rho = rho;
  state.rho_chol = chol;
  state.phi_grid_index = -1;
}

}  // namespace

void gibbs_step_hypers(GibbsState& state, const Eigen::VectorXd& rewards,
                       const PhiGrid* grid, PhiMode phi_mode, RngStream& rng) {
  const int n = state.n();
  const int d = static_cast<int>(state.inputs.cols());
  const PriorSpec& pr = state.priors;

  // (4a) redraw the weights, then the concentration given the closing weight.
  const double log_closing = refresh_stick_weights(state.table, state.hp.nu, rng);
  state.hp.nu = sample_nu_conditional_from_log(log_closing, state.table.L, pr, rng);

  // (4b) trend coefficients given surface-corrected targets.
  Eigen::VectorXd ybar(n);
  for (int i = 0; i < n; ++i)
    ybar[i] =
        rewards[i] - state.table.values(state.table.assignments[static_cast<size_t>(i)], i);
  const Eigen::MatrixXd prior_prec =
      cholesky_default_jitter(pr.sigma_beta).solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::MatrixXd post_prec = prior_prec;
  Eigen::VectorXd rhs = prior_prec * pr.beta0;
  if (n > 0) {
    post_prec += state.inputs.transpose() * state.inputs / state.hp.tau2;
    rhs += state.inputs.transpose() * ybar / state.hp.tau2;
  }
  const CholeskyFactor prec_chol = cholesky_default_jitter(post_prec);
  const Eigen::VectorXd beta_mean = prec_chol.solve(rhs);
  // Covariance factor from the precision factor: cov = (L L^T)^{-1}, so
  // sampling uses L^{-T} z.
  Eigen::VectorXd z(d);
  for (int k = 0; k < d; ++k) z[k] = sample_normal(0.0, 1.0, rng);
  state.hp.beta =
      beta_mean + prec_chol.lower.transpose().triangularView<Eigen::Upper>().solve(z);

  // (4c) observation variance.
  double rss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = ybar[i] - state.inputs.row(i).dot(state.hp.beta);
    rss += r * r;
  }
  state.hp.tau2 = sample_inverse_gamma(pr.a_tau + 0.5 * n, pr.b_tau + 0.5 * rss, rng);

  // (4d) surface variance; the quadratic form uses the correlation factor at
  // the current length scales.
  const double quad = surface_quadratic(state.table.values, state.rho_chol);
  state.hp.sigma2 = sample_inverse_gamma(pr.a_sigma + 0.5 * n * state.table.L,
                                         pr.b_sigma + 0.5 * quad, rng);

  // (4e) length scales.
  if (phi_mode == PhiMode::kIsotropicGrid) {
    if (grid == nullptr) throw InvalidParameter("gibbs_step_hypers: grid required");
    update_phi_isotropic(state, *grid, rng);
  } else {
    update_phi_anisotropic(state);
  }
}

void gibbs_sweep(GibbsState& state, const Eigen::VectorXd& rewards, const PhiGrid* grid,
                 PhiMode phi_mode, RngStream& rng) {
  gibbs_step_surfaces(state, rewards, rng);
  gibbs_step_weights(state, rng);
  gibbs_step_labels(state, rewards, rng);
  gibbs_step_hypers(state, rewards, grid, phi_mode, rng);
}

GibbsState cold_start(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& rewards,
                      const PriorSpec& priors, int truncation, PhiMode phi_mode,
                      const PhiGrid* grid) {
  priors.validate();
  const int n = static_cast<int>(inputs.rows());
  const int d = static_cast<int>(inputs.cols());
  GibbsState st;
  st.priors = priors;
  st.inputs = inputs;
  st.hp.beta = priors.beta0;
  st.hp.tau2 = priors.prior_mean_tau2();
  if (rewards.size() >= 2) {
    const double var =
        (rewards.array() - rewards.mean()).square().sum() / (rewards.size() - 1);
    st.hp.tau2 = std::max(st.hp.tau2, var);
  }
  st.hp.sigma2 = priors.prior_mean_sigma2();
  st.hp.nu = priors.prior_mean_nu();
  // Length scales start at the geometric midpoint of the support. The
  // arithmetic prior mean b_phi/2 sits in the roughest half of a
  // scale-spanning support and the grid update cannot walk away from it once
  // the refreshed surfaces anchor it.
  const double phi_start = priors.b_phi * std::sqrt(1e-3);
  if (phi_mode == PhiMode::kIsotropicGrid && grid != nullptr) {
    st.phi_grid_index = grid->closest_index(phi_start);
    st.hp.phi = Eigen::VectorXd::Constant(d, grid->values[st.phi_grid_index]);
  } else {
    st.hp.phi = Eigen::VectorXd::Constant(d, phi_start);
  }
  st.table.L = truncation;
  st.table.values = Eigen::MatrixXd::Zero(truncation, n);
  st.table.assignments.assign(static_cast<size_t>(n), 0);
  st.table.weights = Eigen::VectorXd::Constant(truncation, 1.0 / truncation);
  st.table.recount();
  st.refresh_correlation();
  return st;
}

GibbsState warm_extend(const GibbsState& prev, const Eigen::MatrixXd& inputs,
                       const Eigen::VectorXd& rewards, int truncation, RngStream& rng) {
  const int n = static_cast<int>(inputs.rows());
  if (prev.n() + 1 != n)
    throw InvalidParameter("warm_extend: state must trail the history by one observation");

  GibbsState st = prev;
  st.inputs = inputs;
  const Eigen::VectorXd x_new = inputs.row(n - 1).transpose();

  // Impute the new column per surface by kriging on the old inputs; the
  // signal variance cancels in the mean.
  const Eigen::MatrixXd cross =
      correlation_matrix(x_new.transpose(), prev.inputs, prev.hp.phi);
  Eigen::MatrixXd values(prev.table.L, n);
  values.leftCols(n - 1) = prev.table.values;
  for (int l = 0; l < prev.table.L; ++l) {
    const Eigen::VectorXd row = prev.table.values.row(l).transpose();
    values(l, n - 1) = (cross * prev.rho_chol.solve(row))(0, 0);
  }
  st.table.values = std::move(values);

  // Most likely label for the new point under the step-3 probabilities.
  const double resid_base = rewards[n - 1] - x_new.dot(st.hp.beta);
  int best = 0;
  double best_logp = -std::numeric_limits<double>::infinity();
  for (int l = 0; l < prev.table.L; ++l) {
    const double w = st.table.weights[l];
    if (!(w > 0.0)) continue;
    const double r = resid_base - st.table.values(l, n - 1);
    const double logp = std::log(w) - 0.5 * r * r / st.hp.tau2;
    if (logp > best_logp) {
      best_logp = logp;
      best = l;
    }
  }
  st.table.assignments.push_back(best);
  st.table.recount();
  st.refresh_correlation();

  // Grow the truncation level if the schedule asks for more surfaces; new
  // rows are prior draws, and the weights get redrawn before first use.
  if (truncation > st.table.L) {
    const int old_l = st.table.L;
    st.table.values.conservativeResize(truncation, Eigen::NoChange);
    const double sigma = std::sqrt(st.hp.sigma2);
    for (int l = old_l; l < truncation; ++l) {
      Eigen::VectorXd z(n);
      for (int i = 0; i < n; ++i) z[i] = sample_normal(0.0, 1.0, rng);
      st.table.values.row(l) = (sigma * (st.rho_chol.lower * z)).transpose();
    }
    Eigen::VectorXd w = Eigen::VectorXd::Zero(truncation);
    w.head(old_l) = st.table.weights;
    st.table.weights = w;
    st.table.L = truncation;
    st.table.recount();
  }
  return st;
}

GibbsState run_gibbs(const ObservationHistory& h, const PriorSpec& priors,
                     const GibbsConfig& cfg, RngStream& rng, const GibbsState* warm_from) {
  if (h.n() < 1) throw InvalidParameter("run_gibbs: needs at least one observation");
  if (cfg.truncation < 2) throw InvalidParameter("run_gibbs: truncation must be >= 2");
  if (cfg.sweeps < 1) throw InvalidParameter("run_gibbs: sweeps must be >= 1");

  PhiGrid grid;
  const PhiGrid* grid_ptr = nullptr;
  if (cfg.phi_mode == PhiMode::kIsotropicGrid) {
    grid = PhiGrid::build(h.inputs, priors.b_phi, priors.phi_grid_size);
    grid_ptr = &grid;
  }

  GibbsState state;
  if (cfg.warm_start && warm_from != nullptr && warm_from->n() + 1 == h.n()) {
    state = warm_extend(*warm_from, h.inputs, h.rewards,
                        std::max(cfg.truncation, warm_from->table.L), rng);
  } else {
    state = cold_start(h.inputs, h.rewards, priors, cfg.truncation, cfg.phi_mode, grid_ptr);
  }

  for (int b = 0; b < cfg.sweeps; ++b)
    gibbs_sweep(state, h.rewards, grid_ptr, cfg.phi_mode, rng);
  return state;
}

int truncation_level(double nu_hat, int n, double kappa, int l_max) {
  if (n < 1) throw InvalidParameter("truncation_level: n must be >= 1");
  const double raw = (nu_hat + kappa) * std::log(static_cast<double>(n));
  const int level = static_cast<int>(std::ceil(raw)) + 1;
  return std::min(l_max, std::max(2, level));
}

double expected_surface_count(double nu, int n) {
  if (!(nu > 0.0)) throw InvalidParameter("expected_surface_count: nu must be > 0");
  if (n < 1) throw InvalidParameter("expected_surface_count: n must be >= 1");
  double total = 0.0;
  for (int i = 1; i <= n; ++i) total += nu / (nu + i - 1.0);
  return total;
}

}  // namespace infbo
