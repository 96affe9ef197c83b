#include "infbo/acquisition.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "infbo/distributions.hpp"
#include "infbo/errors.hpp"

namespace infbo {

double AcquisitionConfig::zeta(int n) const {
  return c1 * std::pow(static_cast<double>(std::max(n, 1)), -lambda1);
}

void AcquisitionConfig::validate() const {
  if (!(c1 > 0.0) || c1 > 1.0)
    throw InvalidParameter("AcquisitionConfig: c1 must lie in (0, 1]");
  if (!(lambda1 > 0.0) || !(lambda1 < 1.0))
    throw InvalidParameter("AcquisitionConfig: lambda1 must lie in (0, 1)");
  if (num_candidates < 0)
    throw InvalidParameter("AcquisitionConfig: num_candidates must be >= 0");
}

Eigen::MatrixXd uniform_candidates(const Box& bounds, int count, RngStream& rng) {
  const int d = bounds.dim();
  Eigen::MatrixXd out(count, d);
  for (int i = 0; i < count; ++i)
    for (int k = 0; k < d; ++k)
      out(i, k) = sample_uniform(bounds.lo[k], bounds.hi[k], rng);
  return out;
}

Eigen::MatrixXd latin_hypercube_candidates(const Box& bounds, int count, RngStream& rng) {
  const int d = bounds.dim();
  Eigen::MatrixXd out(count, d);
  std::vector<int> perm(static_cast<size_t>(count));
  for (int k = 0; k < d; ++k) {
    std::iota(perm.begin(), perm.end(), 0);
    // Fisher-Yates with the stream's uniforms.
    for (int i = count - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.uniform01() * (i + 1));
      std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(std::min(j, i))]);
    }
    for (int i = 0; i < count; ++i) {
      const double u = (perm[static_cast<size_t>(i)] + rng.uniform01()) / count;
      out(i, k) = bounds.lo[k] + (bounds.hi[k] - bounds.lo[k]) * u;
    }
  }
  return out;
}

Eigen::MatrixXd generate_candidates(const Box& bounds, int count, CandidateScheme scheme,
                                    RngStream& rng) {
  return scheme == CandidateScheme::kUniform ? uniform_candidates(bounds, count, rng)
                                             : latin_hypercube_candidates(bounds, count, rng);
}

double PredictiveMixture::weight_total() const {
  double total = new_surface_weight;
  for (double w : component_weights) total += w;
  return total;
}

PredictiveMixture build_predictive(const GibbsState& state, const Eigen::MatrixXd& candidates) {
  const int n = state.n();
  const int m = static_cast<int>(candidates.rows());
  if (m < 1) throw InvalidParameter("build_predictive: empty candidate set");

  PredictiveMixture mix;
  const double nu = state.hp.nu;
  mix.new_surface_weight = nu / (nu + n);

  Eigen::MatrixXd rho_cc = correlation_matrix(candidates, candidates, state.hp.phi);
  rho_cc = 0.5 * (rho_cc + rho_cc.transpose().eval());
  mix.prior_cov = state.hp.sigma2 * rho_cc;
  mix.prior_cov_chol = cholesky_default_jitter(mix.prior_cov);

  std::vector<int> occupied;
  for (int l = 0; l < state.table.L; ++l)
    if (state.table.counts[static_cast<size_t>(l)] > 0) occupied.push_back(l);
  const int k = static_cast<int>(occupied.size());
  if (k == 0 || n == 0) return mix;

  const Eigen::MatrixXd cross = correlation_matrix(candidates, state.inputs, state.hp.phi);
  const Eigen::MatrixXd gain = state.rho_chol.solve(cross.transpose());  // n x m

  mix.component_means.resize(k, m);
  mix.component_weights.resize(static_cast<size_t>(k));
  mix.component_surface = occupied;
  for (int j = 0; j < k; ++j) {
    const int l = occupied[static_cast<size_t>(j)];
    mix.component_weights[static_cast<size_t>(j)] =
        state.table.counts[static_cast<size_t>(l)] / (nu + n);
    mix.component_means.row(j) = state.table.values.row(l) * gain;
  }
  Eigen::MatrixXd cov = state.hp.sigma2 * (rho_cc - cross * gain);
  mix.component_cov = 0.5 * (cov + cov.transpose().eval());
  mix.component_cov_chol = cholesky_default_jitter(mix.component_cov);
  return mix;
}

PosteriorDraw sample_path(const PredictiveMixture& mix, const Eigen::VectorXd& beta_hat,
                          const Eigen::MatrixXd& candidates, RngStream& rng) {
  const int k = static_cast<int>(mix.component_weights.size());
  Eigen::VectorXd weights(k + 1);
  weights[0] = mix.new_surface_weight;
  for (int j = 0; j < k; ++j) weights[j + 1] = mix.component_weights[static_cast<size_t>(j)];
  const int pick = sample_categorical(weights, rng);

  PosteriorDraw draw;
  draw.beta_hat = beta_hat;
  if (pick == 0) {
    draw.chosen_component = -1;
    draw.path = mvn_sample(Eigen::VectorXd::Zero(mix.candidate_count()), mix.prior_cov_chol, rng);
  } else {
    const int j = pick - 1;
    draw.chosen_component = mix.component_surface[static_cast<size_t>(j)];
    draw.path = mvn_sample(mix.component_means.row(j).transpose(), mix.component_cov_chol, rng);
  }
  draw.path += candidates * beta_hat;
  return draw;
}

int ts_choose_index(const PredictiveMixture& mix, const Eigen::VectorXd& beta_hat,
                    const Eigen::MatrixXd& candidates, RngStream& rng) {
  return argmax_lowest_index(sample_path(mix, beta_hat, candidates, rng).path);
}

Eigen::VectorXd ts_step(const ObservationHistory& h, const GibbsState& state,
                        const AcquisitionConfig& cfg, const Box& bounds, RngStream& rng) {
  cfg.validate();
  const double zeta = cfg.zeta(h.n());
  if (rng.uniform01() < zeta) {
    Eigen::VectorXd x(bounds.dim());
    for (int kk = 0; kk < bounds.dim(); ++kk)
      x[kk] = sample_uniform(bounds.lo[kk], bounds.hi[kk], rng);
    return x;
  }
  const int m = cfg.resolved_candidates(bounds.dim());
  const Eigen::MatrixXd candidates = generate_candidates(bounds, m, cfg.scheme, rng);
  const PredictiveMixture mix = build_predictive(state, candidates);
  const int idx = ts_choose_index(mix, state.hp.beta, candidates, rng);
  return candidates.row(idx).transpose();
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "infgp_ts") return Algorithm::kInfGpTs;
  if (name == "gp_ts") return Algorithm::kGpTs;
  if (name == "gp_ucb") return Algorithm::kGpUcb;
  if (name == "gp_ei") return Algorithm::kGpEi;
  throw ConfigError("unknown algorithm: " + name);
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kInfGpTs: return "infgp_ts";
    case Algorithm::kGpTs: return "gp_ts";
    case Algorithm::kGpUcb: return "gp_ucb";
    case Algorithm::kGpEi: return "gp_ei";
  }
  return "unknown";
}

PriorSpec PriorSettings::resolve(const Box& bounds) const {
  PriorSpec spec = PriorSpec::defaults(bounds);
  spec.a_tau = a_tau;
  spec.a_sigma = a_sigma;
  spec.a_nu = a_nu;
  spec.b_nu = b_nu;
  // Rewards are standardized against the seeding design, so the derived
  // prior mean for both variances is the unit sample variance.
  spec.b_tau = b_tau > 0.0 ? b_tau : 1.0;
  spec.b_sigma = b_sigma > 0.0 ? b_sigma : 1.0;
  if (b_phi > 0.0) spec.b_phi = b_phi;
  spec.beta0 = Eigen::VectorXd::Constant(bounds.dim(), beta0);
  spec.sigma_beta = sigma_beta_scale * Eigen::MatrixXd::Identity(bounds.dim(), bounds.dim());
  spec.phi_grid_size = phi_grid_size;
  spec.validate();
  return spec;
}

namespace {

Eigen::VectorXd uniform_point(const Box& bounds, RngStream& rng) {
  Eigen::VectorXd x(bounds.dim());
  for (int k = 0; k < bounds.dim(); ++k)
    x[k] = sample_uniform(bounds.lo[k], bounds.hi[k], rng);
  return x;
}

GpPriors to_gp_priors(const PriorSpec& spec) {
  GpPriors p;
  p.a_tau = spec.a_tau;
  p.b_tau = spec.b_tau;
  p.a_sigma = spec.a_sigma;
  p.b_sigma = spec.b_sigma;
  p.b_phi = spec.b_phi;
  return p;
}

}  // namespace

OptimizeResult optimize(const Objective& obj, const OptimizeConfig& cfg, RngStream& rng) {
  if (cfg.budget < 1) throw InvalidParameter("optimize: budget must be >= 1");
  cfg.acq.validate();

  OptimizeResult result;
  result.trace.dim = obj.dim;
  const Box& bounds = obj.bounds;
  const int n_init = std::max(3, 2 * obj.dim);

  ObservationHistory h = ObservationHistory::empty(bounds);
  RngStream init_rng = rng.fork("init");
  RngStream noise_root = rng.fork("noise");
  double cum = 0.0;
  for (int i = 0; i < n_init; ++i) {
    const Eigen::VectorXd x = uniform_point(bounds, init_rng);
    RngStream noise_rng = noise_root.fork(static_cast<std::uint64_t>(i));
    const double y = obj.evaluate(x, noise_rng);
    h.append(x, y);
    TraceRow row;
    row.iter = i + 1;
    row.x = x;
    row.y = y;
    row.regret = obj.mu_max - obj.true_mean(x);
    cum += row.regret;
    row.regret_cum = cum;
    result.trace.rows.push_back(row);
  }

  const double y_center = h.rewards.mean();
  const double sd_raw =
      std::sqrt((h.rewards.array() - y_center).square().sum() / std::max(n_init - 1, 1));
  const double y_scale = std::max(sd_raw, 1e-8);
  const PriorSpec priors = cfg.priors.resolve(bounds);

  auto standardized = [&]() {
    ObservationHistory hs = h;
    hs.rewards = ((h.rewards.array() - y_center) / y_scale).matrix();
    return hs;
  };

  std::optional<GibbsState> prev_state;
  for (int t = 1; t <= cfg.budget; ++t) {
    RngStream it_rng = rng.fork("iter").fork(static_cast<std::uint64_t>(t));
    Eigen::VectorXd x_next;
    int k_n = 0;
    double wall_ms = 0.0;
    try {
      const auto t0 = std::chrono::steady_clock::now();
      const ObservationHistory hs = standardized();
      if (cfg.algorithm == Algorithm::kInfGpTs) {
        const double nu_hat = prev_state ? prev_state->hp.nu : priors.prior_mean_nu();
        const double kappa = cfg.kappa >= 0.0 ? cfg.kappa : nu_hat;
        GibbsConfig gc;
        gc.sweeps = cfg.gibbs_sweeps;
        gc.truncation = truncation_level(nu_hat, hs.n(), kappa, cfg.l_max);
        gc.warm_start = cfg.warm_start;
        gc.phi_mode = cfg.phi_mode;
        RngStream gibbs_rng = it_rng.fork("gibbs");
        GibbsState state = run_gibbs(hs, priors, gc, gibbs_rng,
                                     prev_state ? &*prev_state : nullptr);
        RngStream acq_rng = it_rng.fork("acq");
        x_next = ts_step(hs, state, cfg.acq, bounds, acq_rng);
        k_n = state.table.occupied_count();
        result.surface_weights.push_back(state.table.weights);
        prev_state = std::move(state);
      } else {
        RngStream fit_rng = it_rng.fork("fit");
        const BaselineFit fit = baseline_gp_fit(hs, to_gp_priors(priors), fit_rng);
        RngStream acq_rng = it_rng.fork("acq");
        // Baselines share the zeta-greedy wrapper so the comparison is
        // between surrogates, not exploration schedules.
        if (acq_rng.uniform01() < cfg.acq.zeta(hs.n())) {
          x_next = uniform_point(bounds, acq_rng);
        } else {
          const int m = cfg.acq.resolved_candidates(obj.dim);
          const Eigen::MatrixXd candidates =
              generate_candidates(bounds, m, cfg.acq.scheme, acq_rng);
          int idx = 0;
          switch (cfg.algorithm) {
            case Algorithm::kGpTs:
              idx = acquire_gp_ts(fit.posterior, candidates, acq_rng);
              break;
            case Algorithm::kGpUcb:
              idx = acquire_ucb(fit.posterior, candidates, hs.n());
              break;
            case Algorithm::kGpEi:
              idx = acquire_ei(fit.posterior, candidates, hs.rewards.maxCoeff());
              break;
            default:
              break;
          }
          x_next = candidates.row(idx).transpose();
        }
      }
      const auto t1 = std::chrono::steady_clock::now();
      wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    } catch (const Error& e) {
      result.failed = true;
      result.failure = e.what();
      break;
    }

    RngStream noise_rng = noise_root.fork(static_cast<std::uint64_t>(n_init + t - 1));
    const double y = obj.evaluate(x_next, noise_rng);
    h.append(x_next, y);

    TraceRow row;
    row.iter = n_init + t;
    row.x = x_next;
    row.y = y;
    row.regret = obj.mu_max - obj.true_mean(x_next);
    cum += row.regret;
    row.regret_cum = cum;
    row.k_n = k_n;
    row.wall_ms = wall_ms;
    result.trace.rows.push_back(row);
  }
  return result;
}

}  // namespace infbo
