#include "infbo/gp.hpp"

#include <cmath>

#include "infbo/distributions.hpp"
#include "infbo/errors.hpp"

namespace infbo {

void KernelParams::validate() const {
  if (!(sigma2 > 0.0)) throw InvalidParameter("KernelParams: sigma2 must be > 0");
  if (phi.size() == 0) throw InvalidParameter("KernelParams: phi is empty");
  for (Eigen::Index k = 0; k < phi.size(); ++k)
    if (!(phi[k] > 0.0) || phi[k] > b_phi)
      throw InvalidParameter("KernelParams: phi must lie in (0, b_phi]");
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                   const Eigen::VectorXd& phi) {
  if (a.cols() != b.cols() || a.cols() != phi.size())
    throw DimensionMismatch("correlation_matrix: column counts must equal dim(phi)");
  Eigen::MatrixXd out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      double q = 0.0;
      for (Eigen::Index k = 0; k < phi.size(); ++k) {
        const double diff = a(i, k) - b(j, k);
        q += phi[k] * diff * diff;
      }
      out(i, j) = std::exp(-q);
    }
  }
  return out;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                              const KernelParams& kp) {
  return kp.sigma2 * correlation_matrix(a, b, kp.phi);
}

KrigingContext KrigingContext::build(const Eigen::MatrixXd& train, const KernelParams& kp) {
  kp.validate();
  KrigingContext ctx;
  ctx.train = train;
  ctx.kp = kp;
  ctx.rho = correlation_matrix(train, train, kp.phi);
  // Force exact symmetry before factoring; the assembly loop is symmetric up
  // to rounding only.
  ctx.rho = 0.5 * (ctx.rho + ctx.rho.transpose().eval());
  ctx.rho_chol = cholesky_default_jitter(ctx.rho);
  return ctx;
}

KrigingResult kriging(const KrigingContext& ctx, const Eigen::VectorXd& surface_vals,
                      const Eigen::MatrixXd& query) {
  if (surface_vals.size() != ctx.train.rows())
    throw DimensionMismatch("kriging: surface value count != training size");
  const Eigen::MatrixXd cross = correlation_matrix(query, ctx.train, ctx.kp.phi);
  // Work in correlation space; sigma2 scales the covariance only.
  const Eigen::MatrixXd w = ctx.rho_chol.solve(cross.transpose());  // rho^{-1} cross^T
  KrigingResult out;
  out.mean = cross * ctx.rho_chol.solve(surface_vals);
  Eigen::MatrixXd cov =
      ctx.kp.sigma2 * (correlation_matrix(query, query, ctx.kp.phi) - cross * w);
  out.cov = 0.5 * (cov + cov.transpose().eval());
  return out;
}

KrigingResult kriging(const Eigen::VectorXd& surface_vals, const Eigen::MatrixXd& train,
                      const Eigen::MatrixXd& query, const KernelParams& kp) {
  return kriging(KrigingContext::build(train, kp), surface_vals, query);
}

KrigingResult GpPosterior::predict(const Eigen::MatrixXd& query) const {
  const Eigen::MatrixXd cross = kernel_matrix(query, train, kp);
  const Eigen::MatrixXd w = chol.solve(cross.transpose());
  KrigingResult out;
  out.mean = Eigen::VectorXd::Constant(query.rows(), y_center) + cross * alpha;
  Eigen::MatrixXd cov = kernel_matrix(query, query, kp) - cross * w;
  out.cov = 0.5 * (cov + cov.transpose().eval());
  return out;
}

namespace {

GpPosterior make_posterior(const Eigen::MatrixXd& train, const Eigen::VectorXd& y,
                           const KernelParams& kp, double tau2) {
  GpPosterior post;
  post.train = train;
  post.kp = kp;
  post.tau2 = tau2;
  post.y_center = y.mean();
  Eigen::MatrixXd k = kernel_matrix(train, train, kp);
  k.diagonal().array() += tau2;
  post.chol = cholesky_default_jitter(k);
  post.alpha = post.chol.solve((y.array() - post.y_center).matrix().eval());
  return post;
}

// Marginal log likelihood of centered targets plus log priors, in
// theta = (log sigma2, log tau2, log phi_1..d). The phi prior is uniform on
// (0, b_phi]; proposals beyond the support return -inf.
double log_posterior(const Eigen::VectorXd& theta, const Eigen::MatrixXd& train,
                     const Eigen::VectorXd& yc, const GpPriors& pr) {
  const int d = static_cast<int>(train.cols());
  const double log_s2 = theta[0], log_t2 = theta[1];
  if (log_s2 > 50.0 || log_t2 > 50.0 || log_s2 < -50.0 || log_t2 < -50.0)
    return -std::numeric_limits<double>::infinity();
  const double s2 = std::exp(log_s2), t2 = std::exp(log_t2);
  Eigen::VectorXd phi(d);
  for (int k = 0; k < d; ++k) {
    phi[k] = std::exp(theta[2 + k]);
    if (!(phi[k] > 0.0) || phi[k] > pr.b_phi)
      return -std::numeric_limits<double>::infinity();
  }

  Eigen::MatrixXd k = s2 * correlation_matrix(train, train, phi);
  k.diagonal().array() += t2;
  CholeskyFactor chol;
  try {
    chol = cholesky_default_jitter(k);
  } catch (const FactorizationFailure&) {
    return -std::numeric_limits<double>::infinity();
  }
  const Eigen::VectorXd alpha = chol.solve(yc);
  const double n = static_cast<double>(train.rows());
  double lp = -0.5 * yc.dot(alpha) - 0.5 * chol.log_det() -
              0.5 * n * std::log(2.0 * M_PI);
  // Inverse-gamma priors on sigma2/tau2 with the log-space Jacobian folded in.
  lp += -pr.a_sigma * log_s2 - pr.b_sigma / s2;
  lp += -pr.a_tau * log_t2 - pr.b_tau / t2;
  // Uniform phi prior contributes log(phi) from the change of variables.
  for (int kk = 0; kk < d; ++kk) lp += theta[2 + kk];
  return lp;
}

}  // namespace

BaselineFit baseline_gp_fit(const ObservationHistory& h, const GpPriors& priors,
                            RngStream& rng, int chain_length) {
  const int n = h.n();
  const int d = h.dim();
  if (n < 2) throw InvalidParameter("baseline_gp_fit: needs at least 2 observations");

  const Eigen::VectorXd yc = (h.rewards.array() - h.rewards.mean()).matrix();
  const double var_y = std::max(yc.squaredNorm() / std::max(n - 1, 1), 1e-8);

  Eigen::VectorXd theta(2 + d);
  theta[0] = std::log(var_y);
  theta[1] = std::log(0.1 * var_y);
  for (int k = 0; k < d; ++k) {
    const double width = std::max(h.bounds.hi[k] - h.bounds.lo[k], 1e-8);
    theta[2 + k] = std::log(std::min(4.0 / (width * width), priors.b_phi));
  }

  double lp = log_posterior(theta, h.inputs, yc, priors);
  const int burn = chain_length / 2;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(theta.size());
  int kept = 0;
  int accepted = 0;
  const double step = 0.15;
  for (int it = 0; it < chain_length; ++it) {
    Eigen::VectorXd prop = theta;
    for (Eigen::Index k = 0; k < prop.size(); ++k)
      prop[k] += sample_normal(0.0, step, rng);
    const double lp_prop = log_posterior(prop, h.inputs, yc, priors);
    if (std::log(rng.uniform01_open_left()) < lp_prop - lp) {
      theta = prop;
      lp = lp_prop;
      ++accepted;
    }
    if (it >= burn) {
      sum += theta;
      ++kept;
    }
  }
  if (accepted == 0)
    throw ChainDivergence("baseline_gp_fit: Metropolis chain never accepted a proposal");

  const Eigen::VectorXd mean_theta = sum / static_cast<double>(kept);
  BaselineFit fit;
  fit.sigma2 = std::exp(mean_theta[0]);
  fit.tau2 = std::exp(mean_theta[1]);
  fit.phi.resize(d);
  for (int k = 0; k < d; ++k) fit.phi[k] = std::min(std::exp(mean_theta[2 + k]), priors.b_phi);
  fit.acceptance_rate = static_cast<double>(accepted) / chain_length;

  KernelParams kp;
  kp.sigma2 = fit.sigma2;
  kp.phi = fit.phi;
  kp.b_phi = priors.b_phi;
  fit.posterior = make_posterior(h.inputs, h.rewards, kp, fit.tau2);
  return fit;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

double expected_improvement(double mean, double sd, double incumbent_best) {
  const double delta = mean - incumbent_best;
  if (sd < 1e-12) return std::max(delta, 0.0);
  const double z = delta / sd;
  return delta * normal_cdf(z) + sd * normal_pdf(z);
}

int argmax_lowest_index(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

int acquire_ucb(const GpPosterior& post, const Eigen::MatrixXd& candidates, int n) {
  const KrigingResult pred = post.predict(candidates);
  const int m = static_cast<int>(candidates.rows());
  const double delta = 0.1;
  const double nn = std::max(n, 1);
  const double beta_n =
      2.0 * std::log(m * nn * nn * M_PI * M_PI / (6.0 * delta));
  Eigen::VectorXd score(m);
  for (int i = 0; i < m; ++i)
    score[i] = pred.mean[i] +
               std::sqrt(std::max(beta_n, 0.0)) * std::sqrt(std::max(pred.cov(i, i), 0.0));
  return argmax_lowest_index(score);
}

int acquire_ei(const GpPosterior& post, const Eigen::MatrixXd& candidates,
               double incumbent_best) {
  const KrigingResult pred = post.predict(candidates);
  Eigen::VectorXd score(candidates.rows());
  for (int i = 0; i < candidates.rows(); ++i) {
    const double sd = std::sqrt(std::max(pred.cov(i, i), 0.0));
    score[i] = expected_improvement(pred.mean[i], sd, incumbent_best);
  }
  return argmax_lowest_index(score);
}

int acquire_gp_ts(const GpPosterior& post, const Eigen::MatrixXd& candidates,
                  RngStream& rng) {
  const KrigingResult pred = post.predict(candidates);
  const Eigen::VectorXd path = mvn_sample(pred.mean, pred.cov, rng);
  return argmax_lowest_index(path);
}

}  // namespace infbo
