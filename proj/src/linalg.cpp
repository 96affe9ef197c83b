#include "infbo/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "infbo/distributions.hpp"
#include "infbo/errors.hpp"

namespace infbo {

double CholeskyFactor::log_det() const {
  return 2.0 * lower.diagonal().array().log().sum();
}

bool is_symmetric(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

CholeskyFactor cholesky_jittered(const Eigen::MatrixXd& m, double base_jitter) {
  if (m.rows() != m.cols())
    throw DimensionMismatch("cholesky_jittered: matrix must be square");
  if (base_jitter < 0.0)
    throw InvalidParameter("cholesky_jittered: base_jitter must be >= 0");
  if (m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0)
    return CholeskyFactor{Eigen::MatrixXd::Zero(m.rows(), m.cols()), 0.0};

  double jitter = 0.0;
  for (int attempt = 0; attempt <= 7; ++attempt) {
    Eigen::MatrixXd work = m;
    if (jitter > 0.0) work.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(work);
    if (llt.info() == Eigen::Success) {
      return CholeskyFactor{llt.matrixL(), jitter};
    }
    if (base_jitter == 0.0) break;
    jitter = (attempt == 0) ? base_jitter : jitter * 10.0;
  }
  throw FactorizationFailure("cholesky_jittered: factorization failed after jitter escalation");
}

CholeskyFactor cholesky_default_jitter(const Eigen::MatrixXd& m) {
  const double mean_diag = m.rows() > 0 ? m.diagonal().mean() : 0.0;
  return cholesky_jittered(m, 1e-8 * std::max(mean_diag, 0.0));
}

Conditional mvn_condition(const Eigen::MatrixXd& joint_cov,
                          const Eigen::VectorXd& joint_mean,
                          const std::vector<int>& observed_idx,
                          const Eigen::VectorXd& observed_vals) {
  const Eigen::Index dim = joint_cov.rows();
  if (joint_cov.cols() != dim || joint_mean.size() != dim)
    throw DimensionMismatch("mvn_condition: inconsistent joint dimensions");
  if (observed_idx.empty())
    throw InvalidParameter("mvn_condition: observed index set must be nonempty");
  if (static_cast<Eigen::Index>(observed_idx.size()) != observed_vals.size())
    throw DimensionMismatch("mvn_condition: observed_vals size mismatch");

  std::vector<char> is_obs(static_cast<size_t>(dim), 0);
  for (int i : observed_idx) {
    if (i < 0 || i >= dim) throw InvalidParameter("mvn_condition: index out of range");
    if (is_obs[static_cast<size_t>(i)]) throw InvalidParameter("mvn_condition: duplicate index");
    is_obs[static_cast<size_t>(i)] = 1;
  }
  std::vector<int> pred;
  for (Eigen::Index i = 0; i < dim; ++i)
    if (!is_obs[static_cast<size_t>(i)]) pred.push_back(static_cast<int>(i));

  const Eigen::Index no = static_cast<Eigen::Index>(observed_idx.size());
  const Eigen::Index np = static_cast<Eigen::Index>(pred.size());

  Eigen::MatrixXd s_oo(no, no), s_po(np, no), s_pp(np, np);
  Eigen::VectorXd mu_o(no), mu_p(np);
  for (Eigen::Index a = 0; a < no; ++a) {
    mu_o[a] = joint_mean[observed_idx[static_cast<size_t>(a)]];
    for (Eigen::Index b = 0; b < no; ++b)
      s_oo(a, b) = joint_cov(observed_idx[static_cast<size_t>(a)],
                             observed_idx[static_cast<size_t>(b)]);
  }
  for (Eigen::Index a = 0; a < np; ++a) {
    mu_p[a] = joint_mean[pred[static_cast<size_t>(a)]];
    for (Eigen::Index b = 0; b < no; ++b)
      s_po(a, b) = joint_cov(pred[static_cast<size_t>(a)], observed_idx[static_cast<size_t>(b)]);
    for (Eigen::Index b = 0; b < np; ++b)
      s_pp(a, b) = joint_cov(pred[static_cast<size_t>(a)], pred[static_cast<size_t>(b)]);
  }

  const CholeskyFactor chol = cholesky_default_jitter(s_oo);
  const Eigen::MatrixXd gain = chol.solve(s_po.transpose());  // S_oo^{-1} S_op

  Conditional out;
  out.mean = mu_p + gain.transpose() * (observed_vals - mu_o);
  out.cov = s_pp - s_po * gain;
  out.cov = 0.5 * (out.cov + out.cov.transpose().eval());
  return out;
}

Eigen::VectorXd mvn_sample(const Eigen::VectorXd& mean, const CholeskyFactor& chol,
                           RngStream& rng) {
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sample_normal(0.0, 1.0, rng);
  return mean + chol.lower * z;
}

Eigen::VectorXd mvn_sample(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                           RngStream& rng) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size())
    throw DimensionMismatch("mvn_sample: cov/mean dimension mismatch");
  return mvn_sample(mean, cholesky_default_jitter(cov), rng);
}

}  // namespace infbo
