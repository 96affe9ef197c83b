#include "infbo/distributions.hpp"

#include <cmath>
#include <limits>

#include "infbo/errors.hpp"

namespace infbo {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double sample_normal(double mean, double sd, RngStream& rng) {
  if (sd < 0.0) throw InvalidParameter("sample_normal: sd must be >= 0");
  // Box-Muller, one variate per call; the second is discarded so the
  // stream position depends only on the number of calls.
  const double u1 = rng.uniform01_open_left();
  const double u2 = rng.uniform01();
  return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double sample_uniform(double lo, double hi, RngStream& rng) {
  if (!(hi >= lo)) throw InvalidParameter("sample_uniform: hi < lo");
  return lo + (hi - lo) * rng.uniform01();
}

GammaDraw sample_gamma_with_log(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw InvalidParameter("sample_gamma: shape and rate must be > 0");
  // Marsaglia-Tsang squeeze for shape >= 1; small shapes are boosted through
  // shape+1 and scaled back with U^{1/shape}. The log is accumulated
  // alongside so tiny shapes keep a finite log even when the value
  // underflows.
  double log_boost = 0.0;
  double a = shape;
  if (a < 1.0) {
    log_boost = std::log(rng.uniform01_open_left()) / a;
    a += 1.0;
  }
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double w;
    do {
      x = sample_normal(0.0, 1.0, rng);
      w = 1.0 + c * x;
    } while (w <= 0.0);
    const double v = w * w * w;
    const double u = rng.uniform01_open_left();
    const bool accept = (u < 1.0 - 0.0331 * x * x * x * x) ||
                        (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)));
    if (accept) {
      const double log_value =
          log_boost + std::log(d) + 3.0 * std::log1p(c * x) - std::log(rate);
      return GammaDraw{std::exp(log_boost) * d * v / rate, log_value};
    }
  }
}

double sample_gamma(double shape, double rate, RngStream& rng) {
  return sample_gamma_with_log(shape, rate, rng).value;
}

double sample_beta(double alpha, double beta, RngStream& rng) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw InvalidParameter("sample_beta: both shape parameters must be > 0");
  const double x = sample_gamma(alpha, 1.0, rng);
  const double y = sample_gamma(beta, 1.0, rng);
  return x / (x + y);
}

double sample_inverse_gamma(double shape, double scale, RngStream& rng) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw InvalidParameter("sample_inverse_gamma: shape and scale must be > 0");
  return 1.0 / sample_gamma(shape, scale, rng);
}

double sample_weibull(double shape, double scale, RngStream& rng) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw InvalidParameter("sample_weibull: shape and scale must be > 0");
  return scale * std::pow(-std::log(rng.uniform01_open_left()), 1.0 / shape);
}

int sample_categorical(const Eigen::VectorXd& weights, RngStream& rng) {
  const Eigen::Index n = weights.size();
  if (n == 0) throw DegenerateWeights("sample_categorical: empty weight vector");
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (weights[i] < 0.0 || !std::isfinite(weights[i]))
      throw InvalidParameter("sample_categorical: weights must be finite and >= 0");
    total += weights[i];
  }
  if (total <= 0.0) throw DegenerateWeights("sample_categorical: all weights are zero");
  const double u = rng.uniform01() * total;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += weights[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(n - 1);  // u landed on the rounding boundary
}

int sample_categorical_log(const Eigen::VectorXd& log_weights, RngStream& rng) {
  const Eigen::Index n = log_weights.size();
  if (n == 0) throw DegenerateWeights("sample_categorical_log: empty weight vector");
  const double m = log_weights.maxCoeff();
  if (!std::isfinite(m))
    throw DegenerateWeights("sample_categorical_log: no finite log weight");
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i)
    w[i] = std::isfinite(log_weights[i]) ? std::exp(log_weights[i] - m) : 0.0;
  return sample_categorical(w, rng);
}

double logpdf_normal(double y, double mean, double var) {
  if (!(var > 0.0)) throw InvalidParameter("logpdf_normal: var must be > 0");
  const double r = y - mean;
  return -0.5 * (std::log(kTwoPi * var) + r * r / var);
}

}  // namespace infbo
