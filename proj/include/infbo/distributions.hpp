#pragma once

#include <Eigen/Dense>
#include <vector>

#include "infbo/rng.hpp"

// Samplers and densities used by the model and the benchmarks.
//
// Parameter conventions, used everywhere in this codebase:
//   - Gamma(shape, rate): density x^{shape-1} exp(-rate x), mean shape/rate.
//   - InverseGamma(shape a, scale b): density x^{-a-1} exp(-b/x),
//     mean b/(a-1) for a > 1; sampled as 1/Gamma(a, rate=b).
//   - Weibull(shape k, scale s): mean s * Gamma(1 + 1/k).
// All samplers are deterministic functions of (parameters, stream state).
namespace infbo {

double sample_normal(double mean, double sd, RngStream& rng);
double sample_uniform(double lo, double hi, RngStream& rng);
double sample_gamma(double shape, double rate, RngStream& rng);

// Same draw together with its logarithm, which stays finite even when the
// value itself underflows to zero (tiny shapes produce draws far below the
// smallest normal double).
struct GammaDraw {
  double value;
  double log_value;
};
GammaDraw sample_gamma_with_log(double shape, double rate, RngStream& rng);

double sample_beta(double alpha, double beta, RngStream& rng);
double sample_inverse_gamma(double shape, double scale, RngStream& rng);
double sample_weibull(double shape, double scale, RngStream& rng);

// Index draw proportional to `weights` (nonnegative, positive sum; normalized
// internally). Throws DegenerateWeights when every weight is zero.
int sample_categorical(const Eigen::VectorXd& weights, RngStream& rng);

// Index draw from unnormalized log weights, stabilized by a max shift.
// Entries of -inf are treated as probability zero.
int sample_categorical_log(const Eigen::VectorXd& log_weights, RngStream& rng);

double logpdf_normal(double y, double mean, double var);

}  // namespace infbo
