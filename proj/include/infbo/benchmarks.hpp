#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "infbo/history.hpp"
#include "infbo/rng.hpp"

namespace infbo {

// Additive observation noise: exact Gaussian or (optionally centered)
// Weibull. Centering subtracts the analytic mean scale * Gamma(1 + 1/shape).
struct NoiseModel {
  enum class Kind { kGaussian, kWeibull };
  Kind kind = Kind::kGaussian;
  double sd = 0.0;        // gaussian
  double shape = 1.0;     // weibull
  double scale = 1.0;     // weibull
  bool centered = true;   // weibull

  double sample(RngStream& rng) const;
};

double sample_noise(const NoiseModel& model, RngStream& rng);

// Synthetic objective on a box, stated on the maximization scale (the
// classical minimization benchmarks enter negated). The true mean is
// deterministic; all randomness comes from the noise model.
struct Objective {
  std::string name;
  int dim = 1;
  Box bounds;
  std::function<double(const Eigen::VectorXd&)> true_mean;
  NoiseModel noise;

  double mu_max = 0.0;      // cached optimum value of true_mean over the box
  Eigen::VectorXd x_opt;    // cached optimum location
  double mu_range = 0.0;    // cached max - min of true_mean over the box

  double evaluate(const Eigen::VectorXd& x, RngStream& rng) const {
    return true_mean(x) + noise.sample(rng);
  }
};

// Raw benchmark values on their standard boxes (minimization scale).
// Throw OutOfBounds outside the box.
double eval_ackley(const Eigen::VectorXd& x);      // [-5, 5]^d, min 0 at origin
double eval_rosenbrock(const Eigen::VectorXd& x);  // [-2, 2]^d, min 0 at ones
double eval_stybtang(const Eigen::VectorXd& x);    // [-5, 5]^d

// Multiply the true mean by (1 + alpha sin(s) e^s) with s the first
// coordinate; the optimum and range are recomputed by dense grid search plus
// coordinate-descent refinement.
Objective apply_nonstationary(const Objective& base, double alpha);

// Registry lookup: ackley | rosenbrock | stybtang with optional _ht / _ns
// suffix, plus "quadratic" (d = 1, noiseless).
Objective make_objective(const std::string& name, int dim);
std::vector<std::string> objective_names();

// Grid search (about 10^6 points) refined by per-coordinate ternary descent.
struct BoxOptimum {
  Eigen::VectorXd x;
  double value = 0.0;
  double min_value = 0.0;  // grid minimum, for range estimates
};
BoxOptimum grid_optimum(const std::function<double(const Eigen::VectorXd&)>& f,
                        const Box& bounds, long budget = 1000000);

// Per-iteration optimization record.
struct TraceRow {
  int iter = 0;
  Eigen::VectorXd x;
  double y = 0.0;         // observed (noisy) reward, original units
  double regret = 0.0;    // mu_max - true_mean(x)
  double regret_cum = 0.0;
  int k_n = 0;            // occupied surfaces; 0 for baselines and seeding rows
  double wall_ms = 0.0;   // fit + acquisition time; 0 for seeding rows
};

struct RegretTrace {
  int dim = 0;
  std::vector<TraceRow> rows;

  double final_cumulative() const { return rows.empty() ? 0.0 : rows.back().regret_cum; }
};

}  // namespace infbo
