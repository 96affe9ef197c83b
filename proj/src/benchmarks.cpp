#include "infbo/benchmarks.hpp"

#include <algorithm>
#include <cmath>

#include "infbo/distributions.hpp"
#include "infbo/errors.hpp"

namespace infbo {

namespace {

void check_box(const Eigen::VectorXd& x, double lo, double hi, const char* name) {
  for (Eigen::Index k = 0; k < x.size(); ++k)
    if (x[k] < lo - 1e-12 || x[k] > hi + 1e-12)
      throw OutOfBounds(std::string(name) + ": input outside the standard box");
}

Box make_box(int d, double lo, double hi) {
  Box b;
  b.lo = Eigen::VectorXd::Constant(d, lo);
  b.hi = Eigen::VectorXd::Constant(d, hi);
  return b;
}

constexpr double kStybTangCoord = -2.9035340276;
constexpr double kStybTangPerDim = -39.16616570377142;

}  // namespace

double NoiseModel::sample(RngStream& rng) const {
  switch (kind) {
    case Kind::kGaussian:
      if (sd < 0.0) throw InvalidParameter("NoiseModel: sd must be >= 0");
      return sd == 0.0 ? 0.0 : sample_normal(0.0, sd, rng);
    case Kind::kWeibull: {
      const double draw = sample_weibull(shape, scale, rng);
      if (!centered) return draw;
      return draw - scale * std::tgamma(1.0 + 1.0 / shape);
    }
  }
  throw InvalidParameter("NoiseModel: unknown kind");
}

double sample_noise(const NoiseModel& model, RngStream& rng) { return model.sample(rng); }

double eval_ackley(const Eigen::VectorXd& x) {
  check_box(x, -5.0, 5.0, "eval_ackley");
  const double d = static_cast<double>(x.size());
  const double a = 20.0, b = 0.2, c = 2.0 * M_PI;
  double sum_sq = 0.0, sum_cos = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    sum_sq += x[k] * x[k];
    sum_cos += std::cos(c * x[k]);
  }
  return -a * std::exp(-b * std::sqrt(sum_sq / d)) - std::exp(sum_cos / d) + a + std::exp(1.0);
}

double eval_rosenbrock(const Eigen::VectorXd& x) {
  check_box(x, -2.0, 2.0, "eval_rosenbrock");
  if (x.size() < 2) throw InvalidParameter("eval_rosenbrock: needs dim >= 2");
  double total = 0.0;
  for (Eigen::Index k = 0; k + 1 < x.size(); ++k) {
    const double a = x[k + 1] - x[k] * x[k];
    const double b = 1.0 - x[k];
    total += 100.0 * a * a + b * b;
  }
  return total;
}

double eval_stybtang(const Eigen::VectorXd& x) {
  check_box(x, -5.0, 5.0, "eval_stybtang");
  double total = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double s = x[k] * x[k];
    total += s * s - 16.0 * s + 5.0 * x[k];
  }
  return 0.5 * total;
}

BoxOptimum grid_optimum(const std::function<double(const Eigen::VectorXd&)>& f,
                        const Box& bounds, long budget) {
  const int d = bounds.dim();
  const long per_dim =
      std::max<long>(3, static_cast<long>(std::floor(std::pow(static_cast<double>(budget),
                                                              1.0 / d))));
  Eigen::VectorXd x(d), best_x(d);
  double best = -std::numeric_limits<double>::infinity();
  double worst = std::numeric_limits<double>::infinity();
  std::vector<long> idx(static_cast<size_t>(d), 0);
  long total = 1;
  for (int k = 0; k < d; ++k) total *= per_dim;
  for (long t = 0; t < total; ++t) {
    long rem = t;
    for (int k = 0; k < d; ++k) {
      idx[static_cast<size_t>(k)] = rem % per_dim;
      rem /= per_dim;
      x[k] = bounds.lo[k] + (bounds.hi[k] - bounds.lo[k]) *
                                static_cast<double>(idx[static_cast<size_t>(k)]) /
                                static_cast<double>(per_dim - 1);
    }
    const double v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
    if (v < worst) worst = v;
  }

  // Coordinate-descent refinement around the best grid cell.
  Eigen::VectorXd cell = (bounds.hi - bounds.lo) / static_cast<double>(per_dim - 1);
  for (int pass = 0; pass < 60; ++pass) {
    for (int k = 0; k < d; ++k) {
      double lo = std::max(bounds.lo[k], best_x[k] - cell[k]);
      double hi = std::min(bounds.hi[k], best_x[k] + cell[k]);
      for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        Eigen::VectorXd x1 = best_x, x2 = best_x;
        x1[k] = m1;
        x2[k] = m2;
        if (f(x1) < f(x2))
          lo = m1;
        else
          hi = m2;
      }
      best_x[k] = 0.5 * (lo + hi);
    }
    const double v = f(best_x);
    if (v > best) best = v;
  }
  return BoxOptimum{best_x, best, worst};
}

Objective apply_nonstationary(const Objective& base, double alpha) {
  if (!std::isfinite(alpha)) throw InvalidParameter("apply_nonstationary: alpha must be finite");
  Objective out = base;
  out.name = base.name + "_ns";
  const auto base_mean = base.true_mean;
  out.true_mean = [base_mean, alpha](const Eigen::VectorXd& x) {
    const double s = x[0];
    return (1.0 + alpha * std::sin(s) * std::exp(s)) * base_mean(x);
  };
  const BoxOptimum opt = grid_optimum(out.true_mean, out.bounds);
  out.mu_max = opt.value;
  out.x_opt = opt.x;
  out.mu_range = opt.value - opt.min_value;
  return out;
}

namespace {

Objective base_objective(const std::string& family, int dim) {
  Objective obj;
  obj.dim = dim;
  if (family == "ackley") {
    obj.name = "ackley";
    obj.bounds = make_box(dim, -5.0, 5.0);
    obj.true_mean = [](const Eigen::VectorXd& x) { return -eval_ackley(x); };
    obj.mu_max = 0.0;
    obj.x_opt = Eigen::VectorXd::Zero(dim);
  } else if (family == "rosenbrock") {
    if (dim < 2) throw ConfigError("rosenbrock requires dimension >= 2");
    obj.name = "rosenbrock";
    obj.bounds = make_box(dim, -2.0, 2.0);
    obj.true_mean = [](const Eigen::VectorXd& x) { return -eval_rosenbrock(x); };
    obj.mu_max = 0.0;
    obj.x_opt = Eigen::VectorXd::Ones(dim);
  } else if (family == "stybtang") {
    obj.name = "stybtang";
    obj.bounds = make_box(dim, -5.0, 5.0);
    obj.true_mean = [](const Eigen::VectorXd& x) { return -eval_stybtang(x); };
    obj.mu_max = -kStybTangPerDim * dim;
    obj.x_opt = Eigen::VectorXd::Constant(dim, kStybTangCoord);
  } else if (family == "quadratic") {
    if (dim != 1) throw ConfigError("quadratic is a 1-d benchmark");
    obj.name = "quadratic";
    obj.bounds = make_box(1, -1.0, 1.0);
    obj.true_mean = [](const Eigen::VectorXd& x) {
      const double t = x[0] - 0.3;
      return -t * t;
    };
    obj.mu_max = 0.0;
    obj.x_opt = Eigen::VectorXd::Constant(1, 0.3);
  } else {
    throw ConfigError("unknown benchmark family: " + family);
  }
  const BoxOptimum opt = grid_optimum(obj.true_mean, obj.bounds);
  obj.mu_range = obj.mu_max - opt.min_value;
  return obj;
}

}  // namespace

Objective make_objective(const std::string& name, int dim) {
  std::string family = name;
  std::string variant;
  if (name.size() > 3 && (name.ends_with("_ht") || name.ends_with("_ns"))) {
    family = name.substr(0, name.size() - 3);
    variant = name.substr(name.size() - 2);
  }
  Objective obj = base_objective(family, dim);
  if (variant == "ht") {
    // Heavy-tailed corruption: centered Weibull with shape below one.
    obj.name = family + "_ht";
    obj.noise = NoiseModel{NoiseModel::Kind::kWeibull, 0.0, 0.7, 1.0, true};
  } else if (variant == "ns") {
    obj = apply_nonstationary(obj, 0.1);
    obj.noise = NoiseModel{NoiseModel::Kind::kGaussian, 0.05 * obj.mu_range, 1.0, 1.0, true};
  } else if (family == "quadratic") {
    obj.noise = NoiseModel{NoiseModel::Kind::kGaussian, 0.0, 1.0, 1.0, true};
  } else {
    obj.noise = NoiseModel{NoiseModel::Kind::kGaussian, 0.05 * obj.mu_range, 1.0, 1.0, true};
  }
  return obj;
}

std::vector<std::string> objective_names() {
  return {"ackley",    "ackley_ht",     "ackley_ns",     "rosenbrock", "rosenbrock_ht",
          "rosenbrock_ns", "stybtang", "stybtang_ht", "stybtang_ns", "quadratic"};
}

}  // namespace infbo
