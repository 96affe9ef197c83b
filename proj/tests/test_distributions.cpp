#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "infbo/distributions.hpp"
#include "infbo/errors.hpp"
#include "infbo/rng.hpp"

using namespace infbo;

namespace {

struct Moments {
  double mean, var, se_mean, se_var;
};

template <typename F>
Moments estimate(F&& draw, int n) {
  std::vector<double> xs(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) xs[static_cast<size_t>(i)] = draw();
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double var = m2 / (n - 1);
  m4 /= n;
  const double se_var = std::sqrt(std::max(m4 - var * var, 0.0) / n);
  return {mean, var, std::sqrt(var / n), se_var};
}

}  // namespace

TEST_CASE("rng streams are reproducible and forks are decorrelated") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream root(7);
  RngStream c1 = root.fork(1), c2 = root.fork(2), c1_again = root.fork(1);
  CHECK(c1.next_u64() == c1_again.next_u64());
  CHECK(c1.key() != c2.key());
  // Forking is insensitive to parent consumption.
  RngStream root2(7);
  root2.next_u64();
  CHECK(root2.fork(1).key() == root.fork(1).key());
  CHECK(root.fork("gibbs").key() != root.fork("acq").key());
}

TEST_CASE("beta mean matches alpha/(alpha+beta) for Beta(1,100)") {
  RngStream rng(101);
  const auto m = estimate([&] { return sample_beta(1.0, 100.0, rng); }, 100000);
  CHECK(std::abs(m.mean - 1.0 / 101.0) < 3.0 * m.se_mean);
}

TEST_CASE("inverse-gamma(2,1) sample mean near b/(a-1)=1") {
  RngStream rng(202);
  const auto m = estimate([&] { return sample_inverse_gamma(2.0, 1.0, rng); }, 100000);
  CHECK(std::abs(m.mean - 1.0) < 3.0 * m.se_mean);
}

TEST_CASE("categorical with single support point always picks it") {
  RngStream rng(3);
  Eigen::VectorXd w(3);
  w << 0.0, 0.0, 5.0;
  for (int i = 0; i < 200; ++i) CHECK(sample_categorical(w, rng) == 2);
}

TEST_CASE("moment checks across parameter settings") {
  RngStream rng(999);
  const int n = 100000;

  SUBCASE("normal") {
    for (auto [mu, sd] : {std::pair{0.0, 1.0}, {3.0, 0.5}, {-2.0, 4.0}}) {
      const auto m = estimate([&] { return sample_normal(mu, sd, rng); }, n);
      CHECK(std::abs(m.mean - mu) < 4.0 * m.se_mean);
      CHECK(std::abs(m.var - sd * sd) < 4.0 * m.se_var);
    }
  }
  SUBCASE("gamma, including shape below one") {
    for (auto [a, r] : {std::pair{0.5, 1.0}, {2.0, 3.0}, {9.0, 0.5}}) {
      const auto m = estimate([&] { return sample_gamma(a, r, rng); }, n);
      CHECK(std::abs(m.mean - a / r) < 4.0 * m.se_mean);
      CHECK(std::abs(m.var - a / (r * r)) < 4.0 * m.se_var);
    }
  }
  SUBCASE("beta") {
    for (auto [a, b] : {std::pair{1.0, 1.0}, {2.0, 5.0}, {0.5, 0.5}}) {
      const auto m = estimate([&] { return sample_beta(a, b, rng); }, n);
      const double mean = a / (a + b);
      const double var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
      CHECK(std::abs(m.mean - mean) < 4.0 * m.se_mean);
      CHECK(std::abs(m.var - var) < 4.0 * m.se_var);
    }
  }
  SUBCASE("inverse gamma with finite fourth moments") {
    for (auto [a, b] : {std::pair{5.0, 2.0}, {8.0, 1.0}, {6.0, 6.0}}) {
      const auto m = estimate([&] { return sample_inverse_gamma(a, b, rng); }, n);
      const double mean = b / (a - 1.0);
      const double var = b * b / ((a - 1.0) * (a - 1.0) * (a - 2.0));
      CHECK(std::abs(m.mean - mean) < 4.0 * m.se_mean);
      CHECK(std::abs(m.var - var) < 4.0 * m.se_var);
    }
  }
  SUBCASE("weibull") {
    for (auto [k, s] : {std::pair{1.0, 1.0}, {0.8, 2.0}, {2.5, 0.7}}) {
      const auto m = estimate([&] { return sample_weibull(k, s, rng); }, n);
      const double g1 = std::tgamma(1.0 + 1.0 / k);
      const double g2 = std::tgamma(1.0 + 2.0 / k);
      CHECK(std::abs(m.mean - s * g1) < 4.0 * m.se_mean);
      CHECK(std::abs(m.var - s * s * (g2 - g1 * g1)) < 4.0 * m.se_var);
    }
  }
  SUBCASE("uniform") {
    for (auto [lo, hi] : {std::pair{0.0, 1.0}, {-3.0, 5.0}, {10.0, 10.5}}) {
      const auto m = estimate([&] { return sample_uniform(lo, hi, rng); }, n);
      CHECK(std::abs(m.mean - 0.5 * (lo + hi)) < 4.0 * m.se_mean);
      CHECK(std::abs(m.var - (hi - lo) * (hi - lo) / 12.0) < 4.0 * m.se_var);
    }
  }
}

TEST_CASE("categorical frequencies follow the weights") {
  RngStream rng(77);
  Eigen::VectorXd w(3);
  w << 2.0, 1.0, 1.0;
  const int n = 100000;
  Eigen::Vector3d hits = Eigen::Vector3d::Zero();
  for (int i = 0; i < n; ++i) hits[sample_categorical(w, rng)] += 1.0;
  for (int k = 0; k < 3; ++k) {
    const double p = w[k] / w.sum();
    CHECK(std::abs(hits[k] / n - p) < 4.0 * std::sqrt(p * (1 - p) / n));
  }
}

TEST_CASE("log-space categorical matches linear weights under a huge shift") {
  RngStream rng1(5), rng2(5);
  Eigen::VectorXd logw(3);
  logw << -1000.0, -1001.0, -1002.0;
  Eigen::VectorXd w(3);
  w << 1.0, std::exp(-1.0), std::exp(-2.0);
  for (int i = 0; i < 50; ++i)
    CHECK(sample_categorical_log(logw, rng1) == sample_categorical(w, rng2));
}

TEST_CASE("logpdf_normal exact values and quadrature normalization") {
  const double half_log_2pi = 0.5 * std::log(2.0 * M_PI);
  CHECK(logpdf_normal(0.3, 0.3, 1.0) == doctest::Approx(-half_log_2pi).epsilon(1e-14));
  CHECK(logpdf_normal(1.3, 0.3, 1.0) == doctest::Approx(-half_log_2pi - 0.5).epsilon(1e-14));

  // Simpson quadrature of exp(logpdf) over [-10, 10].
  const int steps = 20000;
  const double h = 20.0 / steps;
  double total = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double y = -10.0 + i * h;
    const double f = std::exp(logpdf_normal(y, 0.0, 1.0));
    const double wgt = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    total += wgt * f;
  }
  total *= h / 3.0;
  CHECK(std::abs(total - 1.0) < 1e-6);
}

TEST_CASE("invalid parameters are rejected") {
  RngStream rng(1);
  CHECK_THROWS_AS(sample_gamma(0.0, 1.0, rng), InvalidParameter);
  CHECK_THROWS_AS(sample_gamma(1.0, -1.0, rng), InvalidParameter);
  CHECK_THROWS_AS(sample_inverse_gamma(-2.0, 1.0, rng), InvalidParameter);
  CHECK_THROWS_AS(sample_weibull(0.0, 1.0, rng), InvalidParameter);
  CHECK_THROWS_AS(sample_beta(1.0, 0.0, rng), InvalidParameter);
  CHECK_THROWS_AS(logpdf_normal(0.0, 0.0, 0.0), InvalidParameter);
  CHECK_THROWS_AS(logpdf_normal(0.0, 0.0, -1.0), InvalidParameter);
  Eigen::VectorXd zeros = Eigen::VectorXd::Zero(4);
  CHECK_THROWS_AS(sample_categorical(zeros, rng), DegenerateWeights);
}
