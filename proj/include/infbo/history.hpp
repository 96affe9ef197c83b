#pragma once

#include <Eigen/Dense>

#include "infbo/errors.hpp"

namespace infbo {

// Axis-aligned design-space box.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(const Eigen::VectorXd& x, double tol = 1e-12) const {
    if (x.size() != lo.size()) return false;
    for (Eigen::Index k = 0; k < x.size(); ++k)
      if (x[k] < lo[k] - tol || x[k] > hi[k] + tol) return false;
    return true;
  }

  // Largest pairwise distance between box corners (the main diagonal).
  double diameter() const { return (hi - lo).norm(); }
};

// Evaluated (input, reward) pairs plus the fixed design-space bounds.
struct ObservationHistory {
  Eigen::MatrixXd inputs;   // n x d
  Eigen::VectorXd rewards;  // n
  Box bounds;

  int n() const { return static_cast<int>(inputs.rows()); }
  int dim() const { return bounds.dim(); }

  void append(const Eigen::VectorXd& x, double y) {
    if (x.size() != bounds.lo.size())
      throw DimensionMismatch("ObservationHistory::append: input dimension mismatch");
    inputs.conservativeResize(inputs.rows() + 1, bounds.dim());
    inputs.row(inputs.rows() - 1) = x.transpose();
    rewards.conservativeResize(rewards.size() + 1);
    rewards[rewards.size() - 1] = y;
  }

  static ObservationHistory empty(const Box& bounds) {
    ObservationHistory h;
    h.inputs.resize(0, bounds.dim());
    h.rewards.resize(0);
    h.bounds = bounds;
    return h;
  }
};

}  // namespace infbo
