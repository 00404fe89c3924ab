#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include <Eigen/Dense>

namespace hozog {

using Vector = Eigen::VectorXd;

// Every seeded stream in the library is a 64-bit Mersenne twister.
using Rng = std::mt19937_64;

/// Outer variable lambda: the hyperparameters being tuned.
struct HyperParams {
  Vector values;

  HyperParams() = default;
  explicit HyperParams(Vector v) : values(std::move(v)) {}

  static HyperParams constant(Eigen::Index p, double value) {
    return HyperParams(Vector::Constant(p, value));
  }

  Eigen::Index size() const { return values.size(); }
  double operator[](Eigen::Index i) const { return values[i]; }
  bool all_finite() const { return values.allFinite(); }
};

/// Inner variable w returned by the training algorithm.
struct ModelParams {
  Vector values;

  ModelParams() = default;
  explicit ModelParams(Vector v) : values(std::move(v)) {}

  Eigen::Index size() const { return values.size(); }
  double operator[](Eigen::Index i) const { return values[i]; }
};

}  // namespace hozog
