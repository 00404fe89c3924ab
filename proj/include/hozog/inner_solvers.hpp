#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hozog/types.hpp"

namespace hozog {

/// Writes grad_w L(w, lambda) into `grad` (already sized like w).
using LossGradient = std::function<void(const Vector& w, const Vector& lambda, Vector& grad)>;

enum class InnerVariant { GD, Adam };

struct AdamConstants {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

enum class InitRule { Zero, Gaussian };

/// A fixed-length iterative algorithm w_t = Phi_t(w_{t-1}, lambda).
struct IterativeAlgorithm {
  InnerVariant variant = InnerVariant::GD;
  std::size_t iterations = 0;
  double lr = 0.1;
  AdamConstants adam;
  // Explicit starting point; when empty, `init` decides.
  std::optional<ModelParams> w0;
  InitRule init = InitRule::Zero;
  double init_scale = 0.01;

  void validate() const;
};

/// w0 for a model of dimension `dim`: the explicit w0 when set, zeros, or
/// N(0, init_scale^2) entries drawn from `seed`.
ModelParams initial_point(const IterativeAlgorithm& alg, std::size_t dim, std::uint64_t seed);

/// One gradient-descent step map: w - lr * grad_w L(w, lambda).
ModelParams gd_step(const LossGradient& loss_grad, const ModelParams& w, const HyperParams& lambda,
                    double lr);

/// Full-batch gradient descent from `w0` for alg.iterations steps.
/// Throws NonFiniteIterate(t) as soon as a gradient or iterate stops being finite.
ModelParams gd_solve(const LossGradient& loss_grad, const IterativeAlgorithm& alg,
                     const HyperParams& lambda, const ModelParams& w0);

/// Bias-corrected Adam with zero-initialised moments.
ModelParams adam_solve(const LossGradient& loss_grad, const IterativeAlgorithm& alg,
                       const HyperParams& lambda, const ModelParams& w0);

/// Dispatches on alg.variant.
ModelParams solve(const LossGradient& loss_grad, const IterativeAlgorithm& alg,
                  const HyperParams& lambda, const ModelParams& w0);

/// [w_0, w_1, ..., w_T] for the variant in `alg`; the last entry is bitwise
/// equal to what solve() returns.
std::vector<ModelParams> trajectory(const LossGradient& loss_grad, const IterativeAlgorithm& alg,
                                    const HyperParams& lambda, const ModelParams& w0);

// Convenience overloads starting from initial_point(alg, dim, 0).
ModelParams gd_solve(const LossGradient& loss_grad, const IterativeAlgorithm& alg,
                     const HyperParams& lambda, std::size_t dim);
ModelParams adam_solve(const LossGradient& loss_grad, const IterativeAlgorithm& alg,
                       const HyperParams& lambda, std::size_t dim);

}  // namespace hozog
