#include "hozog/inner_solvers.hpp"

#include <cmath>
#include <random>

#include "hozog/errors.hpp"

namespace hozog {

namespace {

// Shared iteration loop. `visit` sees w_0 and then each w_t.
template <typename Visit>
void iterate(const LossGradient& loss_grad, const IterativeAlgorithm& alg, const HyperParams& lambda,
             const ModelParams& w0, Visit&& visit) {
  Vector w = w0.values;
  visit(w);
  if (alg.iterations == 0) return;

  Vector grad(w.size());
  Vector m, v;
  if (alg.variant == InnerVariant::Adam) {
    m = Vector::Zero(w.size());
    v = Vector::Zero(w.size());
  }
  const AdamConstants& c = alg.adam;
  double beta1_pow = 1.0;
  double beta2_pow = 1.0;

  for (std::size_t t = 1; t <= alg.iterations; ++t) {
    grad.setZero();
    loss_grad(w, lambda.values, grad);
    if (!grad.allFinite()) throw NonFiniteIterate(t);

    if (alg.variant == InnerVariant::GD) {
      w.noalias() -= alg.lr * grad;
    } else {
      beta1_pow *= c.beta1;
      beta2_pow *= c.beta2;
      m = c.beta1 * m + (1.0 - c.beta1) * grad;
      v = c.beta2 * v + (1.0 - c.beta2) * grad.cwiseProduct(grad);
      const double m_scale = 1.0 / (1.0 - beta1_pow);
      const double v_scale = 1.0 / (1.0 - beta2_pow);
      w.array() -= alg.lr * (m.array() * m_scale) / ((v.array() * v_scale).sqrt() + c.eps);
    }
    if (!w.allFinite()) throw NonFiniteIterate(t);
    visit(w);
  }
}

IterativeAlgorithm with_variant(IterativeAlgorithm alg, InnerVariant variant) {
  alg.variant = variant;
  return alg;
}

}  // namespace

void IterativeAlgorithm::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw InvalidConfig("inner learning rate must be positive");
  if (variant == InnerVariant::Adam) {
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) throw InvalidConfig("adam beta1 must lie in [0, 1)");
    if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) throw InvalidConfig("adam beta2 must lie in [0, 1)");
    if (!(adam.eps > 0.0)) throw InvalidConfig("adam eps must be positive");
  }
  if (init == InitRule::Gaussian && !(init_scale > 0.0)) {
    throw InvalidConfig("init_scale must be positive");
  }
  if (w0 && (w0->size() == 0 || !w0->values.allFinite())) {
    throw InvalidConfig("w0 must be a non-empty finite vector");
  }
}

ModelParams initial_point(const IterativeAlgorithm& alg, std::size_t dim, std::uint64_t seed) {
  if (alg.w0) {
    if (alg.w0->size() != static_cast<Eigen::Index>(dim)) {
      throw DimensionMismatch("w0 has length " + std::to_string(alg.w0->size()) + ", model needs " +
                              std::to_string(dim));
    }
    return *alg.w0;
  }
  Vector w = Vector::Zero(static_cast<Eigen::Index>(dim));
  if (alg.init == InitRule::Gaussian) {
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, alg.init_scale);
    for (auto& x : w) x = normal(rng);
  }
  return ModelParams(std::move(w));
}

ModelParams gd_step(const LossGradient& loss_grad, const ModelParams& w, const HyperParams& lambda,
                    double lr) {
  Vector grad = Vector::Zero(w.size());
  loss_grad(w.values, lambda.values, grad);
  return ModelParams(w.values - lr * grad);
}

ModelParams gd_solve(const LossGradient& loss_grad, const IterativeAlgorithm& alg,
                     const HyperParams& lambda, const ModelParams& w0) {
  return solve(loss_grad, with_variant(alg, InnerVariant::GD), lambda, w0);
}

ModelParams adam_solve(const LossGradient& loss_grad, const IterativeAlgorithm& alg,
                       const HyperParams& lambda, const ModelParams& w0) {
  return solve(loss_grad, with_variant(alg, InnerVariant::Adam), lambda, w0);
}

ModelParams solve(const LossGradient& loss_grad, const IterativeAlgorithm& alg,
                  const HyperParams& lambda, const ModelParams& w0) {
  Vector last;
  iterate(loss_grad, alg, lambda, w0, [&](const Vector& w) { last = w; });
  return ModelParams(std::move(last));
}

std::vector<ModelParams> trajectory(const LossGradient& loss_grad, const IterativeAlgorithm& alg,
                                    const HyperParams& lambda, const ModelParams& w0) {
  std::vector<ModelParams> path;
  path.reserve(alg.iterations + 1);
  iterate(loss_grad, alg, lambda, w0, [&](const Vector& w) { path.emplace_back(w); });
  return path;
}

ModelParams gd_solve(const LossGradient& loss_grad, const IterativeAlgorithm& alg,
                     const HyperParams& lambda, std::size_t dim) {
  return gd_solve(loss_grad, alg, lambda, initial_point(alg, dim, 0));
}

ModelParams adam_solve(const LossGradient& loss_grad, const IterativeAlgorithm& alg,
                       const HyperParams& lambda, std::size_t dim) {
  return adam_solve(loss_grad, alg, lambda, initial_point(alg, dim, 0));
}

}  // namespace hozog
