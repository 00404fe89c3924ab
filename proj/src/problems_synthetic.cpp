#include <cmath>

#include "hozog/errors.hpp"
#include "hozog/problems.hpp"

namespace hozog::problems {

void SyntheticBilevel::validate() const {
  if (!(w_star > 0.0 && w_star < c) || !std::isfinite(c)) {
    throw InvalidConfig("synthetic problem needs 0 < w_star < c (got c=" + std::to_string(c) +
                        ", w_star=" + std::to_string(w_star) + ")");
  }
}

double SyntheticBilevel::minimizer() const { return std::log((c / w_star - 1.0) / 2.0); }

double synthetic_inner_solution(double c, double lambda) {
  return c / (1.0 + 2.0 * std::exp(lambda));
}

double synthetic_value(const SyntheticBilevel& problem, double lambda) {
  const double r = synthetic_inner_solution(problem.c, lambda) - problem.w_star;
  return 0.5 * r * r;
}

double synthetic_analytic_hypergradient(double c, double w_star, double lambda) {
  const double e = std::exp(lambda);
  const double denom = 1.0 + 2.0 * e;
  const double w = c / denom;
  // dw/dlambda = -2 e^lambda c / (1 + 2 e^lambda)^2
  return (w - w_star) * (-2.0 * e * c) / (denom * denom);
}

LossGradient synthetic_loss_gradient(double c) {
  return [c](const Vector& w, const Vector& lambda, Vector& grad) {
    grad = (w.array() - c).matrix() + 2.0 * std::exp(lambda[0]) * w;
  };
}

ObjectiveSpec make_synthetic(double c, double w_star) {
  const SyntheticBilevel problem{c, w_star};
  problem.validate();
  ObjectiveSpec spec;
  spec.name = "synthetic";
  spec.p = 1;
  spec.solve = [problem](const HyperParams& lambda, std::uint64_t) {
    const double w = synthetic_inner_solution(problem.c, lambda[0]);
    const double r = w - problem.w_star;
    return InnerResult{0.5 * r * r, ModelParams(Vector::Constant(1, w)), 0};
  };
  return spec;
}

ObjectiveSpec make_synthetic(double c, double w_star, const IterativeAlgorithm& inner) {
  const SyntheticBilevel problem{c, w_star};
  problem.validate();
  inner.validate();
  ObjectiveSpec spec;
  spec.name = "synthetic";
  spec.p = 1;
  spec.solve = [problem, inner, grad = synthetic_loss_gradient(c)](const HyperParams& lambda,
                                                                   std::uint64_t seed) {
    ModelParams w = solve(grad, inner, lambda, initial_point(inner, 1, seed));
    const double r = w[0] - problem.w_star;
    return InnerResult{0.5 * r * r, std::move(w), inner.iterations};
  };
  return spec;
}

}  // namespace hozog::problems
