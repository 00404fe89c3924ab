#include "hozog/zo.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "hozog/errors.hpp"

namespace hozog {

void ZoConfig::validate() const {
  if (q < 1) throw InvalidConfig("q must be at least 1");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidConfig("mu must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidConfig("gamma must be positive");
}

DirectionSet sample_directions(std::size_t p, std::size_t q, DirectionScheme scheme, Rng& rng) {
  std::normal_distribution<double> normal;
  DirectionSet set;
  set.directions.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
  for (Eigen::Index i = 0; i < set.directions.cols(); ++i) {
    auto u = set.directions.col(i);
    if (scheme == DirectionScheme::Gaussian) {
      for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = normal(rng);
      continue;
    }
    double norm = 0.0;
    do {
      for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = normal(rng);
      norm = u.norm();
    } while (norm == 0.0);
    u /= norm;
  }
  return set;
}

GradientEstimate estimate_hyper_gradient(const HyperParams& lambda, const ObjectiveSpec& oracle,
                                         const ZoConfig& cfg, const DirectionSet& dirs,
                                         std::size_t max_workers) {
  const std::size_t q = dirs.count();
  if (dirs.dim() != lambda.size()) {
    throw DimensionMismatch("directions have length " + std::to_string(dirs.dim()) +
                            ", lambda has " + std::to_string(lambda.size()));
  }
  if (q == 0) throw InvalidConfig("direction set is empty");

  std::vector<HyperParams> points;
  points.reserve(q + 1);
  points.push_back(lambda);
  for (std::size_t i = 0; i < q; ++i) {
    points.emplace_back(lambda.values + cfg.mu * dirs.directions.col(static_cast<Eigen::Index>(i)));
  }
  std::vector<Evaluation> evals = evaluate_batch(oracle, points, max_workers);

  const double f0 = evals[0].f_value;
  Vector sum = Vector::Zero(lambda.size());
  for (std::size_t i = 0; i < q; ++i) {
    sum += (evals[i + 1].f_value - f0) * dirs.directions.col(static_cast<Eigen::Index>(i));
  }
  const double scale = static_cast<double>(lambda.size()) / (cfg.mu * static_cast<double>(q));

  GradientEstimate out;
  out.vector = scale * sum;
  out.eval_count = q + 1;
  out.base = std::move(evals[0]);
  return out;
}

HyperParams hozog_step(const HyperParams& lambda, const GradientEstimate& grad, double gamma) {
  if (grad.vector.size() != lambda.size()) {
    throw DimensionMismatch("gradient length does not match lambda");
  }
  return HyperParams(lambda.values - gamma * grad.vector);
}

std::uint64_t reseeded_inner_seed(std::uint64_t base, std::size_t meta_iter) {
  // splitmix64 finaliser over (base, k).
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(meta_iter) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

HyperParams run_hozog(const ObjectiveSpec& spec, const HyperParams& lambda0, const ZoConfig& cfg,
                      const IterateRecorder& recorder, std::size_t max_workers) {
  cfg.validate();
  spec.validate();
  if (lambda0.size() != static_cast<Eigen::Index>(spec.p)) {
    throw DimensionMismatch("lambda0 has length " + std::to_string(lambda0.size()) +
                            ", objective expects " + std::to_string(spec.p));
  }

  Rng rng(cfg.seed);
  HyperParams lambda = lambda0;
  std::size_t calls = 0;
  ObjectiveSpec iteration_spec = spec;

  for (std::size_t k = 0; k < cfg.T; ++k) {
    if (cfg.reseed_inner) iteration_spec.inner_seed = reseeded_inner_seed(spec.inner_seed, k);
    // Directions are fixed before any evaluation is dispatched.
    const DirectionSet dirs = sample_directions(spec.p, cfg.q, cfg.direction_scheme, rng);
    GradientEstimate grad;
    try {
      grad = estimate_hyper_gradient(lambda, iteration_spec, cfg, dirs, max_workers);
    } catch (const NonFiniteObjective& e) {
      throw e.at_meta_iter(k);
    }
    calls += grad.eval_count;
    if (recorder) recorder(IterateEvent{k, lambda, &grad.base, calls});

    lambda = hozog_step(lambda, grad, cfg.gamma);
    if (spec.bounds) lambda = spec.bounds->clamp(lambda);
  }
  if (recorder) recorder(IterateEvent{cfg.T, lambda, nullptr, calls});
  return lambda;
}

}  // namespace hozog
