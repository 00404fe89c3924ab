#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "hozog/oracle.hpp"
#include "hozog/types.hpp"

namespace hozog {

enum class DirectionScheme {
  UnitSphere,  // Gaussian draw normalised to unit length
  Gaussian,    // i.i.d. standard normal entries
};

/// Constants of the outer loop.
struct ZoConfig {
  std::size_t q = 1;      // directions per estimate
  double mu = 0.01;       // smoothing radius
  double gamma = 0.05;    // outer step size
  std::size_t T = 0;      // meta-iterations
  std::uint64_t seed = 0;
  DirectionScheme direction_scheme = DirectionScheme::UnitSphere;
  // Derive a fresh inner seed every meta-iteration instead of using the
  // objective's frozen one.
  bool reseed_inner = false;

  void validate() const;
};

/// q directions of length p, stored as the columns of a p x q matrix.
struct DirectionSet {
  Eigen::MatrixXd directions;

  std::size_t count() const { return static_cast<std::size_t>(directions.cols()); }
  Eigen::Index dim() const { return directions.rows(); }
};

struct GradientEstimate {
  Vector vector;
  std::size_t eval_count = 0;  // q + 1
  Evaluation base;             // the shared f(lambda) evaluation
};

/// Draws q directions from `rng`, column by column.
DirectionSet sample_directions(std::size_t p, std::size_t q, DirectionScheme scheme, Rng& rng);

/// Averaged forward-difference estimate
///   (p / (mu q)) * sum_i (f(lambda + mu u_i) - f(lambda)) u_i
/// from q + 1 oracle calls. f(lambda) is evaluated once; the sum runs in
/// direction order after all calls return, so the result does not depend on
/// scheduling. Throws NonFiniteObjective for a non-finite oracle value.
GradientEstimate estimate_hyper_gradient(const HyperParams& lambda, const ObjectiveSpec& oracle,
                                         const ZoConfig& cfg, const DirectionSet& dirs,
                                         std::size_t max_workers = 1);

/// lambda - gamma * grad.
HyperParams hozog_step(const HyperParams& lambda, const GradientEstimate& grad, double gamma);

/// Reported once per iterate. `evaluation` points at f(lambda) when the
/// optimizer already paid for it; it is null for the final iterate.
struct IterateEvent {
  std::size_t meta_iter = 0;
  const HyperParams& lambda;
  const Evaluation* evaluation = nullptr;
  std::size_t optimizer_calls = 0;  // cumulative
};

using IterateRecorder = std::function<void(const IterateEvent&)>;

/// Runs T meta-iterations of estimate-then-step from lambda0 and returns
/// lambda_T. The recorder sees lambda_0 .. lambda_T (T + 1 events). When the
/// objective declares bounds, each updated lambda is clamped into them.
/// NonFiniteObjective is rethrown with the meta-iteration index attached.
HyperParams run_hozog(const ObjectiveSpec& spec, const HyperParams& lambda0, const ZoConfig& cfg,
                      const IterateRecorder& recorder = {}, std::size_t max_workers = 1);

/// Inner seed used at meta-iteration k when ZoConfig::reseed_inner is set.
std::uint64_t reseeded_inner_seed(std::uint64_t base, std::size_t meta_iter);

}  // namespace hozog
