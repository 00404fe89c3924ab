#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hozog/errors.hpp"
#include "hozog/types.hpp"

namespace hozog {

/// Per-coordinate closed box [lo, hi].
struct Box {
  Vector lo;
  Vector hi;

  static Box uniform(Eigen::Index p, double lo, double hi);

  Eigen::Index dim() const { return lo.size(); }
  /// Throws InvalidConfig unless sizes agree and lo < hi everywhere.
  void validate() const;
  bool contains(const HyperParams& lambda) const;
  HyperParams clamp(const HyperParams& lambda) const;
};

/// Result of one black-box call: the solver output w(lambda) and E(w(lambda), lambda).
struct Evaluation {
  HyperParams lambda;
  double f_value = 0.0;
  ModelParams model;
  std::size_t inner_steps_used = 0;
};

/// What a problem's solve routine hands back; `evaluate` attaches lambda.
struct InnerResult {
  double f_value = 0.0;
  ModelParams model;
  std::size_t inner_steps_used = 0;
};

/// Runs the inner algorithm A(lambda) and scores the result with the outer
/// loss E. Must be a pure function of its arguments.
using SolveFn = std::function<InnerResult(const HyperParams& lambda, std::uint64_t inner_seed)>;

/// Model-quality metric on held-out data (test error), when the problem has one.
using TestMetricFn = std::function<double(const ModelParams& model)>;

/// A bilevel problem instance f(lambda) = E(A(lambda), lambda). Problem data
/// and solver settings live inside `solve` and are immutable once built.
struct ObjectiveSpec {
  std::string name;
  std::size_t p = 0;
  SolveFn solve;
  std::optional<Box> bounds;
  // When false, batches are evaluated on the calling thread only.
  bool parallel_safe = true;
  // Frozen seed for any randomness in the inner solver (initialisation).
  std::uint64_t inner_seed = 0;
  TestMetricFn test_error;

  /// Throws InvalidConfig on p == 0, a missing solve routine, or bad bounds.
  void validate() const;
};

/// Wraps a plain function of lambda as an objective with an empty model.
ObjectiveSpec make_function_objective(std::size_t p, std::function<double(const Vector&)> f,
                                      std::string name = "function", bool parallel_safe = true);

/// f(lambda). Throws DimensionMismatch on a wrong-length lambda and
/// NonFiniteObjective when the inner solve diverges or E is not finite.
Evaluation evaluate(const ObjectiveSpec& spec, const HyperParams& lambda);

using EvaluationOutcome = std::variant<Evaluation, NonFiniteObjective>;

/// Evaluates every lambda, concurrently when the spec allows it. Results are
/// in input order and identical to sequential evaluation; non-finite
/// objectives are returned in place rather than thrown.
std::vector<EvaluationOutcome> try_evaluate_batch(const ObjectiveSpec& spec,
                                                  const std::vector<HyperParams>& lambdas,
                                                  std::size_t max_workers);

/// As try_evaluate_batch, but throws the first NonFiniteObjective by input index.
std::vector<Evaluation> evaluate_batch(const ObjectiveSpec& spec,
                                       const std::vector<HyperParams>& lambdas,
                                       std::size_t max_workers);

}  // namespace hozog
