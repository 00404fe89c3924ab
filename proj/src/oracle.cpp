#include "hozog/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hozog/parallel.hpp"

namespace hozog {

namespace {

std::string describe(const HyperParams& lambda) {
  std::ostringstream out;
  out.precision(17);
  out << '[';
  const Eigen::Index shown = std::min<Eigen::Index>(lambda.size(), 8);
  for (Eigen::Index i = 0; i < shown; ++i) out << (i ? ", " : "") << lambda[i];
  if (shown < lambda.size()) out << ", ... (" << lambda.size() << " entries)";
  out << ']';
  return out.str();
}

void check_dimension(const ObjectiveSpec& spec, const HyperParams& lambda) {
  if (lambda.size() != static_cast<Eigen::Index>(spec.p)) {
    throw DimensionMismatch("objective '" + spec.name + "' expects " + std::to_string(spec.p) +
                            " hyperparameters, got " + std::to_string(lambda.size()));
  }
}

}  // namespace

NonFiniteObjective::NonFiniteObjective(HyperParams lambda, const std::string& detail,
                                       std::optional<std::size_t> meta_iter)
    : Error("non-finite objective at lambda=" + describe(lambda) +
            (meta_iter ? " (meta-iteration " + std::to_string(*meta_iter) + ")" : "") + ": " +
            detail),
      lambda_(std::move(lambda)),
      detail_(detail),
      meta_iter_(meta_iter) {}

Box Box::uniform(Eigen::Index p, double lo, double hi) {
  return Box{Vector::Constant(p, lo), Vector::Constant(p, hi)};
}

void Box::validate() const {
  if (lo.size() != hi.size()) throw InvalidConfig("box bounds have different lengths");
  if (lo.size() == 0) throw InvalidConfig("box must have at least one coordinate");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(lo[i] < hi[i])) {
      throw InvalidConfig("box coordinate " + std::to_string(i) + " needs finite lo < hi");
    }
  }
}

bool Box::contains(const HyperParams& lambda) const {
  return lambda.size() == dim() && (lambda.values.array() >= lo.array()).all() &&
         (lambda.values.array() <= hi.array()).all();
}

HyperParams Box::clamp(const HyperParams& lambda) const {
  return HyperParams(lambda.values.cwiseMax(lo).cwiseMin(hi));
}

void ObjectiveSpec::validate() const {
  if (p == 0) throw InvalidConfig("objective '" + name + "' has p = 0");
  if (!solve) throw InvalidConfig("objective '" + name + "' has no solve routine");
  if (bounds) {
    bounds->validate();
    if (bounds->dim() != static_cast<Eigen::Index>(p)) {
      throw InvalidConfig("objective '" + name + "' bounds do not match p");
    }
  }
}

ObjectiveSpec make_function_objective(std::size_t p, std::function<double(const Vector&)> f,
                                      std::string name, bool parallel_safe) {
  ObjectiveSpec spec;
  spec.name = std::move(name);
  spec.p = p;
  spec.parallel_safe = parallel_safe;
  spec.solve = [f = std::move(f)](const HyperParams& lambda, std::uint64_t) {
    return InnerResult{f(lambda.values), ModelParams{}, 0};
  };
  return spec;
}

Evaluation evaluate(const ObjectiveSpec& spec, const HyperParams& lambda) {
  check_dimension(spec, lambda);
  if (!lambda.all_finite()) throw NonFiniteObjective(lambda, "hyperparameters are not finite");
  InnerResult inner;
  try {
    inner = spec.solve(lambda, spec.inner_seed);
  } catch (const NonFiniteIterate& e) {
    throw NonFiniteObjective(lambda, e.what());
  }
  if (!std::isfinite(inner.f_value)) throw NonFiniteObjective(lambda, "outer loss is not finite");
  return Evaluation{lambda, inner.f_value, std::move(inner.model), inner.inner_steps_used};
}

std::vector<EvaluationOutcome> try_evaluate_batch(const ObjectiveSpec& spec,
                                                  const std::vector<HyperParams>& lambdas,
                                                  std::size_t max_workers) {
  for (const auto& lambda : lambdas) check_dimension(spec, lambda);
  std::vector<std::optional<EvaluationOutcome>> slots(lambdas.size());
  const std::size_t workers = spec.parallel_safe ? max_workers : 1;
  parallel_for(lambdas.size(), workers, [&](std::size_t i) {
    try {
      slots[i].emplace(evaluate(spec, lambdas[i]));
    } catch (const NonFiniteObjective& e) {
      slots[i].emplace(e);
    }
  });
  std::vector<EvaluationOutcome> out;
  out.reserve(slots.size());
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

std::vector<Evaluation> evaluate_batch(const ObjectiveSpec& spec,
                                       const std::vector<HyperParams>& lambdas,
                                       std::size_t max_workers) {
  auto outcomes = try_evaluate_batch(spec, lambdas, max_workers);
  std::vector<Evaluation> out;
  out.reserve(outcomes.size());
  for (auto& outcome : outcomes) {
    if (auto* failure = std::get_if<NonFiniteObjective>(&outcome)) throw *failure;
    out.push_back(std::move(std::get<Evaluation>(outcome)));
  }
  return out;
}

}  // namespace hozog
