#include "hozog/random_search.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "hozog/errors.hpp"

namespace hozog {

void RsConfig::validate() const {
  if (budget < 1) throw InvalidConfig("random search budget must be at least 1");
  box.validate();
}

RandomSearchResult random_search(const ObjectiveSpec& spec, const RsConfig& cfg,
                                 const IterateRecorder& recorder, std::size_t max_workers,
                                 const FailureLog& on_failure) {
  cfg.validate();
  spec.validate();
  if (cfg.box.dim() != static_cast<Eigen::Index>(spec.p)) {
    throw DimensionMismatch("random search box has " + std::to_string(cfg.box.dim()) +
                            " coordinates, objective expects " + std::to_string(spec.p));
  }

  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vector width = cfg.box.hi - cfg.box.lo;
  std::vector<HyperParams> samples;
  samples.reserve(cfg.budget);
  for (std::size_t i = 0; i < cfg.budget; ++i) {
    Vector x(cfg.box.dim());
    for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = cfg.box.lo[j] + width[j] * unit(rng);
    samples.emplace_back(std::move(x));
  }

  RandomSearchResult result;
  result.incumbent_f = std::numeric_limits<double>::infinity();
  std::optional<NonFiniteObjective> last_failure;
  const std::size_t chunk = std::max<std::size_t>(64, max_workers);
  for (std::size_t start = 0; start < samples.size(); start += chunk) {
    const std::size_t stop = std::min(samples.size(), start + chunk);
    const std::vector<HyperParams> batch(samples.begin() + static_cast<long>(start),
                                         samples.begin() + static_cast<long>(stop));
    std::vector<EvaluationOutcome> outcomes = try_evaluate_batch(spec, batch, max_workers);
    for (std::size_t j = 0; j < outcomes.size(); ++j) {
      const std::size_t index = start + j;
      ++result.evaluations;
      if (auto* failure = std::get_if<NonFiniteObjective>(&outcomes[j])) {
        ++result.failures;
        if (on_failure) on_failure(index, *failure);
        last_failure = *failure;
        continue;
      }
      const Evaluation& eval = std::get<Evaluation>(outcomes[j]);
      if (result.incumbent.size() == 0 || eval.f_value < result.incumbent_f) {
        result.incumbent = eval.lambda;
        result.incumbent_f = eval.f_value;
      }
      if (recorder) recorder(IterateEvent{index, eval.lambda, &eval, index + 1});
    }
  }
  if (result.incumbent.size() == 0) throw *last_failure;
  return result;
}

}  // namespace hozog
