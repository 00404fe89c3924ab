#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "hozog/oracle.hpp"
#include "hozog/zo.hpp"

namespace hozog {

struct RsConfig {
  std::size_t budget = 1;
  Box box;
  std::uint64_t seed = 0;

  void validate() const;
};

struct RandomSearchResult {
  HyperParams incumbent;
  double incumbent_f = 0.0;
  std::size_t evaluations = 0;  // == budget
  std::size_t failures = 0;     // samples skipped for a non-finite objective
};

/// Called for each skipped sample.
using FailureLog = std::function<void(std::size_t sample, const NonFiniteObjective&)>;

/// Uniform i.i.d. sampling over cfg.box, keeping the best point seen. Samples
/// are drawn up front from cfg.seed, so worker count never changes them; the
/// recorder sees every successful sample in index order. Non-finite samples
/// are logged and skipped. Throws NonFiniteObjective only if every sample fails.
RandomSearchResult random_search(const ObjectiveSpec& spec, const RsConfig& cfg,
                                 const IterateRecorder& recorder = {}, std::size_t max_workers = 1,
                                 const FailureLog& on_failure = {});

}  // namespace hozog
