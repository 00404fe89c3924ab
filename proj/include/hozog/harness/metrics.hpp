#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hozog/harness/trace.hpp"
#include "hozog/oracle.hpp"
#include "hozog/zo.hpp"

namespace hozog::harness {

struct MetricSettings {
  std::size_t q = 1;
  double mu = 0.01;
  DirectionScheme scheme = DirectionScheme::UnitSphere;
  bool gradient = true;
};

struct MetricValues {
  double f_value = 0.0;
  double suboptimality = 0.0;
  double grad_norm_est = std::numeric_limits<double>::quiet_NaN();
  double test_error = std::numeric_limits<double>::quiet_NaN();
  std::size_t metric_calls = 0;
};

/// Metrics at lambda. `known` supplies f(lambda) and the model when the
/// optimizer already evaluated it; otherwise f is bought with metric calls.
/// suboptimality = f - min(history_min, f). grad_norm_est is the norm of a
/// fresh averaged estimate (q + 1 calls) drawn from `metrics_rng`.
MetricValues compute_metrics(const ObjectiveSpec& spec, const HyperParams& lambda, double history_min,
                             const MetricSettings& settings, Rng& metrics_rng,
                             const Evaluation* known = nullptr, std::size_t max_workers = 1);

/// When a TraceRecorder emits a record. By default every `cadence`-th event.
/// With `calls_stride` set, events whose cumulative optimizer calls are a
/// multiple of it instead, so methods with different per-step costs land on
/// the same call axis. `last_calls` forces the event with that call count.
/// Events without a known evaluation (the final HOZOG iterate) always emit.
struct EmitRule {
  std::size_t cadence = 1;
  std::optional<std::size_t> calls_stride;
  std::optional<std::size_t> last_calls;

  bool emits(const IterateEvent& event) const;
};

/// IterateRecorder that turns optimizer events into TraceRecords. The running
/// minimum sees the f of every event, emitted or not.
class TraceRecorder {
 public:
  using Sink = std::function<void(const TraceRecord&)>;

  TraceRecorder(std::string method, const ObjectiveSpec& spec, MetricSettings settings,
                EmitRule rule, std::uint64_t metrics_seed, std::size_t max_workers,
                Sink sink = {});

  void operator()(const IterateEvent& event);
  IterateRecorder as_recorder();

  const std::vector<TraceRecord>& records() const { return records_; }
  std::size_t metric_calls() const { return metric_calls_; }
  double running_min() const { return history_min_; }

 private:
  std::string method_;
  const ObjectiveSpec& spec_;
  MetricSettings settings_;
  EmitRule rule_;
  Rng rng_;
  std::size_t max_workers_;
  Sink sink_;
  std::chrono::steady_clock::time_point start_;
  double history_min_ = std::numeric_limits<double>::infinity();
  std::size_t metric_calls_ = 0;
  std::vector<TraceRecord> records_;
};

}  // namespace hozog::harness
