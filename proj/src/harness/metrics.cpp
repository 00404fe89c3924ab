#include "hozog/harness/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace hozog::harness {

MetricValues compute_metrics(const ObjectiveSpec& spec, const HyperParams& lambda, double history_min,
                             const MetricSettings& settings, Rng& metrics_rng, const Evaluation* known,
                             std::size_t max_workers) {
  MetricValues out;
  std::optional<Evaluation> bought;
  if (settings.gradient) {
    ZoConfig zo;
    zo.q = settings.q;
    zo.mu = settings.mu;
    zo.direction_scheme = settings.scheme;
    const DirectionSet dirs = sample_directions(spec.p, settings.q, settings.scheme, metrics_rng);
    GradientEstimate est = estimate_hyper_gradient(lambda, spec, zo, dirs, max_workers);
    out.metric_calls += est.eval_count;
    out.grad_norm_est = est.vector.norm();
    if (!known) bought = std::move(est.base);
  } else if (!known) {
    bought = evaluate(spec, lambda);
    out.metric_calls += 1;
  }
  const Evaluation& eval = known ? *known : *bought;
  out.f_value = eval.f_value;
  out.suboptimality = out.f_value - std::min(history_min, out.f_value);
  if (spec.test_error && eval.model.size() > 0) out.test_error = spec.test_error(eval.model);
  return out;
}

bool EmitRule::emits(const IterateEvent& event) const {
  if (event.evaluation == nullptr) return true;
  if (last_calls && event.optimizer_calls == *last_calls) return true;
  if (calls_stride) return *calls_stride > 0 && event.optimizer_calls % *calls_stride == 0;
  return event.meta_iter % std::max<std::size_t>(cadence, 1) == 0;
}

TraceRecorder::TraceRecorder(std::string method, const ObjectiveSpec& spec, MetricSettings settings,
                             EmitRule rule, std::uint64_t metrics_seed, std::size_t max_workers,
                             Sink sink)
    : method_(std::move(method)),
      spec_(spec),
      settings_(settings),
      rule_(rule),
      rng_(metrics_seed),
      max_workers_(max_workers),
      sink_(std::move(sink)),
      start_(std::chrono::steady_clock::now()) {}

void TraceRecorder::operator()(const IterateEvent& event) {
  if (!rule_.emits(event)) {
    history_min_ = std::min(history_min_, event.evaluation->f_value);
    return;
  }
  const MetricValues m = compute_metrics(spec_, event.lambda, history_min_, settings_, rng_,
                                         event.evaluation, max_workers_);
  metric_calls_ += m.metric_calls;
  history_min_ = std::min(history_min_, m.f_value);

  TraceRecord record;
  record.method = method_;
  record.meta_iter = event.meta_iter;
  record.oracle_calls_optimizer = event.optimizer_calls;
  record.oracle_calls_metrics = metric_calls_;
  record.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  record.f_value = m.f_value;
  record.suboptimality = m.suboptimality;
  record.grad_norm_est = m.grad_norm_est;
  record.test_error = m.test_error;
  records_.push_back(record);
  if (sink_) sink_(record);
}

IterateRecorder TraceRecorder::as_recorder() {
  return [this](const IterateEvent& event) { (*this)(event); };
}

}  // namespace hozog::harness
