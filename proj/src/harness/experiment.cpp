#include "hozog/harness/experiment.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

#include "hozog/data_io.hpp"
#include "hozog/errors.hpp"
#include "hozog/harness/metrics.hpp"
#include "hozog/parallel.hpp"
#include "hozog/problems.hpp"
#include "hozog/random_search.hpp"
#include "hozog/zo.hpp"

namespace hozog::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

data::SparseDataset generate(const GeneratorConfig& g) {
  switch (g.kind) {
    case GeneratorConfig::Kind::LinearTeacher:
      return data::make_linear_teacher_binary(g.n, g.d, g.label_noise, g.seed);
    case GeneratorConfig::Kind::GaussianBlobs:
      return data::make_gaussian_blobs(g.n, g.d, g.classes, g.separation, g.seed);
  }
  throw InvalidConfig("unknown generator");
}

bool is_plus_minus_one(const data::SparseDataset& ds) {
  for (const auto& row : ds.rows) {
    if (row.label != 1.0 && row.label != -1.0) return false;
  }
  return true;
}

void append(data::SparseDataset& into, const data::SparseDataset& from) {
  into.rows.insert(into.rows.end(), from.rows.begin(), from.rows.end());
  into.n_features = std::max(into.n_features, from.n_features);
}

// Binarizing the splits together keeps one label mapping for all three.
data::DataSplits binarize_splits(const data::DataSplits& s, std::uint64_t seed) {
  data::SparseDataset all;
  append(all, s.train);
  append(all, s.val);
  append(all, s.test);
  const data::SparseDataset mapped = data::binarize(all, seed);
  data::DataSplits out;
  auto take = [&](std::size_t from, std::size_t n) {
    data::SparseDataset d;
    d.rows.assign(mapped.rows.begin() + static_cast<long>(from), mapped.rows.begin() + static_cast<long>(from + n));
    d.n_features = mapped.n_features;
    return d;
  };
  out.train = take(0, s.train.rows.size());
  out.val = take(s.train.rows.size(), s.val.rows.size());
  out.test = take(s.train.rows.size() + s.val.rows.size(), s.test.rows.size());
  return out;
}

data::SparseDataset load_single(const DataConfig& d) {
  if (d.generate) return generate(*d.generate);
  return data::load_libsvm(*d.path, d.n_features);
}

ObjectiveSpec build_logreg(const ExperimentConfig& cfg) {
  const DataConfig& d = cfg.data;
  data::DataSplits splits;
  if (d.train_path) {
    splits.train = data::load_libsvm(*d.train_path, d.n_features);
    splits.val = data::load_libsvm(*d.val_path, d.n_features);
    splits.test = data::load_libsvm(*d.test_path, d.n_features);
  } else {
    splits = data::split_2_1_1(load_single(d), d.split_seed);
  }
  bool needs_map = !is_plus_minus_one(splits.train) || !is_plus_minus_one(splits.val) ||
                   !is_plus_minus_one(splits.test);
  if (d.binarize) {
    if (!*d.binarize && needs_map) {
      throw ConfigError("problem.data.binarize", "labels are not -1/+1 and binarize is false");
    }
    needs_map = *d.binarize;
  }
  if (needs_map) splits = binarize_splits(splits, d.binarize_seed);
  auto prob = std::make_shared<const problems::LogRegProblem>(problems::make_logreg_problem(splits, d.n_features));
  return problems::logreg_objective(prob, cfg.inner);
}

ObjectiveSpec build_hyperclean(const ExperimentConfig& cfg) {
  const DataConfig& d = cfg.data;
  data::SparseDataset ds;
  if (d.train_path) {
    // Hyper-cleaning draws its own splits; pre-split files are pooled.
    append(ds, data::load_libsvm(*d.train_path, d.n_features));
    append(ds, data::load_libsvm(*d.val_path, d.n_features));
    append(ds, data::load_libsvm(*d.test_path, d.n_features));
  } else {
    ds = load_single(d);
  }
  const HyperCleanConfig& h = cfg.hyperclean;
  auto prob = std::make_shared<const problems::HyperCleanProblem>(
      problems::make_hyperclean(ds, h.n_tr, h.n_val, h.n_t, h.n_h, h.corruption_seed));
  return problems::hyperclean_objective(prob, cfg.inner);
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json real_json(double x) {
  if (std::isfinite(x)) return x;
  return data::format_real(x);
}

void write_manifest(const ExperimentConfig& cfg, const RunResult& r) {
  json m;
  m["tool"] = "hozog";
  m["version"] = HOZOG_VERSION;
  m["compiler"] = __VERSION__;
  m["config"] = cfg.source;
  m["problem"] = to_string(cfg.problem);
  m["method"] = to_string(cfg.method);
  m["seeds"] = {{"hozog", cfg.hozog.seed},
                {"random_search", cfg.random_search.seed},
                {"metrics", cfg.metrics.seed},
                {"inner", cfg.inner_seed}};
  if (cfg.data.generate) m["seeds"]["generator"] = cfg.data.generate->seed;
  if (cfg.problem == ProblemKind::LogReg) {
    m["seeds"]["split"] = cfg.data.split_seed;
    m["seeds"]["binarize"] = cfg.data.binarize_seed;
  }
  if (cfg.problem == ProblemKind::HyperClean) m["seeds"]["corruption"] = cfg.hyperclean.corruption_seed;
  m["max_workers"] = cfg.max_workers;
  m["trace"] = cfg.trace_path.string();
  m["exit_code"] = r.exit_code;
  if (!r.message.empty()) m["message"] = r.message;
  m["oracle_calls_optimizer"] = r.optimizer_calls;
  m["oracle_calls_metrics"] = r.metric_calls;
  if (cfg.method == Method::RandomSearch) m["failed_samples"] = r.failed_samples;
  if (r.final_lambda.size() > 0) {
    m["final_lambda"] = vector_json(r.final_lambda);
    m["final_f"] = real_json(r.final_f);
  }
  if (cfg.manifest_path.has_parent_path()) fs::create_directories(cfg.manifest_path.parent_path());
  std::ofstream out(cfg.manifest_path);
  if (!out) throw Error("cannot write manifest " + cfg.manifest_path.string());
  out << m.dump(2) << '\n';
}

std::string value_label(SweepAxis axis, double value) {
  if (axis == SweepAxis::Q) return std::to_string(static_cast<long long>(value));
  return data::format_real(value);
}

}  // namespace

ObjectiveSpec build_objective(const ExperimentConfig& cfg) {
  ObjectiveSpec spec;
  switch (cfg.problem) {
    case ProblemKind::Synthetic:
      spec = cfg.synthetic.exact ? problems::make_synthetic(cfg.synthetic.c, cfg.synthetic.w_star)
                                 : problems::make_synthetic(cfg.synthetic.c, cfg.synthetic.w_star, cfg.inner);
      break;
    case ProblemKind::LogReg:
      spec = build_logreg(cfg);
      break;
    case ProblemKind::HyperClean:
      spec = build_hyperclean(cfg);
      break;
  }
  spec.inner_seed = cfg.inner_seed;
  return spec;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult result;
  std::optional<CsvTraceWriter> writer;
  try {
    const ObjectiveSpec spec = build_objective(cfg);
    writer.emplace(cfg.trace_path);

    MetricSettings settings;
    settings.q = cfg.metrics.grad_q;
    settings.mu = cfg.metrics.grad_mu;
    settings.scheme = cfg.hozog.direction_scheme;
    settings.gradient = cfg.metrics.gradient;

    EmitRule rule;
    rule.cadence = cfg.metrics.cadence;
    if (cfg.method == Method::RandomSearch) {
      // One HOZOG meta-iteration's worth of calls per step on the call axis.
      rule.calls_stride = cfg.metrics.cadence * (cfg.hozog.q + 1);
      rule.last_calls = cfg.random_search.budget;
    }
    TraceRecorder recorder(to_string(cfg.method), spec, settings, rule, cfg.metrics.seed, cfg.max_workers,
                           [&](const TraceRecord& r) { writer->write(r); });

    if (cfg.method == Method::Hozog) {
      const HyperParams final_lambda =
          run_hozog(spec, HyperParams(cfg.lambda0), cfg.hozog, recorder.as_recorder(), cfg.max_workers);
      result.final_lambda = final_lambda.values;
      result.optimizer_calls = cfg.hozog.T * (cfg.hozog.q + 1);
    } else {
      const RandomSearchResult rs = random_search(
          spec, cfg.random_search, recorder.as_recorder(), cfg.max_workers,
          [](std::size_t sample, const NonFiniteObjective& e) {
            std::cerr << "random search: sample " << sample << " skipped: " << e.what() << '\n';
          });
      result.final_lambda = rs.incumbent.values;
      result.optimizer_calls = rs.evaluations;
      result.failed_samples = rs.failures;
    }
    result.records = recorder.records();
    result.metric_calls = recorder.metric_calls();
    result.final_f = result.records.empty() ? std::numeric_limits<double>::quiet_NaN()
                                            : result.records.back().f_value;
    if (cfg.method == Method::RandomSearch) result.final_f = recorder.running_min();
  } catch (const NonFiniteObjective& e) {
    result.exit_code = kExitNonFinite;
    result.message = e.what();
    if (e.meta_iter()) result.message += " (meta-iteration " + std::to_string(*e.meta_iter()) + ")";
  } catch (const ConfigError& e) {
    result.exit_code = kExitConfig;
    result.message = e.what();
  } catch (const std::exception& e) {
    result.exit_code = kExitFailure;
    result.message = e.what();
  }
  try {
    write_manifest(cfg, result);
  } catch (const std::exception& e) {
    if (result.exit_code == kExitOk) {
      result.exit_code = kExitFailure;
      result.message = e.what();
    }
  }
  return result;
}

RunResult run_experiment_file(const fs::path& config_path) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    RunResult r;
    r.exit_code = kExitConfig;
    r.message = e.what();
    return r;
  }
  if (auto workers = max_workers_from_env(0); workers > 0) cfg.max_workers = workers;
  return run_experiment(cfg);
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "q") return SweepAxis::Q;
  if (name == "mu") return SweepAxis::Mu;
  if (name == "gamma") return SweepAxis::Gamma;
  throw ConfigError("axis", "expected q, mu or gamma, got '" + name + "'");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Q: return "q";
    case SweepAxis::Mu: return "mu";
    case SweepAxis::Gamma: return "gamma";
  }
  return "?";
}

ExperimentConfig sweep_config(const ExperimentConfig& base, SweepAxis axis, double value) {
  ExperimentConfig cfg = base;
  const std::string field = "hozog." + to_string(axis);
  if (!std::isfinite(value) || value <= 0.0) throw ConfigError(field, "sweep values must be positive");
  switch (axis) {
    case SweepAxis::Q:
      if (value != std::floor(value)) throw ConfigError(field, "q must be an integer");
      cfg.hozog.q = static_cast<std::size_t>(value);
      break;
    case SweepAxis::Mu:
      cfg.hozog.mu = value;
      break;
    case SweepAxis::Gamma:
      cfg.hozog.gamma = value;
      break;
  }
  const std::string suffix = "." + to_string(axis) + "-" + value_label(axis, value);
  auto rename = [&](const fs::path& p, const std::string& ext) {
    fs::path out = p.parent_path() / (p.stem().string() + suffix);
    out += ext;
    return out;
  };
  cfg.trace_path = rename(base.trace_path, base.trace_path.extension().string());
  // The manifest default is "<trace stem>.manifest.json"; keep the pairing.
  fs::path manifest_stem = base.trace_path;
  manifest_stem.replace_extension(".manifest.json");
  if (base.manifest_path == manifest_stem) {
    cfg.manifest_path = cfg.trace_path;
    cfg.manifest_path.replace_extension(".manifest.json");
  } else {
    cfg.manifest_path = rename(base.manifest_path, base.manifest_path.extension().string());
  }
  return cfg;
}

std::vector<SweepRun> sweep(const ExperimentConfig& base, SweepAxis axis, const std::vector<double>& values) {
  std::vector<SweepRun> runs;
  for (double v : values) {
    SweepRun run;
    run.value = v;
    try {
      const ExperimentConfig cfg = sweep_config(base, axis, v);
      run.trace_path = cfg.trace_path;
      run.result = run_experiment(cfg);
    } catch (const ConfigError& e) {
      run.result.exit_code = kExitConfig;
      run.result.message = e.what();
    } catch (const std::exception& e) {
      run.result.exit_code = kExitFailure;
      run.result.message = e.what();
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

LipschitzReport lipschitz_report(const ExperimentConfig& cfg) {
  const ObjectiveSpec spec = build_objective(cfg);
  const auto p = static_cast<Eigen::Index>(spec.p);
  Box box;
  if (cfg.lipschitz.box) {
    box = *cfg.lipschitz.box;
  } else if (cfg.problem == ProblemKind::Synthetic) {
    box = Box::uniform(p, -2.0, 2.0);
  } else if (spec.bounds) {
    box = *spec.bounds;
  } else {
    box = Box::uniform(p, -5.0, 5.0);
  }
  LipschitzReport report = empirical_lipschitz(spec, box, cfg.lipschitz.pairs, cfg.lipschitz.seed, cfg.max_workers);
  const bool analytic = cfg.problem == ProblemKind::Synthetic && !cfg.synthetic.exact &&
                        cfg.inner.variant == InnerVariant::GD && cfg.inner.init == InitRule::Zero;
  if (analytic) {
    const double w0 = cfg.inner.w0 ? cfg.inner.w0->values[0] : 0.0;
    const StepJacobians jacs = synthetic_step_jacobians(cfg.synthetic.c, cfg.synthetic.w_star, cfg.inner.lr,
                                                        cfg.inner.iterations, box.lo[0], box.hi[0], w0);
    report.bound = lipschitz_bound(jacs);
  }
  return report;
}

json to_json(const LipschitzReport& report) {
  return json{{"bound", real_json(report.bound)},
              {"empirical_max_ratio", real_json(report.empirical_max_ratio)},
              {"samples", report.samples},
              {"box", {{"lo", vector_json(report.domain_box.lo)}, {"hi", vector_json(report.domain_box.hi)}}}};
}

}  // namespace hozog::harness
