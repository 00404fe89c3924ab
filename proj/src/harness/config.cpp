#include "hozog/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace hozog::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Read-tracking view of one JSON object; finish() rejects keys nobody asked for.
class Section {
 public:
  Section(const json& node, std::string path) : node_(&node), path_(std::move(path)) {
    if (!node.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return node_->contains(key); }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& raw(const std::string& key) const {
    used_.insert(key);
    return node_->at(key);
  }

  Section child(const std::string& key) const {
    if (!has(key)) return Section(empty_object(), field(key));
    return Section(raw(key), field(key));
  }

  double real(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) throw ConfigError(field(key), "expected a finite number");
    return v.get<double>();
  }

  double positive_real(const std::string& key, double fallback) const {
    const double v = real(key, fallback);
    if (!(v > 0.0)) throw ConfigError(field(key), "must be positive");
    return v;
  }

  std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      throw ConfigError(field(key), "expected a non-negative integer");
    }
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }

  std::size_t count(const std::string& key, std::size_t fallback, std::size_t min_value = 0) const {
    const auto v = static_cast<std::size_t>(unsigned_int(key, fallback));
    if (v < min_value) throw ConfigError(field(key), "must be at least " + std::to_string(min_value));
    return v;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& item : node_->items()) {
      if (!used_.contains(item.key())) throw ConfigError(field(item.key()), "unknown key");
    }
  }

 private:
  static const json& empty_object() {
    static const json empty = json::object();
    return empty;
  }

  const json* node_;
  std::string path_;
  mutable std::set<std::string> used_;
};

Vector real_vector(const json& v, const std::string& field, std::size_t p) {
  if (v.is_number()) return Vector::Constant(static_cast<Eigen::Index>(p), v.get<double>());
  if (!v.is_array()) throw ConfigError(field, "expected a number or an array of numbers");
  if (v.size() != p) {
    throw ConfigError(field, "expected " + std::to_string(p) + " entries, got " + std::to_string(v.size()));
  }
  Vector out(static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < p; ++i) {
    if (!v[i].is_number()) throw ConfigError(field, "entry " + std::to_string(i) + " is not a number");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  if (!out.allFinite()) throw ConfigError(field, "entries must be finite");
  return out;
}

// [lo, hi] applied to every coordinate, or {"lo": [...], "hi": [...]}.
Box parse_box(const json& v, const std::string& field, std::size_t p) {
  Box box;
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    box = Box::uniform(static_cast<Eigen::Index>(p), v[0].get<double>(), v[1].get<double>());
  } else if (v.is_object()) {
    Section s(v, field);
    if (!s.has("lo") || !s.has("hi")) throw ConfigError(field, "needs both lo and hi");
    box.lo = real_vector(s.raw("lo"), s.field("lo"), p);
    box.hi = real_vector(s.raw("hi"), s.field("hi"), p);
    s.finish();
  } else {
    throw ConfigError(field, "expected [lo, hi] or {\"lo\": [...], \"hi\": [...]}");
  }
  try {
    box.validate();
  } catch (const InvalidConfig& e) {
    throw ConfigError(field, e.what());
  }
  return box;
}

fs::path existing_path(const Section& s, const std::string& key, const fs::path& base_dir) {
  fs::path p = s.string(key, "");
  if (p.empty()) throw ConfigError(s.field(key), "empty path");
  if (p.is_relative()) p = base_dir / p;
  if (!fs::exists(p)) throw ConfigError(s.field(key), "file not found: " + p.string());
  return p;
}

fs::path output_path(const Section& s, const std::string& key, const fs::path& fallback,
                     const fs::path& base_dir) {
  fs::path p = s.has(key) ? fs::path(s.string(key, "")) : fallback;
  if (p.empty()) throw ConfigError(s.field(key), "empty path");
  return p.is_relative() ? base_dir / p : p;
}

DataConfig parse_data(const Section& s, const fs::path& base_dir, ProblemKind kind) {
  DataConfig data;
  if (s.has("path")) data.path = existing_path(s, "path", base_dir);
  const bool any_split = s.has("train_path") || s.has("val_path") || s.has("test_path");
  if (any_split) {
    if (!(s.has("train_path") && s.has("val_path") && s.has("test_path"))) {
      throw ConfigError(s.field("train_path"), "train_path, val_path and test_path go together");
    }
    data.train_path = existing_path(s, "train_path", base_dir);
    data.val_path = existing_path(s, "val_path", base_dir);
    data.test_path = existing_path(s, "test_path", base_dir);
  }
  if (s.has("generate")) {
    const Section g = s.child("generate");
    GeneratorConfig gen;
    const std::string k = g.string("kind", kind == ProblemKind::HyperClean ? "gaussian_blobs" : "linear_teacher");
    if (k == "linear_teacher") {
      gen.kind = GeneratorConfig::Kind::LinearTeacher;
    } else if (k == "gaussian_blobs") {
      gen.kind = GeneratorConfig::Kind::GaussianBlobs;
    } else {
      throw ConfigError(g.field("kind"), "expected linear_teacher or gaussian_blobs");
    }
    gen.n = g.count("n", gen.n, 1);
    gen.d = g.count("d", kind == ProblemKind::HyperClean ? 10 : gen.d, 1);
    gen.classes = g.count("classes", kind == ProblemKind::HyperClean ? 4 : 2, 2);
    gen.separation = g.real("separation", gen.separation);
    gen.label_noise = g.real("label_noise", gen.label_noise);
    if (gen.label_noise < 0.0 || gen.label_noise > 1.0) {
      throw ConfigError(g.field("label_noise"), "must lie in [0, 1]");
    }
    gen.seed = g.unsigned_int("seed", gen.seed);
    g.finish();
    data.generate = gen;
  }
  const int sources = (data.path ? 1 : 0) + (any_split ? 1 : 0) + (data.generate ? 1 : 0);
  if (sources != 1) {
    throw ConfigError(s.field("path"), "give exactly one of path, train_path/val_path/test_path, or generate");
  }
  if (s.has("n_features")) data.n_features = s.count("n_features", 0, 1);
  if (s.has("binarize")) data.binarize = s.boolean("binarize", false);
  data.binarize_seed = s.unsigned_int("binarize_seed", 0);
  data.split_seed = s.unsigned_int("split_seed", 0);
  s.finish();
  return data;
}

void apply_problem_defaults(ExperimentConfig& cfg) {
  switch (cfg.problem) {
    case ProblemKind::Synthetic:
      cfg.inner.variant = InnerVariant::GD;
      cfg.inner.iterations = 100;
      cfg.inner.lr = 0.1;
      cfg.hozog.q = 1;
      cfg.hozog.mu = 0.01;
      cfg.hozog.gamma = 1.0;
      cfg.hozog.T = 100;
      break;
    case ProblemKind::LogReg:
      // Adam with 200 steps: plain GD at lr 0.1 diverges once e^lambda is large.
      cfg.inner.variant = InnerVariant::Adam;
      cfg.inner.iterations = 200;
      cfg.inner.lr = 0.1;
      cfg.hozog.q = 1;
      cfg.hozog.mu = 0.01;
      cfg.hozog.gamma = 0.05;
      cfg.hozog.T = 50;
      break;
    case ProblemKind::HyperClean:
      cfg.inner.variant = InnerVariant::GD;
      cfg.inner.iterations = 4000;
      cfg.inner.lr = 0.05;
      cfg.hozog.q = 5;
      cfg.hozog.mu = 1.0;
      cfg.hozog.gamma = 1.0;
      cfg.hozog.T = 30;
      break;
  }
}

}  // namespace

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Synthetic: return "synthetic";
    case ProblemKind::LogReg: return "logreg";
    case ProblemKind::HyperClean: return "hyperclean";
  }
  return "?";
}

std::string to_string(Method method) { return method == Method::Hozog ? "hozog" : "random_search"; }

std::size_t hyperparameter_dim(const ExperimentConfig& cfg) {
  return cfg.problem == ProblemKind::HyperClean ? cfg.hyperclean.n_h : 1;
}

ExperimentConfig parse_config(const json& doc, const fs::path& base_dir) {
  ExperimentConfig cfg;
  cfg.source = doc;
  const Section root(doc, "");

  // problem
  if (!root.has("problem")) throw ConfigError("problem", "missing section");
  const Section prob = root.child("problem");
  const std::string type = prob.string("type", "");
  if (type == "synthetic") {
    cfg.problem = ProblemKind::Synthetic;
  } else if (type == "logreg") {
    cfg.problem = ProblemKind::LogReg;
  } else if (type == "hyperclean") {
    cfg.problem = ProblemKind::HyperClean;
  } else {
    throw ConfigError(prob.field("type"), "expected synthetic, logreg or hyperclean");
  }
  apply_problem_defaults(cfg);

  if (cfg.problem == ProblemKind::Synthetic) {
    cfg.synthetic.c = prob.real("c", cfg.synthetic.c);
    cfg.synthetic.w_star = prob.real("w_star", cfg.synthetic.w_star);
    cfg.synthetic.exact = prob.boolean("exact", true);
    if (!(cfg.synthetic.w_star > 0.0 && cfg.synthetic.w_star < cfg.synthetic.c)) {
      throw ConfigError(prob.field("w_star"), "must satisfy 0 < w_star < c");
    }
  } else {
    if (!prob.has("data")) throw ConfigError(prob.field("data"), "missing section");
    cfg.data = parse_data(prob.child("data"), base_dir, cfg.problem);
  }
  if (cfg.problem == ProblemKind::HyperClean) {
    HyperCleanConfig& h = cfg.hyperclean;
    h.n_tr = prob.count("n_tr", h.n_tr, 1);
    h.n_val = prob.count("n_val", h.n_val, 1);
    h.n_t = prob.count("n_t", h.n_t, 1);
    h.n_h = prob.count("n_h", h.n_h, 1);
    if (h.n_h > h.n_tr) throw ConfigError(prob.field("n_h"), "must not exceed n_tr");
    h.corruption_seed = prob.unsigned_int("corruption_seed", 0);
  }
  prob.finish();
  const std::size_t p = hyperparameter_dim(cfg);

  // inner solver
  {
    const Section s = root.child("inner");
    const std::string variant = s.string("variant", cfg.inner.variant == InnerVariant::GD ? "gd" : "adam");
    if (variant == "gd") {
      cfg.inner.variant = InnerVariant::GD;
    } else if (variant == "adam") {
      cfg.inner.variant = InnerVariant::Adam;
    } else {
      throw ConfigError(s.field("variant"), "expected gd or adam");
    }
    cfg.inner.iterations = s.count("iterations", cfg.inner.iterations);
    cfg.inner.lr = s.positive_real("lr", cfg.inner.lr);
    cfg.inner.adam.beta1 = s.real("beta1", cfg.inner.adam.beta1);
    cfg.inner.adam.beta2 = s.real("beta2", cfg.inner.adam.beta2);
    cfg.inner.adam.eps = s.positive_real("eps", cfg.inner.adam.eps);
    const std::string init = s.string("init", "zero");
    if (init == "zero") {
      cfg.inner.init = InitRule::Zero;
    } else if (init == "gaussian") {
      cfg.inner.init = InitRule::Gaussian;
    } else {
      throw ConfigError(s.field("init"), "expected zero or gaussian");
    }
    cfg.inner.init_scale = s.positive_real("init_scale", cfg.inner.init_scale);
    cfg.inner_seed = s.unsigned_int("seed", 0);
    try {
      cfg.inner.validate();
    } catch (const InvalidConfig& e) {
      throw ConfigError("inner", e.what());
    }
    s.finish();
  }

  // method
  const std::string method = root.string("method", "hozog");
  if (method == "hozog") {
    cfg.method = Method::Hozog;
  } else if (method == "random_search") {
    cfg.method = Method::RandomSearch;
  } else {
    throw ConfigError("method", "expected hozog or random_search");
  }

  {
    const Section s = root.child("hozog");
    cfg.hozog.q = s.count("q", cfg.hozog.q, 1);
    cfg.hozog.mu = s.positive_real("mu", cfg.hozog.mu);
    cfg.hozog.gamma = s.positive_real("gamma", cfg.hozog.gamma);
    cfg.hozog.T = s.count("T", cfg.hozog.T);
    cfg.hozog.seed = s.unsigned_int("seed", 0);
    const std::string dirs = s.string("directions", "unit_sphere");
    if (dirs == "unit_sphere") {
      cfg.hozog.direction_scheme = DirectionScheme::UnitSphere;
    } else if (dirs == "gaussian") {
      cfg.hozog.direction_scheme = DirectionScheme::Gaussian;
    } else {
      throw ConfigError(s.field("directions"), "expected unit_sphere or gaussian");
    }
    cfg.hozog.reseed_inner = s.boolean("reseed_inner", false);
    const double lambda0_default = cfg.problem == ProblemKind::Synthetic ? 2.0 : 0.0;
    cfg.lambda0 = s.has("lambda0") ? real_vector(s.raw("lambda0"), s.field("lambda0"), p)
                                   : Vector::Constant(static_cast<Eigen::Index>(p), lambda0_default);
    s.finish();
  }

  {
    const Section s = root.child("random_search");
    cfg.random_search.budget = s.count("budget", std::max<std::size_t>(1, cfg.hozog.T * (cfg.hozog.q + 1)), 1);
    if (s.has("box")) {
      cfg.random_search.box = parse_box(s.raw("box"), s.field("box"), p);
    } else if (cfg.problem == ProblemKind::LogReg) {
      cfg.random_search.box = Box::uniform(1, -10.0, 10.0);
    } else {
      cfg.random_search.box = Box::uniform(static_cast<Eigen::Index>(p), -5.0, 5.0);
    }
    cfg.random_search.seed = s.unsigned_int("seed", 0);
    s.finish();
  }

  {
    const Section s = root.child("metrics");
    cfg.metrics.cadence = s.count("cadence", 1, 1);
    cfg.metrics.gradient = s.boolean("gradient", true);
    cfg.metrics.grad_q = s.count("grad_q", cfg.hozog.q, 1);
    cfg.metrics.grad_mu = s.positive_real("grad_mu", cfg.hozog.mu);
    cfg.metrics.seed = s.unsigned_int("seed", cfg.hozog.seed + 1);
    s.finish();
  }

  {
    const Section s = root.child("lipschitz");
    if (s.has("box")) cfg.lipschitz.box = parse_box(s.raw("box"), s.field("box"), p);
    cfg.lipschitz.pairs = s.count("pairs", cfg.lipschitz.pairs, 1);
    cfg.lipschitz.seed = s.unsigned_int("seed", 0);
    s.finish();
  }

  {
    const Section s = root.child("output");
    cfg.trace_path = output_path(s, "trace", "trace.csv", base_dir);
    fs::path manifest_default = cfg.trace_path;
    manifest_default.replace_extension(".manifest.json");
    cfg.manifest_path = output_path(s, "manifest", manifest_default, base_dir);
    s.finish();
  }

  cfg.max_workers = root.count("max_workers", 1, 1);
  root.finish();
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

}  // namespace hozog::harness
