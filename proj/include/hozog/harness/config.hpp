#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "hozog/errors.hpp"
#include "hozog/inner_solvers.hpp"
#include "hozog/oracle.hpp"
#include "hozog/random_search.hpp"
#include "hozog/zo.hpp"

namespace hozog::harness {

/// A config problem; `field` is the dotted path of the offending key.
class ConfigError : public InvalidConfig {
 public:
  ConfigError(std::string field, const std::string& message)
      : InvalidConfig(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class ProblemKind { Synthetic, LogReg, HyperClean };
enum class Method { Hozog, RandomSearch };

struct GeneratorConfig {
  enum class Kind { LinearTeacher, GaussianBlobs };
  Kind kind = Kind::LinearTeacher;
  std::size_t n = 2000;
  std::size_t d = 20;
  std::size_t classes = 2;
  double separation = 1.0;
  double label_noise = 0.1;
  std::uint64_t seed = 0;
};

struct DataConfig {
  std::optional<std::filesystem::path> path;  // one file, split 2:1:1
  std::optional<std::filesystem::path> train_path;
  std::optional<std::filesystem::path> val_path;
  std::optional<std::filesystem::path> test_path;
  std::optional<GeneratorConfig> generate;
  std::optional<std::size_t> n_features;
  // Logistic regression: map labels to -1/+1. Unset means "only when the
  // labels are not already -1/+1".
  std::optional<bool> binarize;
  std::uint64_t binarize_seed = 0;
  std::uint64_t split_seed = 0;
};

struct SyntheticConfig {
  double c = 3.0;
  double w_star = 1.0;
  bool exact = true;  // closed-form inner solution instead of the inner solver
};

struct HyperCleanConfig {
  std::size_t n_tr = 200;
  std::size_t n_val = 200;
  std::size_t n_t = 400;
  std::size_t n_h = 40;
  std::uint64_t corruption_seed = 0;
};

struct MetricsConfig {
  std::size_t cadence = 1;
  bool gradient = true;
  std::size_t grad_q = 1;
  double grad_mu = 0.01;
  std::uint64_t seed = 0;
};

struct LipschitzConfig {
  std::optional<Box> box;
  std::size_t pairs = 10000;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::Synthetic;
  SyntheticConfig synthetic;
  HyperCleanConfig hyperclean;
  DataConfig data;
  IterativeAlgorithm inner;
  std::uint64_t inner_seed = 0;

  Method method = Method::Hozog;
  ZoConfig hozog;
  Vector lambda0;
  RsConfig random_search;
  MetricsConfig metrics;
  LipschitzConfig lipschitz;

  std::filesystem::path trace_path = "trace.csv";
  std::filesystem::path manifest_path = "trace.manifest.json";
  std::size_t max_workers = 1;

  nlohmann::json source;  // the file as read, echoed into the manifest
};

/// Parses and validates a JSON config. Relative paths resolve against
/// `base_dir`. Every unknown key, bad value, or missing data file raises
/// ConfigError naming the field. Problem-specific defaults are filled in.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

std::string to_string(ProblemKind kind);
std::string to_string(Method method);

/// Hyperparameter dimension implied by the problem section.
std::size_t hyperparameter_dim(const ExperimentConfig& cfg);

}  // namespace hozog::harness
