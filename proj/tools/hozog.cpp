#include <algorithm>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hozog/data_io.hpp"
#include "hozog/errors.hpp"
#include "hozog/harness/config.hpp"
#include "hozog/harness/experiment.hpp"
#include "hozog/parallel.hpp"

namespace {

using namespace hozog;
using namespace hozog::harness;

// Config load with the environment override applied; exits 2 on error.
ExperimentConfig config_or_exit(const std::string& path) {
  try {
    ExperimentConfig cfg = load_config(path);
    cfg.max_workers = max_workers_from_env(cfg.max_workers);
    return cfg;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    std::exit(kExitConfig);
  }
}

int report(const RunResult& r, const std::filesystem::path& trace) {
  if (r.exit_code == kExitOk) {
    std::cout << trace.string() << ": " << r.records.size() << " records, final f " << data::format_real(r.final_f)
              << ", " << r.optimizer_calls << " optimizer + " << r.metric_calls << " metric calls\n";
  } else {
    std::cerr << (r.exit_code == kExitConfig ? "config error: " : "error: ") << r.message << '\n';
  }
  return r.exit_code;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string tok = text.substr(pos, comma - pos);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tok.empty() || used != tok.size()) throw ConfigError("values", "not a number: '" + tok + "'");
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

int parse_data(const std::string& input, bool summary) {
  data::SparseDataset ds;
  try {
    ds = data::load_libsvm(input);
  } catch (const ParseError& e) {
    std::cerr << input << ":" << e.line() << ":" << e.column() << ": " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  if (!summary) {
    data::write_libsvm(std::cout, ds);
    return kExitOk;
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& row : ds.rows) ++counts[data::format_real(row.label)];
  nlohmann::json out{{"rows", ds.rows.size()}, {"n_features", ds.n_features}, {"nonzeros", data::nonzeros(ds)},
                     {"labels", counts}};
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeroth-order hyperparameter optimization experiments"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "Run one experiment and write its trace");
  run->add_option("--config", config, "JSON experiment config")->required();

  std::string axis, values;
  auto* sw = app.add_subcommand("sweep", "One run per value of q, mu or gamma");
  sw->add_option("--config", config, "JSON experiment config")->required();
  sw->add_option("--axis", axis, "q, mu or gamma")->required();
  sw->add_option("--values", values, "comma-separated values")->required();

  std::string input;
  bool summary = false;
  auto* pd = app.add_subcommand("parse-data", "Validate a LIBSVM file");
  pd->add_option("--input", input, "LIBSVM file, optionally .gz")->required();
  pd->add_flag("--summary", summary, "print counts instead of the canonical text");

  auto* lr = app.add_subcommand("lipschitz-report", "Analytic bound and sampled ratio for a config");
  lr->add_option("--config", config, "JSON experiment config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      const ExperimentConfig cfg = config_or_exit(config);
      return report(run_experiment(cfg), cfg.trace_path);
    }
    if (*sw) {
      const ExperimentConfig cfg = config_or_exit(config);
      SweepAxis which;
      std::vector<double> vals;
      try {
        which = parse_sweep_axis(axis);
        vals = parse_values(values);
      } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
      }
      int worst = kExitOk;
      for (const SweepRun& r : sweep(cfg, which, vals)) {
        std::cout << to_string(which) << "=" << data::format_real(r.value) << ": ";
        std::cout.flush();
        const int code = report(r.result, r.trace_path);
        if (code != kExitOk) std::cout << "failed (exit " << code << ")\n";
        worst = std::max(worst, code);
      }
      return worst;
    }
    if (*pd) return parse_data(input, summary);
    if (*lr) {
      const ExperimentConfig cfg = config_or_exit(config);
      std::cout << to_json(lipschitz_report(cfg)).dump(2) << '\n';
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NonFiniteObjective& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNonFinite;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
