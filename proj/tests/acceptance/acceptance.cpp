// Acceptance run: one line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../unit/corpus.hpp"
#include "hozog/data_io.hpp"
#include "hozog/errors.hpp"
#include "hozog/harness/config.hpp"
#include "hozog/harness/experiment.hpp"
#include "hozog/harness/trace.hpp"
#include "hozog/lipschitz.hpp"
#include "hozog/problems.hpp"
#include "hozog/random_search.hpp"
#include "hozog/zo.hpp"

using namespace hozog;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // 0 = none
  std::function<Outcome()> run;
};

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::path(HOZOG_TEST_TMP) / "acceptance" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// 1 -------------------------------------------------------------------------
Outcome estimator_mean() {
  const Vector a = (Vector(4) << 1.0, -2.0, 0.5, 3.0).finished();
  const ObjectiveSpec f = make_function_objective(4, [a](const Vector& x) { return a.dot(x); });
  ZoConfig cfg;
  cfg.q = 1;
  cfg.mu = 0.01;
  Rng rng(20240601);
  const HyperParams lambda(Vector::Zero(4));
  const int n = 100000;
  Vector mean = Vector::Zero(4);
  for (int i = 0; i < n; ++i) {
    const DirectionSet d = sample_directions(4, 1, DirectionScheme::UnitSphere, rng);
    mean += estimate_hyper_gradient(lambda, f, cfg, d).vector;
  }
  mean /= n;
  // Per-coordinate standard error of the mean for i.i.d. sphere directions:
  // Var = 2a_j^2 + (2/3)(|a|^2 - a_j^2) - a_j^2 when p = 4.
  double worst = 0.0;
  std::string z;
  for (int j = 0; j < 4; ++j) {
    worst = std::max(worst, std::abs(mean[j] - a[j]) / std::abs(a[j]));
    const double var = a[j] * a[j] + (2.0 / 3.0) * (a.squaredNorm() - a[j] * a[j]);
    z += " " + fmt((mean[j] - a[j]) / std::sqrt(var / n), 3);
  }
  return {worst <= 0.01, "max relative error " + fmt(worst) + " (limit 0.01); z-scores vs Monte-Carlo error:" + z};
}

// 2 -------------------------------------------------------------------------
Outcome estimator_vs_analytic() {
  const ObjectiveSpec f = problems::make_synthetic(3.0, 1.0);
  ZoConfig cfg;
  cfg.q = 64;
  cfg.mu = 1e-3;
  Rng rng(7);
  double worst_excess = -INFINITY;
  int points = 0, ok = 0;
  for (int k = 0; k <= 24; ++k) {
    const double x = -3.0 + 0.25 * k;
    Vector mean = Vector::Zero(1);
    const int reps = 1000;
    for (int r = 0; r < reps; ++r) {
      const DirectionSet d = sample_directions(1, cfg.q, cfg.direction_scheme, rng);
      mean += estimate_hyper_gradient(HyperParams(Vector::Constant(1, x)), f, cfg, d).vector;
    }
    mean /= reps;
    const double truth = problems::synthetic_analytic_hypergradient(3.0, 1.0, x);
    const double tol = std::max(5.0 * cfg.mu, 0.02 * std::abs(truth));
    const double err = std::abs(mean[0] - truth);
    worst_excess = std::max(worst_excess, err - tol);
    ++points;
    ok += err <= tol;
  }
  return {ok == points, std::to_string(ok) + "/" + std::to_string(points) + " grid points within max(5mu, 2%); worst margin " +
                            fmt(worst_excess)};
}

// 3 -------------------------------------------------------------------------
Outcome hozog_closed_form() {
  const ObjectiveSpec f = problems::make_synthetic(3.0, 1.0);
  ZoConfig cfg;
  cfg.q = 1;
  cfg.mu = 0.01;
  cfg.gamma = 1.0;
  cfg.T = 500;
  double worst_lambda = 0.0, worst_f = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    cfg.seed = seed;
    const HyperParams last = run_hozog(f, HyperParams(Vector::Constant(1, 2.0)), cfg);
    worst_lambda = std::max(worst_lambda, std::abs(last[0]));
    worst_f = std::max(worst_f, evaluate(f, last).f_value);
  }
  return {worst_lambda <= 1e-2 && worst_f <= 1e-4,
          "q=1 mu=0.01 gamma=1 T=500 over 10 seeds: max |lambda_T| " + fmt(worst_lambda) + ", max f(lambda_T) " +
              fmt(worst_f)};
}

// 4 -------------------------------------------------------------------------
json logreg_doc(std::uint64_t seed, const fs::path& dir, const std::string& method) {
  return json{{"problem",
               {{"type", "logreg"},
                {"data",
                 {{"generate", {{"kind", "linear_teacher"}, {"n", 2000}, {"d", 100}, {"label_noise", 0.1}, {"seed", seed}}},
                  {"split_seed", seed}}}}},
              {"inner", {{"variant", "adam"}, {"iterations", 200}, {"lr", 0.1}}},
              {"method", method},
              {"hozog", {{"q", 1}, {"mu", 0.01}, {"gamma", 0.05}, {"T", 50}, {"seed", seed}, {"lambda0", 5.0}}},
              {"random_search", {{"budget", 100}, {"box", {-10, 10}}, {"seed", seed + 1000}}},
              {"metrics", {{"gradient", false}}},
              {"output", {{"trace", (dir / (method + "-" + std::to_string(seed) + ".csv")).string()}}},
              {"max_workers", 4}};
}

Outcome logreg_desk() {
  const fs::path dir = scratch("logreg");
  int wins = 0, decreased = 0, incumbent_zero = 0;
  double min_decrease = INFINITY;
  std::ostringstream per_seed;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const harness::RunResult hz = harness::run_experiment(harness::parse_config(logreg_doc(seed, dir, "hozog")));
    const harness::RunResult rs = harness::run_experiment(harness::parse_config(logreg_doc(seed, dir, "random_search")));
    if (hz.exit_code != 0 || rs.exit_code != 0) return {false, "run failed: " + hz.message + rs.message};
    if (hz.optimizer_calls != rs.optimizer_calls) return {false, "budgets differ"};
    const auto& recs = hz.records;
    const double f0 = recs.front().f_value;
    const double fT = recs.back().f_value;
    const double decrease = (f0 - fT) / f0;
    min_decrease = std::min(min_decrease, decrease);
    decreased += decrease >= 0.10;
    wins += fT <= rs.final_f;
    // The incumbent is the record holding the run's lowest f; its
    // suboptimality must be exactly zero, and so must the running minimum's
    // distance to it at the end of the trace.
    const auto best = std::min_element(recs.begin(), recs.end(),
                                       [](const auto& a, const auto& b) { return a.f_value < b.f_value; });
    const double end_gap = recs.back().f_value - recs.back().suboptimality - best->f_value;
    incumbent_zero += best->suboptimality == 0.0 && end_gap == 0.0;
    per_seed << " " << (fT <= rs.final_f ? "W" : "L");
  }
  const bool pass = wins >= 8 && decreased == 10 && incumbent_zero == 10;
  return {pass, "HOZOG <= RS in " + std::to_string(wins) + "/10 seeds (" + per_seed.str().substr(1) +
                    "); min decrease from lambda0 " + fmt(100 * min_decrease, 3) + "%; incumbent suboptimality 0 in " +
                    std::to_string(incumbent_zero) + "/10"};
}

// 5 -------------------------------------------------------------------------
Outcome hyperclean_desk() {
  int good = 0;
  std::ostringstream margins;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const data::SparseDataset ds = data::make_gaussian_blobs(800, 10, 4, 1.0, seed);
    auto prob = std::make_shared<problems::HyperCleanProblem>(problems::make_hyperclean(ds, 200, 200, 400, 40, seed));
    IterativeAlgorithm inner;
    inner.variant = InnerVariant::GD;
    inner.lr = 0.05;
    inner.iterations = 800;
    const ObjectiveSpec spec = problems::hyperclean_objective(prob, inner);
    ZoConfig cfg;
    cfg.q = 5;
    cfg.mu = 1.0;
    cfg.gamma = 1.0;
    cfg.T = 30;
    cfg.seed = seed;
    const HyperParams last = run_hozog(spec, HyperParams(Vector::Zero(40)), cfg, {}, 4);

    double dirty_sum = 0, clean_sum = 0;
    int dirty_n = 0, clean_n = 0;
    for (std::size_t g = 0; g < prob->n_groups(); ++g) {
      const auto& members = prob->groups[g];
      std::size_t bad = 0;
      for (std::size_t i : members) bad += std::binary_search(prob->corrupted.begin(), prob->corrupted.end(), i);
      const double frac = static_cast<double>(bad) / static_cast<double>(members.size());
      const double weight = problems::sigmoid(last[static_cast<Eigen::Index>(g)]);
      if (frac >= 0.75) {
        dirty_sum += weight;
        ++dirty_n;
      } else if (frac <= 0.25) {
        clean_sum += weight;
        ++clean_n;
      }
    }
    const bool ok = dirty_n > 0 && clean_n > 0 && dirty_sum / dirty_n < clean_sum / clean_n;
    good += ok;
    margins << " " << (dirty_n && clean_n ? fmt(clean_sum / clean_n - dirty_sum / dirty_n, 3) : "n/a");
  }
  return {good >= 8, "clean-minus-dirty mean weight per seed:" + margins.str() + "; property held in " +
                         std::to_string(good) + "/10 (need 8)"};
}

// 6 -------------------------------------------------------------------------
Outcome lipschitz_dominance() {
  const double eta = 0.1;
  const Box box = Box::uniform(1, -2.0, 2.0);
  std::ostringstream detail;
  bool dominated = true;
  double bound10 = 0.0, bound100 = 0.0, max_b10 = 0.0, max_b100 = 0.0;
  for (std::size_t T : {10u, 100u}) {
    IterativeAlgorithm inner;
    inner.iterations = T;
    inner.lr = eta;
    const ObjectiveSpec spec = problems::make_synthetic(3.0, 1.0, inner);
    const StepJacobians jacs = synthetic_step_jacobians(3.0, 1.0, eta, T, -2.0, 2.0);
    const double bound = lipschitz_bound(jacs);
    const LipschitzReport rep = empirical_lipschitz(spec, box, 10000, 99, 4);
    dominated = dominated && rep.empirical_max_ratio <= bound;
    const double max_b = *std::max_element(jacs.b.begin(), jacs.b.end());
    (T == 10 ? bound10 : bound100) = bound;
    (T == 10 ? max_b10 : max_b100) = max_b;
    detail << "T=" << T << ": empirical " << fmt(rep.empirical_max_ratio) << " <= bound " << fmt(bound) << "; ";
  }
  const double max_b = std::max(max_b10, max_b100);
  const bool linear = bound100 <= bound10 + 90.0 * max_b;
  detail << "bound(100) " << fmt(bound100) << " <= bound(10) + 90*max L_B = " << fmt(bound10 + 90.0 * max_b);
  return {dominated && linear, detail.str()};
}

// 7 -------------------------------------------------------------------------
Outcome determinism() {
  const fs::path dir = scratch("determinism");
  std::vector<json> docs;
  docs.push_back(json{{"problem", {{"type", "synthetic"}, {"exact", false}}},
                      {"inner", {{"variant", "gd"}, {"iterations", 80}}},
                      {"hozog", {{"q", 4}, {"T", 40}, {"seed", 5}}}});
  json lr = logreg_doc(3, dir, "hozog");
  lr["problem"]["data"]["generate"]["n"] = 400;
  lr["hozog"]["T"] = 10;
  lr["metrics"] = {{"gradient", true}, {"cadence", 2}};
  docs.push_back(lr);
  json lrs = logreg_doc(3, dir, "random_search");
  lrs["problem"]["data"]["generate"]["n"] = 400;
  lrs["random_search"]["budget"] = 40;
  docs.push_back(lrs);
  docs.push_back(json{{"problem",
                       {{"type", "hyperclean"},
                        {"data", {{"generate", {{"n", 300}, {"d", 5}, {"classes", 3}, {"seed", 2}}}}},
                        {"n_tr", 60},
                        {"n_val", 60},
                        {"n_t", 60},
                        {"n_h", 12},
                        {"corruption_seed", 2}}},
                      {"inner", {{"iterations", 100}}},
                      {"hozog", {{"T", 6}, {"seed", 2}}}});
  int ok = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    json doc = docs[i];
    doc["output"] = {{"trace", (dir / ("run" + std::to_string(i) + ".csv")).string()}};
    harness::ExperimentConfig cfg = harness::parse_config(doc);
    std::vector<std::vector<harness::TraceRecord>> traces;
    for (std::size_t workers : {1u, 1u, 4u}) {
      cfg.max_workers = workers;
      const harness::RunResult r = harness::run_experiment(cfg);
      if (r.exit_code != 0) return {false, "run failed: " + r.message};
      traces.push_back(harness::read_trace(cfg.trace_path));
    }
    ok += harness::same_except_wall_time(traces[0], traces[1]) && harness::same_except_wall_time(traces[0], traces[2]);
  }
  return {ok == static_cast<int>(docs.size()),
          std::to_string(ok) + "/" + std::to_string(docs.size()) +
              " configs (synthetic, logreg, random search, hyper-cleaning) identical across reruns and workers {1,4}"};
}

// 8 -------------------------------------------------------------------------
Outcome parser() {
  const std::string text = testing::generated_corpus(1000, 8);
  const data::SparseDataset a = data::parse_libsvm(text);
  const data::SparseDataset b = data::parse_libsvm(data::to_libsvm_string(a));
  const bool round_trip = a.rows.size() == 1000 && a == b && data::to_libsvm_string(b) == data::to_libsvm_string(a);

  const auto classes = testing::malformed_classes();
  int caught = 0;
  std::istringstream in(text);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  for (std::size_t k = 0; k < classes.size(); ++k) {
    std::vector<std::string> mutated = lines;
    const std::size_t at = (k * 97 + 13) % mutated.size();
    mutated.insert(mutated.begin() + static_cast<long>(at), classes[k].line);
    std::string joined;
    for (const auto& l : mutated) joined += l + "\n";
    try {
      data::parse_libsvm(joined);
    } catch (const ParseError& e) {
      caught += e.line() == at + 1;
    }
  }
  return {round_trip && caught == static_cast<int>(classes.size()),
          std::string("round trip on 1000 rows ") + (round_trip ? "identical" : "DIFFERS") + "; " +
              std::to_string(caught) + "/" + std::to_string(classes.size()) +
              " malformed classes raised ParseError at the right line"};
}

// 9 -------------------------------------------------------------------------
Outcome sensitivity() {
  const fs::path dir = scratch("sweep");
  const double f_star = 0.0;  // f(lambda*) = 0 for c = 3, w_star = 1
  int ok = 0, cells = 0;
  double worst = 0.0;
  for (double mu : {1e-3, 1e-2, 1e-1}) {
    json doc{{"problem", {{"type", "synthetic"}, {"c", 3.0}, {"w_star", 1.0}}},
             {"hozog", {{"q", 1}, {"mu", mu}, {"gamma", 1.0}, {"T", 500}, {"seed", 11}, {"lambda0", 2.0}}},
             {"metrics", {{"gradient", false}, {"cadence", 25}}},
             {"output", {{"trace", (dir / ("mu-" + data::format_real(mu) + ".csv")).string()}}}};
    const harness::ExperimentConfig base = harness::parse_config(doc);
    for (const auto& run : harness::sweep(base, harness::SweepAxis::Q, {1, 3, 5})) {
      ++cells;
      if (run.result.exit_code != 0) continue;
      const double gap = run.result.records.back().f_value - f_star;
      worst = std::max(worst, gap);
      ok += gap <= 1e-2;
    }
  }
  return {ok == cells, std::to_string(ok) + "/" + std::to_string(cells) +
                           " (mu, q) cells with f(lambda_T) - f* <= 1e-2 at T=500; worst " + fmt(worst)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "estimator mean on a linear oracle", 5.0, estimator_mean},
      {2, "estimator vs analytic hypergradient", 30.0, estimator_vs_analytic},
      {3, "HOZOG on the closed-form problem", 10.0, hozog_closed_form},
      {4, "logistic-regression desk run vs random search", 120.0, logreg_desk},
      {5, "hyper-cleaning down-weights corrupted groups", 300.0, hyperclean_desk},
      {6, "Lipschitz bound dominates sampled ratios", 30.0, lipschitz_dominance},
      {7, "determinism and worker invariance", 0.0, determinism},
      {8, "LIBSVM parser round trip and malformed lines", 0.0, parser},
      {9, "parameter sensitivity sweep", 60.0, sensitivity},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.time_limit_s == 0.0 || secs < c.time_limit_s;
    const bool pass = out.pass && in_time;
    failures += !pass;
    std::printf("[%s] %d %s: %s; %.2fs%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), out.detail.c_str(), secs,
                c.time_limit_s > 0 ? (" (limit " + fmt(c.time_limit_s, 3) + "s)").c_str() : "");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
