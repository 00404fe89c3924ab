#include "hozog/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hozog/errors.hpp"
#include "hozog/problems.hpp"

namespace hozog {

void StepJacobians::validate() const {
  if (a.empty() || a.size() != b.size()) {
    throw InvalidConfig("step Jacobians need T+1 entries for both A and B");
  }
  auto ok = [](double x) { return std::isfinite(x) && x >= 0.0; };
  if (!std::all_of(a.begin(), a.end(), ok) || !std::all_of(b.begin(), b.end(), ok)) {
    throw InvalidConfig("step Jacobian norms must be finite and non-negative");
  }
}

double lipschitz_bound(const StepJacobians& jacs) {
  jacs.validate();
  // suffix = a_{t+1} ... a_{T+1}; empty for t = T+1.
  double suffix = 1.0;
  double total = 0.0;
  for (std::size_t i = jacs.a.size(); i-- > 0;) {
    total += jacs.b[i] * suffix;
    suffix *= jacs.a[i];
  }
  return total;
}

double synthetic_iterate_envelope(double c, double w0, double lambda_lo, double lambda_hi) {
  // With |A| <= 1 every iterate stays between w0 and its mirror image 2 w* - w0
  // about the fixed point w* = c / (1 + 2 e^lambda).
  double env = std::max(std::abs(w0), std::abs(c));
  for (double lambda : {lambda_lo, lambda_hi}) {
    const double fixed = problems::synthetic_inner_solution(c, lambda);
    env = std::max(env, std::abs(2.0 * fixed - w0));
  }
  return env;
}

StepJacobians synthetic_step_jacobians(double c, double w_star, double eta, std::size_t T_inner,
                                       double lambda_lo, double lambda_hi, double w0) {
  problems::SyntheticBilevel{c, w_star}.validate();
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw InvalidConfig("eta must be non-negative");
  if (!(lambda_lo <= lambda_hi)) throw InvalidConfig("lambda box needs lo <= hi");

  // A_t is monotone in lambda, so its extremes sit at the box ends.
  const double a_lo = 1.0 - eta * (1.0 + 2.0 * std::exp(lambda_lo));
  const double a_hi = 1.0 - eta * (1.0 + 2.0 * std::exp(lambda_hi));
  const double la = std::max(std::abs(a_lo), std::abs(a_hi));
  if (la > 1.0) {
    throw InvalidConfig("gradient step eta=" + std::to_string(eta) +
                        " is not a contraction over the lambda box (|A_t| = " + std::to_string(la) +
                        ")");
  }
  const double env = synthetic_iterate_envelope(c, w0, lambda_lo, lambda_hi);
  const double lb = 2.0 * eta * std::exp(lambda_hi) * env;

  StepJacobians jacs;
  jacs.a.assign(T_inner + 1, la);
  jacs.b.assign(T_inner + 1, lb);
  jacs.a[T_inner] = env + std::abs(w_star);
  jacs.b[T_inner] = 0.0;
  return jacs;
}

LipschitzReport empirical_lipschitz(const ObjectiveSpec& spec, const Box& box, std::size_t n_pairs,
                                    std::uint64_t seed, std::size_t max_workers) {
  box.validate();
  if (n_pairs == 0) throw InvalidConfig("n_pairs must be at least 1");
  if (box.dim() != static_cast<Eigen::Index>(spec.p)) throw DimensionMismatch("box does not match p");
  if (spec.bounds) {
    if ((box.lo.array() < spec.bounds->lo.array()).any() || (box.hi.array() > spec.bounds->hi.array()).any()) {
      throw InvalidConfig("sampling box extends outside the objective's bounds");
    }
  }

  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vector width = box.hi - box.lo;
  auto draw = [&] {
    Vector x(box.dim());
    for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = box.lo[j] + width[j] * unit(rng);
    return HyperParams(std::move(x));
  };

  LipschitzReport report;
  report.bound = std::numeric_limits<double>::quiet_NaN();
  report.domain_box = box;
  constexpr std::size_t kChunk = 512;
  std::vector<HyperParams> points;
  for (std::size_t done = 0; done < n_pairs;) {
    const std::size_t pairs = std::min(kChunk, n_pairs - done);
    points.clear();
    for (std::size_t i = 0; i < 2 * pairs; ++i) points.push_back(draw());
    const std::vector<Evaluation> evals = evaluate_batch(spec, points, max_workers);
    for (std::size_t i = 0; i < pairs; ++i) {
      const double dist = (points[2 * i].values - points[2 * i + 1].values).norm();
      if (dist == 0.0) continue;
      const double ratio = std::abs(evals[2 * i].f_value - evals[2 * i + 1].f_value) / dist;
      report.empirical_max_ratio = std::max(report.empirical_max_ratio, ratio);
    }
    done += pairs;
    report.samples = done;
  }
  return report;
}

}  // namespace hozog
