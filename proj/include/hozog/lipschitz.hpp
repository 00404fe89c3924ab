#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hozog/oracle.hpp"

namespace hozog {

/// Supremum spectral norms of the step-map Jacobians along an inner run of
/// length T. Index t - 1 holds the value for step t, t = 1..T+1:
///   a[t-1] = sup ||d Phi_t / d w_{t-1}||   (a[T] = sup ||dE / d w_T||)
///   b[t-1] = sup ||d Phi_t / d lambda||    (b[T] = sup ||dE / d lambda||)
struct StepJacobians {
  std::vector<double> a;
  std::vector<double> b;

  std::size_t horizon() const { return a.empty() ? 0 : a.size() - 1; }
  /// Throws InvalidConfig unless both have T+1 finite, non-negative entries.
  void validate() const;
};

/// sum_{t=1}^{T+1} b_t * a_{t+1} * ... * a_{T+1}, accumulated right to left.
double lipschitz_bound(const StepJacobians& jacs);

/// Bounds for gradient descent with step `eta` on the synthetic problem, over
/// lambda in [lambda_lo, lambda_hi] and the reachable w range:
///   A_t = 1 - eta (1 + 2 e^lambda),  B_t = -2 eta e^lambda w_{t-1},
///   A_{T+1} = w_T - w_star,          B_{T+1} = 0.
/// Throws InvalidConfig when |A_t| > 1 somewhere in the box.
StepJacobians synthetic_step_jacobians(double c, double w_star, double eta, std::size_t T_inner,
                                       double lambda_lo, double lambda_hi, double w0 = 0.0);

/// Bound on |w_t| for every t and every lambda in the box, given |A_t| <= 1.
double synthetic_iterate_envelope(double c, double w0, double lambda_lo, double lambda_hi);

struct LipschitzReport {
  double bound = 0.0;  // NaN when no analytic bound is available
  double empirical_max_ratio = 0.0;
  std::size_t samples = 0;
  Box domain_box;
};

/// Monte-Carlo lower estimate of L(f): the largest |f(a) - f(b)| / ||a - b||
/// over `n_pairs` pairs drawn uniformly from `box`. `bound` is left NaN.
LipschitzReport empirical_lipschitz(const ObjectiveSpec& spec, const Box& box, std::size_t n_pairs,
                                    std::uint64_t seed, std::size_t max_workers = 1);

}  // namespace hozog
