#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "hozog/data_io.hpp"
#include "hozog/inner_solvers.hpp"
#include "hozog/oracle.hpp"

namespace hozog::problems {

// ---------------------------------------------------------------------------
// Synthetic scalar bilevel problem with a closed-form inner solution:
//   inner  L(w, lambda) = 1/2 (w - c)^2 + e^lambda w^2   =>  w(lambda) = c / (1 + 2 e^lambda)
//   outer  E(w)         = 1/2 (w - w_star)^2
// ---------------------------------------------------------------------------

struct SyntheticBilevel {
  double c = 3.0;
  double w_star = 1.0;

  /// Requires 0 < w_star < c; throws InvalidConfig otherwise.
  void validate() const;
  /// argmin f = ln((c / w_star - 1) / 2).
  double minimizer() const;
};

double synthetic_inner_solution(double c, double lambda);
double synthetic_value(const SyntheticBilevel& problem, double lambda);
double synthetic_analytic_hypergradient(double c, double w_star, double lambda);
LossGradient synthetic_loss_gradient(double c);

/// Exact mode: the inner problem is solved in closed form.
ObjectiveSpec make_synthetic(double c, double w_star);
/// Iterative mode: w(lambda) comes from running `inner` on L (model dimension 1).
ObjectiveSpec make_synthetic(double c, double w_star, const IterativeAlgorithm& inner);

// ---------------------------------------------------------------------------
// l2-regularised logistic regression with a scalar log-regularisation lambda:
//   inner  sum_{train} l(y <x, w>) + e^lambda ||w||^2
//   outer  sum_{val}   l(y <x, w(lambda)>),   l(t) = log(1 + e^{-t})
// ---------------------------------------------------------------------------

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct BinaryDesign {
  SparseRows X;
  Vector y;  // entries in {-1, +1}
  // Dense copy of X, kept when X is mostly non-zero; products then use it.
  Eigen::MatrixXd dense;

  std::size_t size() const { return static_cast<std::size_t>(y.size()); }
  Vector times(const Vector& w) const;             // X w
  Vector transpose_times(const Vector& v) const;   // X^T v
};

/// Labels must already be -1/+1 (see data::binarize).
BinaryDesign to_binary_design(const data::SparseDataset& ds, std::size_t n_features);

struct LogRegProblem {
  BinaryDesign train;
  BinaryDesign val;
  BinaryDesign test;
  std::size_t n_features = 0;
};

inline constexpr double kLogRegLambdaLo = -10.0;
inline constexpr double kLogRegLambdaHi = 10.0;

/// Throws EmptySplit for an empty split and DimensionMismatch when a feature
/// index exceeds the declared width.
LogRegProblem make_logreg_problem(const data::DataSplits& splits,
                                  std::optional<std::size_t> n_features = std::nullopt);

/// log(1 + e^{-t}) without overflow.
double logistic_loss(double t);

double logreg_inner_loss(const LogRegProblem& prob, const Vector& w, double lambda);
void logreg_inner_gradient(const LogRegProblem& prob, const Vector& w, double lambda, Vector& grad);
double logreg_outer_loss(const LogRegProblem& prob, const Vector& w);

/// Misclassification rate on the test split; a zero score counts as an error.
double logreg_test_error(const LogRegProblem& prob, const ModelParams& model);
/// Mean logistic loss on the test split.
double logreg_test_loss(const LogRegProblem& prob, const ModelParams& model);

/// p = 1, bounds [-10, 10].
ObjectiveSpec logreg_objective(std::shared_ptr<const LogRegProblem> prob,
                               const IterativeAlgorithm& inner);

// ---------------------------------------------------------------------------
// Data hyper-cleaning: softmax regression whose training examples are split
// into groups, each weighted by sigmoid(lambda_g) in the inner loss
//   L(W, b) = (1 / N_tr) sum_g sum_{i in g} sigmoid(lambda_g) CE(W, b, x_i, y_i)
// and scored by the mean validation cross-entropy.
// ---------------------------------------------------------------------------

struct ClassData {
  Eigen::MatrixXd X;  // one sample per row
  std::vector<int> y;  // class ids 0..K-1

  std::size_t size() const { return y.size(); }
};

struct HyperCleanProblem {
  ClassData train;  // labels after corruption
  ClassData val;
  ClassData test;
  std::size_t n_classes = 0;
  std::size_t n_features = 0;
  std::vector<std::vector<std::size_t>> groups;  // partition of 0..N_tr-1
  std::vector<std::size_t> group_of;             // training index -> group
  std::vector<std::size_t> corrupted;            // sorted training indices
  std::vector<int> clean_train_labels;

  std::size_t n_groups() const { return groups.size(); }
  /// Flattened (W, b): W is n_features x n_classes column-major, then b.
  std::size_t model_dim() const { return n_features * n_classes + n_classes; }
};

/// Seeded shuffle of the rows into train/val/test, a seeded partition of the
/// training indices into n_h near-equal contiguous blocks, and ceil(n_tr / 2)
/// training labels replaced by a uniformly drawn different class.
HyperCleanProblem make_hyperclean(const data::SparseDataset& dataset, std::size_t n_tr,
                                  std::size_t n_val, std::size_t n_t, std::size_t n_h,
                                  std::uint64_t corruption_seed);

double sigmoid(double x);

/// Per-sample cross-entropy of softmax(x W + b) against the labels.
Vector cross_entropy_per_sample(const ClassData& data, const Eigen::MatrixXd& W, const Vector& b);

/// (1 / N) sum_i sigmoid(lambda_{group_of[i]}) * sample_losses[i].
double hyperclean_weighted_loss(std::span<const double> sample_losses,
                                std::span<const std::size_t> group_of, const Vector& lambda);

double hyperclean_inner_loss(const HyperCleanProblem& prob, const Eigen::MatrixXd& W,
                             const Vector& b, const HyperParams& lambda);
void hyperclean_inner_gradient(const HyperCleanProblem& prob, const Vector& params,
                               const Vector& lambda, Vector& grad);
/// Mean validation cross-entropy.
double hyperclean_outer_loss(const HyperCleanProblem& prob, const Eigen::MatrixXd& W,
                             const Vector& b);
/// Mean test cross-entropy.
double hyperclean_test_error(const HyperCleanProblem& prob, const ModelParams& model);
double hyperclean_test_misclassification(const HyperCleanProblem& prob, const ModelParams& model);

std::pair<Eigen::MatrixXd, Vector> unpack_softmax(const Vector& params, std::size_t n_features,
                                                  std::size_t n_classes);

/// p = N_h, unbounded.
ObjectiveSpec hyperclean_objective(std::shared_ptr<const HyperCleanProblem> prob,
                                   const IterativeAlgorithm& inner);

}  // namespace hozog::problems
