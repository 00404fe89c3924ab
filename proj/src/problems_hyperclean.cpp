#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "hozog/errors.hpp"
#include "hozog/problems.hpp"

namespace hozog::problems {

namespace {

using Eigen::MatrixXd;

ClassData gather(const data::SparseDataset& ds, std::span<const std::size_t> rows,
                 const std::map<double, int>& class_of, std::size_t n_features) {
  ClassData out;
  out.X = MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n_features));
  out.y.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const data::Row& row = ds.rows[rows[r]];
    for (const data::Feature& f : row.features) {
      out.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f.index - 1)) = f.value;
    }
    out.y.push_back(class_of.at(row.label));
  }
  return out;
}

// Row-wise softmax probabilities of X W + b.
MatrixXd softmax_probabilities(const ClassData& data, const MatrixXd& W, const Vector& b) {
  MatrixXd logits = data.X * W;
  logits.rowwise() += b.transpose();
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    auto row = logits.row(i);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
  return logits;
}

double mean_cross_entropy(const ClassData& data, const MatrixXd& W, const Vector& b) {
  if (data.size() == 0) throw EmptySplit("cross-entropy over an empty split");
  return cross_entropy_per_sample(data, W, b).mean();
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

HyperCleanProblem make_hyperclean(const data::SparseDataset& dataset, std::size_t n_tr,
                                  std::size_t n_val, std::size_t n_t, std::size_t n_h,
                                  std::uint64_t corruption_seed) {
  if (n_tr == 0 || n_val == 0 || n_t == 0) throw EmptySplit("hyper-cleaning splits must be non-empty");
  if (n_h == 0 || n_h > n_tr) throw InvalidConfig("need 1 <= N_h <= N_tr");
  if (dataset.size() < n_tr + n_val + n_t) {
    throw InsufficientData("hyper-cleaning needs " + std::to_string(n_tr + n_val + n_t) +
                           " rows, dataset has " + std::to_string(dataset.size()));
  }
  const std::vector<double> labels = data::distinct_labels(dataset);
  if (labels.size() < 2) throw SingleClass("hyper-cleaning needs at least two classes");
  std::map<double, int> class_of;
  for (std::size_t k = 0; k < labels.size(); ++k) class_of[labels[k]] = static_cast<int>(k);

  Rng rng(corruption_seed);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const std::span<const std::size_t> all(order);

  HyperCleanProblem prob;
  prob.n_classes = labels.size();
  prob.n_features = dataset.n_features;
  prob.train = gather(dataset, all.subspan(0, n_tr), class_of, prob.n_features);
  prob.val = gather(dataset, all.subspan(n_tr, n_val), class_of, prob.n_features);
  prob.test = gather(dataset, all.subspan(n_tr + n_val, n_t), class_of, prob.n_features);
  prob.clean_train_labels = prob.train.y;

  // Groups: contiguous blocks of a shuffled index list; the first
  // n_tr % n_h groups carry one extra member.
  std::vector<std::size_t> members(n_tr);
  std::iota(members.begin(), members.end(), std::size_t{0});
  std::shuffle(members.begin(), members.end(), rng);
  prob.groups.resize(n_h);
  prob.group_of.assign(n_tr, 0);
  const std::size_t base = n_tr / n_h;
  const std::size_t extra = n_tr % n_h;
  std::size_t cursor = 0;
  for (std::size_t g = 0; g < n_h; ++g) {
    const std::size_t len = base + (g < extra ? 1 : 0);
    prob.groups[g].assign(members.begin() + static_cast<long>(cursor),
                          members.begin() + static_cast<long>(cursor + len));
    for (std::size_t i : prob.groups[g]) prob.group_of[i] = g;
    cursor += len;
  }

  const std::size_t n_corrupt = (n_tr + 1) / 2;
  std::vector<std::size_t> candidates(n_tr);
  std::iota(candidates.begin(), candidates.end(), std::size_t{0});
  std::shuffle(candidates.begin(), candidates.end(), rng);
  prob.corrupted.assign(candidates.begin(), candidates.begin() + static_cast<long>(n_corrupt));
  std::sort(prob.corrupted.begin(), prob.corrupted.end());
  std::uniform_int_distribution<int> shift(1, static_cast<int>(prob.n_classes) - 1);
  const int k = static_cast<int>(prob.n_classes);
  for (std::size_t i : prob.corrupted) prob.train.y[i] = (prob.train.y[i] + shift(rng)) % k;
  return prob;
}

Vector cross_entropy_per_sample(const ClassData& data, const MatrixXd& W, const Vector& b) {
  MatrixXd logits = data.X * W;
  logits.rowwise() += b.transpose();
  Vector out(logits.rows());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const auto row = logits.row(i);
    const double m = row.maxCoeff();
    const double lse = m + std::log((row.array() - m).exp().sum());
    out[i] = lse - row(data.y[static_cast<std::size_t>(i)]);
  }
  return out;
}

double hyperclean_weighted_loss(std::span<const double> sample_losses,
                                std::span<const std::size_t> group_of, const Vector& lambda) {
  if (sample_losses.size() != group_of.size()) {
    throw DimensionMismatch("one group id per sample is required");
  }
  if (sample_losses.empty()) throw EmptySplit("weighted loss over no samples");
  double total = 0.0;
  for (std::size_t i = 0; i < sample_losses.size(); ++i) {
    const auto g = static_cast<Eigen::Index>(group_of[i]);
    if (g >= lambda.size()) throw DimensionMismatch("group id outside lambda");
    total += sigmoid(lambda[g]) * sample_losses[i];
  }
  return total / static_cast<double>(sample_losses.size());
}

double hyperclean_inner_loss(const HyperCleanProblem& prob, const MatrixXd& W, const Vector& b,
                             const HyperParams& lambda) {
  if (lambda.size() != static_cast<Eigen::Index>(prob.n_groups())) {
    throw DimensionMismatch("lambda needs one entry per group");
  }
  const Vector losses = cross_entropy_per_sample(prob.train, W, b);
  return hyperclean_weighted_loss(std::span<const double>(losses.data(), losses.size()), prob.group_of,
                                  lambda.values);
}

void hyperclean_inner_gradient(const HyperCleanProblem& prob, const Vector& params,
                               const Vector& lambda, Vector& grad) {
  const std::size_t d = prob.n_features;
  const std::size_t k = prob.n_classes;
  auto [W, b] = unpack_softmax(params, d, k);
  MatrixXd residual = softmax_probabilities(prob.train, W, b);
  const double inv_n = 1.0 / static_cast<double>(prob.train.size());
  for (Eigen::Index i = 0; i < residual.rows(); ++i) {
    residual(i, prob.train.y[static_cast<std::size_t>(i)]) -= 1.0;
    residual.row(i) *= sigmoid(lambda[static_cast<Eigen::Index>(prob.group_of[static_cast<std::size_t>(i)])]) * inv_n;
  }
  const auto dk = static_cast<Eigen::Index>(d * k);
  Eigen::Map<MatrixXd>(grad.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k)).noalias() =
      prob.train.X.transpose() * residual;
  grad.segment(dk, static_cast<Eigen::Index>(k)) = residual.colwise().sum().transpose();
}

double hyperclean_outer_loss(const HyperCleanProblem& prob, const MatrixXd& W, const Vector& b) {
  return mean_cross_entropy(prob.val, W, b);
}

double hyperclean_test_error(const HyperCleanProblem& prob, const ModelParams& model) {
  auto [W, b] = unpack_softmax(model.values, prob.n_features, prob.n_classes);
  return mean_cross_entropy(prob.test, W, b);
}

double hyperclean_test_misclassification(const HyperCleanProblem& prob, const ModelParams& model) {
  if (prob.test.size() == 0) throw EmptySplit("test split is empty");
  auto [W, b] = unpack_softmax(model.values, prob.n_features, prob.n_classes);
  MatrixXd logits = prob.test.X * W;
  logits.rowwise() += b.transpose();
  std::size_t wrong = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    logits.row(i).maxCoeff(&best);
    wrong += best != prob.test.y[static_cast<std::size_t>(i)] ? 1 : 0;
  }
  return static_cast<double>(wrong) / static_cast<double>(prob.test.size());
}

std::pair<MatrixXd, Vector> unpack_softmax(const Vector& params, std::size_t n_features,
                                           std::size_t n_classes) {
  const auto d = static_cast<Eigen::Index>(n_features);
  const auto k = static_cast<Eigen::Index>(n_classes);
  if (params.size() != d * k + k) throw DimensionMismatch("softmax parameter vector has wrong length");
  MatrixXd W = Eigen::Map<const MatrixXd>(params.data(), d, k);
  Vector b = params.segment(d * k, k);
  return {std::move(W), std::move(b)};
}

ObjectiveSpec hyperclean_objective(std::shared_ptr<const HyperCleanProblem> prob,
                                   const IterativeAlgorithm& inner) {
  if (!prob) throw InvalidConfig("hyper-cleaning problem is null");
  if (prob->train.size() == 0 || prob->val.size() == 0) throw EmptySplit("hyper-cleaning split is empty");
  if (prob->group_of.size() != prob->train.size()) {
    throw DimensionMismatch("group assignment does not cover the training split");
  }
  inner.validate();

  ObjectiveSpec spec;
  spec.name = "hyperclean";
  spec.p = prob->n_groups();
  LossGradient grad = [prob](const Vector& w, const Vector& lambda, Vector& g) {
    hyperclean_inner_gradient(*prob, w, lambda, g);
  };
  spec.solve = [prob, inner, grad](const HyperParams& lambda, std::uint64_t seed) {
    ModelParams w = solve(grad, inner, lambda, initial_point(inner, prob->model_dim(), seed));
    auto [W, b] = unpack_softmax(w.values, prob->n_features, prob->n_classes);
    return InnerResult{hyperclean_outer_loss(*prob, W, b), std::move(w), inner.iterations};
  };
  if (prob->test.size() > 0) {
    spec.test_error = [prob](const ModelParams& w) { return hyperclean_test_error(*prob, w); };
  }
  return spec;
}

}  // namespace hozog::problems
