#include <algorithm>
#include <cmath>
#include <vector>

#include "hozog/errors.hpp"
#include "hozog/problems.hpp"

namespace hozog::problems {

namespace {

void require_non_empty(const data::SparseDataset& ds, const char* split) {
  if (ds.empty()) throw EmptySplit(std::string(split) + " split is empty");
}

// sigma(-t) = 1 / (1 + e^t), written to stay finite for large |t|.
double logistic_tail(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

double summed_logistic(const BinaryDesign& d, const Vector& w) {
  const Vector margins = d.y.cwiseProduct(d.times(w));
  double total = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) total += logistic_loss(margins[i]);
  return total;
}

}  // namespace

BinaryDesign to_binary_design(const data::SparseDataset& ds, std::size_t n_features) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(data::nonzeros(ds));
  BinaryDesign out;
  out.y.resize(static_cast<Eigen::Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const data::Row& row = ds.rows[i];
    if (row.label != 1.0 && row.label != -1.0) {
      throw InvalidConfig("logistic regression needs labels in {-1, +1}, row " + std::to_string(i) +
                          " has " + data::format_real(row.label));
    }
    out.y[static_cast<Eigen::Index>(i)] = row.label;
    for (const data::Feature& f : row.features) {
      if (f.index > n_features) {
        throw DimensionMismatch("feature index " + std::to_string(f.index) + " exceeds width " +
                                std::to_string(n_features));
      }
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(f.index - 1), f.value);
    }
  }
  out.X.resize(static_cast<Eigen::Index>(ds.size()), static_cast<Eigen::Index>(n_features));
  out.X.setFromTriplets(triplets.begin(), triplets.end());
  if (2 * static_cast<std::size_t>(out.X.nonZeros()) > ds.size() * n_features) out.dense = out.X.toDense();
  return out;
}

Vector BinaryDesign::times(const Vector& w) const {
  if (dense.size() > 0) return dense * w;
  return X * w;
}

Vector BinaryDesign::transpose_times(const Vector& v) const {
  if (dense.size() > 0) return dense.transpose() * v;
  return X.transpose() * v;
}

LogRegProblem make_logreg_problem(const data::DataSplits& splits,
                                  std::optional<std::size_t> n_features) {
  require_non_empty(splits.train, "training");
  require_non_empty(splits.val, "validation");
  require_non_empty(splits.test, "test");
  std::size_t width = n_features.value_or(0);
  if (!n_features) {
    for (const auto* ds : {&splits.train, &splits.val, &splits.test}) {
      width = std::max(width, ds->n_features);
    }
  }
  if (width == 0) throw InvalidConfig("logistic regression needs at least one feature");
  LogRegProblem prob;
  prob.n_features = width;
  prob.train = to_binary_design(splits.train, width);
  prob.val = to_binary_design(splits.val, width);
  prob.test = to_binary_design(splits.test, width);
  return prob;
}

double logistic_loss(double t) {
  if (t > 0.0) return std::log1p(std::exp(-t));
  return -t + std::log1p(std::exp(t));
}

double logreg_inner_loss(const LogRegProblem& prob, const Vector& w, double lambda) {
  return summed_logistic(prob.train, w) + std::exp(lambda) * w.squaredNorm();
}

void logreg_inner_gradient(const LogRegProblem& prob, const Vector& w, double lambda, Vector& grad) {
  const BinaryDesign& d = prob.train;
  const Vector margins = d.y.cwiseProduct(d.times(w));
  Vector coeff(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) coeff[i] = -d.y[i] * logistic_tail(margins[i]);
  grad = d.transpose_times(coeff);
  grad += 2.0 * std::exp(lambda) * w;
}

double logreg_outer_loss(const LogRegProblem& prob, const Vector& w) {
  return summed_logistic(prob.val, w);
}

double logreg_test_error(const LogRegProblem& prob, const ModelParams& model) {
  const BinaryDesign& d = prob.test;
  if (d.size() == 0) throw EmptySplit("test split is empty");
  if (model.size() != static_cast<Eigen::Index>(prob.n_features)) {
    throw DimensionMismatch("model length does not match feature width");
  }
  const Vector margins = d.y.cwiseProduct(d.times(model.values));
  std::size_t wrong = 0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) wrong += margins[i] <= 0.0 ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(d.size());
}

double logreg_test_loss(const LogRegProblem& prob, const ModelParams& model) {
  const BinaryDesign& d = prob.test;
  if (d.size() == 0) throw EmptySplit("test split is empty");
  return summed_logistic(d, model.values) / static_cast<double>(d.size());
}

ObjectiveSpec logreg_objective(std::shared_ptr<const LogRegProblem> prob,
                               const IterativeAlgorithm& inner) {
  if (!prob) throw InvalidConfig("logistic regression problem is null");
  if (prob->train.size() == 0) throw EmptySplit("training split is empty");
  if (prob->val.size() == 0) throw EmptySplit("validation split is empty");
  if (prob->train.X.cols() != prob->val.X.cols() || prob->train.X.cols() != prob->test.X.cols()) {
    throw DimensionMismatch("splits disagree on feature width");
  }
  inner.validate();

  ObjectiveSpec spec;
  spec.name = "logreg";
  spec.p = 1;
  spec.bounds = Box::uniform(1, kLogRegLambdaLo, kLogRegLambdaHi);
  LossGradient grad = [prob](const Vector& w, const Vector& lambda, Vector& g) {
    logreg_inner_gradient(*prob, w, lambda[0], g);
  };
  spec.solve = [prob, inner, grad](const HyperParams& lambda, std::uint64_t seed) {
    ModelParams w = solve(grad, inner, lambda, initial_point(inner, prob->n_features, seed));
    return InnerResult{logreg_outer_loss(*prob, w.values), std::move(w), inner.iterations};
  };
  if (prob->test.size() > 0) {
    spec.test_error = [prob](const ModelParams& w) { return logreg_test_error(*prob, w); };
  }
  return spec;
}

}  // namespace hozog::problems
