#include <cmath>
#include <random>

#include "hozog/data_io.hpp"
#include "hozog/errors.hpp"
#include "hozog/types.hpp"

namespace hozog::data {

namespace {

Row dense_row(double label, const Vector& x) {
  Row row;
  row.label = label;
  row.features.reserve(static_cast<std::size_t>(x.size()));
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (x[j] != 0.0) row.features.push_back({static_cast<std::uint32_t>(j + 1), x[j]});
  }
  return row;
}

}  // namespace

SparseDataset make_linear_teacher_binary(std::size_t n, std::size_t d, double label_noise,
                                         std::uint64_t seed) {
  if (d == 0) throw InvalidConfig("feature dimension must be positive");
  if (label_noise < 0.0 || label_noise > 1.0) throw InvalidConfig("label_noise must lie in [0, 1]");
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  const auto dim = static_cast<Eigen::Index>(d);
  Vector teacher(dim);
  for (auto& v : teacher) v = normal(rng);

  SparseDataset ds;
  ds.n_features = d;
  ds.rows.reserve(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  Vector x(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x) v = normal(rng) * scale;
    double label = x.dot(teacher) >= 0.0 ? 1.0 : -1.0;
    if (unit(rng) < label_noise) label = -label;
    ds.rows.push_back(dense_row(label, x));
  }
  return ds;
}

SparseDataset make_gaussian_blobs(std::size_t n, std::size_t d, std::size_t classes,
                                  double separation, std::uint64_t seed) {
  if (d == 0) throw InvalidConfig("feature dimension must be positive");
  if (classes < 2) throw InvalidConfig("need at least two classes");
  Rng rng(seed);
  std::normal_distribution<double> normal;
  const auto dim = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd centres(dim, static_cast<Eigen::Index>(classes));
  for (Eigen::Index k = 0; k < centres.cols(); ++k) {
    for (Eigen::Index j = 0; j < dim; ++j) centres(j, k) = separation * normal(rng);
  }
  std::uniform_int_distribution<std::size_t> pick(0, classes - 1);

  SparseDataset ds;
  ds.n_features = d;
  ds.rows.reserve(n);
  Vector x(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = pick(rng);
    for (Eigen::Index j = 0; j < dim; ++j) x[j] = centres(j, static_cast<Eigen::Index>(k)) + normal(rng);
    ds.rows.push_back(dense_row(static_cast<double>(k), x));
  }
  return ds;
}

}  // namespace hozog::data
