#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hozog::data {

struct Feature {
  std::uint32_t index = 0;  // 1-based
  double value = 0.0;

  bool operator==(const Feature&) const = default;
};

struct Row {
  double label = 0.0;
  std::vector<Feature> features;  // strictly increasing index

  bool operator==(const Row&) const = default;
};

/// Rows in LIBSVM sparse form. n_features is the largest index seen, or a
/// larger declared width.
struct SparseDataset {
  std::vector<Row> rows;
  std::size_t n_features = 0;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }

  bool operator==(const SparseDataset&) const = default;
};

struct DataSplits {
  SparseDataset train;
  SparseDataset val;
  SparseDataset test;
};

// Grammar, one record per line:
//   <label> <idx>:<val> <idx>:<val> ...
// Tokens are separated by exactly one space. '#' starts a comment running to
// end of line. Trailing blanks (space, tab, CR) are dropped; lines that are
// empty after that are skipped. Labels and values are finite decimals with an
// optional sign; indices are positive decimal integers, strictly increasing.
// Any deviation throws ParseError.
SparseDataset parse_libsvm(std::istream& in);
SparseDataset parse_libsvm(std::string_view text);

/// Reads a LIBSVM file, gunzipping it first when the name ends in ".gz".
/// A declared width pads n_features; it must cover every observed index.
SparseDataset load_libsvm(const std::filesystem::path& path,
                          std::optional<std::size_t> n_features = std::nullopt);

/// Canonical text form: labels and values in shortest round-trip decimal.
void write_libsvm(std::ostream& out, const SparseDataset& ds);
std::string to_libsvm_string(const SparseDataset& ds);

/// Shortest decimal string that parses back to exactly `x`.
std::string format_real(double x);

/// Maps labels to {-1, +1} by splitting the sorted distinct labels into two
/// halves via a seeded shuffle. Throws SingleClass with fewer than 2 labels.
SparseDataset binarize(const SparseDataset& ds, std::uint64_t seed);

/// Seeded shuffle, then cuts at floor(n/2) and floor(3n/4).
DataSplits split_2_1_1(const SparseDataset& ds, std::uint64_t seed);

/// Distinct labels in ascending order.
std::vector<double> distinct_labels(const SparseDataset& ds);

std::size_t nonzeros(const SparseDataset& ds);

// Desk-scale generators used in place of the large public datasets.

/// Two classes, labels in {-1,+1}: a random linear teacher on Gaussian inputs
/// scaled by 1/sqrt(d), with a `label_noise` fraction of labels flipped.
SparseDataset make_linear_teacher_binary(std::size_t n, std::size_t d, double label_noise,
                                         std::uint64_t seed);

/// `classes` Gaussian blobs with centres drawn as N(0, separation^2 I), labels 0..K-1.
SparseDataset make_gaussian_blobs(std::size_t n, std::size_t d, std::size_t classes,
                                  double separation, std::uint64_t seed);

}  // namespace hozog::data
