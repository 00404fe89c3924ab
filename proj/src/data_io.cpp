#include "hozog/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <zlib.h>

#include "hozog/errors.hpp"
#include "hozog/types.hpp"

namespace hozog::data {

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Parses a finite decimal. from_chars rejects a leading '+', so strip one
// (but only one) by hand.
std::optional<double> parse_real(std::string_view tok) {
  if (tok.empty()) return std::nullopt;
  if (tok.front() == '+') {
    tok.remove_prefix(1);
    if (tok.empty() || tok.front() == '+' || tok.front() == '-') return std::nullopt;
  }
  double x = 0.0;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, x, std::chars_format::general);
  if (ec != std::errc() || ptr != last || !std::isfinite(x)) return std::nullopt;
  return x;
}

class LineParser {
 public:
  LineParser(std::string_view content, std::size_t line_no) : text_(content), line_(line_no) {}

  Row parse() {
    Row row;
    std::size_t pos = 0;
    bool first = true;
    std::uint32_t prev_index = 0;
    while (true) {
      const std::size_t end = std::min(text_.find(' ', pos), text_.size());
      const std::string_view tok = text_.substr(pos, end - pos);
      if (tok.empty()) fail(pos, first ? "missing label" : "empty token (separators must be a single space)");
      if (first) {
        auto label = parse_real(tok);
        if (!label) fail(pos, "invalid label '" + std::string(tok) + "'");
        row.label = *label;
        first = false;
      } else {
        row.features.push_back(parse_feature(tok, pos, prev_index));
        prev_index = row.features.back().index;
      }
      if (end == text_.size()) break;
      pos = end + 1;
    }
    return row;
  }

 private:
  Feature parse_feature(std::string_view tok, std::size_t pos, std::uint32_t prev_index) {
    const std::size_t colon = tok.find(':');
    if (colon == std::string_view::npos) fail(pos, "feature '" + std::string(tok) + "' has no ':'");
    const std::string_view idx_tok = tok.substr(0, colon);
    const std::string_view val_tok = tok.substr(colon + 1);
    if (idx_tok.empty()) fail(pos, "missing feature index");
    if (!std::all_of(idx_tok.begin(), idx_tok.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      fail(pos, "invalid feature index '" + std::string(idx_tok) + "'");
    }
    std::uint64_t index = 0;
    auto [ptr, ec] = std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), index);
    if (ec != std::errc() || index > std::numeric_limits<std::uint32_t>::max()) {
      fail(pos, "feature index out of range");
    }
    if (index == 0) fail(pos, "feature index must be positive");
    if (index <= prev_index) fail(pos, "feature indices must be strictly increasing");
    const std::size_t val_pos = pos + colon + 1;
    if (val_tok.empty()) fail(val_pos, "missing feature value");
    auto value = parse_real(val_tok);
    if (!value) fail(val_pos, "invalid feature value '" + std::string(val_tok) + "'");
    return Feature{static_cast<std::uint32_t>(index), *value};
  }

  [[noreturn]] void fail(std::size_t pos, const std::string& reason) const {
    throw ParseError(line_, pos + 1, reason);
  }

  std::string_view text_;
  std::size_t line_;
};

void update_width(SparseDataset& ds, const Row& row) {
  if (!row.features.empty()) {
    ds.n_features = std::max<std::size_t>(ds.n_features, row.features.back().index);
  }
}

std::string read_gzip(const std::filesystem::path& path) {
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) throw Error("cannot open " + path.string());
  std::string out;
  char buf[1 << 16];
  int n = 0;
  while ((n = gzread(file, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(n));
  const bool failed = n < 0;
  gzclose(file);
  if (failed) throw Error("gzip read error in " + path.string());
  return out;
}

}  // namespace

SparseDataset parse_libsvm(std::istream& in) {
  SparseDataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view content(line);
    if (const auto hash = content.find('#'); hash != std::string_view::npos) {
      content = content.substr(0, hash);
    }
    while (!content.empty() && is_blank(content.back())) content.remove_suffix(1);
    if (content.empty()) continue;
    ds.rows.push_back(LineParser(content, line_no).parse());
    update_width(ds, ds.rows.back());
  }
  return ds;
}

SparseDataset parse_libsvm(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_libsvm(in);
}

SparseDataset load_libsvm(const std::filesystem::path& path, std::optional<std::size_t> n_features) {
  SparseDataset ds;
  const std::string name = path.filename().string();
  if (name.size() > 3 && name.compare(name.size() - 3, 3, ".gz") == 0) {
    ds = parse_libsvm(std::string_view(read_gzip(path)));
  } else {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    ds = parse_libsvm(in);
  }
  if (n_features) {
    if (*n_features < ds.n_features) {
      throw DimensionMismatch(path.string() + " has feature index " + std::to_string(ds.n_features) +
                              " beyond declared width " + std::to_string(*n_features));
    }
    ds.n_features = *n_features;
  }
  return ds;
}

std::string format_real(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw Error("failed to format real");
  return std::string(buf, ptr);
}

void write_libsvm(std::ostream& out, const SparseDataset& ds) {
  for (const Row& row : ds.rows) {
    out << format_real(row.label);
    for (const Feature& f : row.features) out << ' ' << f.index << ':' << format_real(f.value);
    out << '\n';
  }
}

std::string to_libsvm_string(const SparseDataset& ds) {
  std::ostringstream out;
  write_libsvm(out, ds);
  return out.str();
}

std::vector<double> distinct_labels(const SparseDataset& ds) {
  std::set<double> labels;
  for (const Row& row : ds.rows) labels.insert(row.label);
  return {labels.begin(), labels.end()};
}

std::size_t nonzeros(const SparseDataset& ds) {
  std::size_t n = 0;
  for (const Row& row : ds.rows) n += row.features.size();
  return n;
}

SparseDataset binarize(const SparseDataset& ds, std::uint64_t seed) {
  std::vector<double> classes = distinct_labels(ds);
  if (classes.size() < 2) throw SingleClass("binarize needs at least two distinct labels");
  Rng rng(seed);
  std::shuffle(classes.begin(), classes.end(), rng);
  const std::size_t negatives = classes.size() / 2;
  const std::set<double> negative_set(classes.begin(), classes.begin() + static_cast<long>(negatives));

  SparseDataset out = ds;
  for (Row& row : out.rows) row.label = negative_set.contains(row.label) ? -1.0 : 1.0;
  return out;
}

DataSplits split_2_1_1(const SparseDataset& ds, std::uint64_t seed) {
  const std::size_t n = ds.size();
  if (n < 4) throw InsufficientData("2:1:1 split needs at least 4 rows, got " + std::to_string(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t cut_val = n / 2;
  const std::size_t cut_test = (3 * n) / 4;
  DataSplits splits;
  for (SparseDataset* part : {&splits.train, &splits.val, &splits.test}) {
    part->n_features = ds.n_features;
  }
  for (std::size_t i = 0; i < n; ++i) {
    SparseDataset& part = i < cut_val ? splits.train : (i < cut_test ? splits.val : splits.test);
    part.rows.push_back(ds.rows[order[i]]);
  }
  return splits;
}

}  // namespace hozog::data
