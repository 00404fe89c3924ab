#include "hozog/harness/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "hozog/data_io.hpp"
#include "hozog/errors.hpp"

namespace hozog::harness {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

double to_real(std::string_view tok) {
  if (tok == "nan" || tok == "-nan") return std::numeric_limits<double>::quiet_NaN();
  if (tok == "inf") return std::numeric_limits<double>::infinity();
  if (tok == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw Error("malformed trace number '" + std::string(tok) + "'");
  }
  return x;
}

std::size_t to_count(std::string_view tok) {
  std::size_t x = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw Error("malformed trace count '" + std::string(tok) + "'");
  }
  return x;
}

bool same_real(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

}  // namespace

std::string to_csv_line(const TraceRecord& r) {
  using data::format_real;
  std::string line = r.method;
  line += ',' + std::to_string(r.meta_iter);
  line += ',' + std::to_string(r.oracle_calls_optimizer);
  line += ',' + std::to_string(r.oracle_calls_metrics);
  for (double x : {r.wall_time_s, r.f_value, r.suboptimality, r.grad_norm_est, r.test_error}) {
    line += ',' + format_real(x);
  }
  return line;
}

TraceRecord parse_csv_line(std::string_view line) {
  const auto cells = split_commas(line);
  if (cells.size() != 9) throw Error("trace row has " + std::to_string(cells.size()) + " cells, expected 9");
  TraceRecord r;
  r.method = std::string(cells[0]);
  r.meta_iter = to_count(cells[1]);
  r.oracle_calls_optimizer = to_count(cells[2]);
  r.oracle_calls_metrics = to_count(cells[3]);
  r.wall_time_s = to_real(cells[4]);
  r.f_value = to_real(cells[5]);
  r.suboptimality = to_real(cells[6]);
  r.grad_norm_est = to_real(cells[7]);
  r.test_error = to_real(cells[8]);
  return r;
}

CsvTraceWriter::CsvTraceWriter(const std::filesystem::path& path) : path_(path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::out | std::ios::trunc);
  if (!out_) throw Error("cannot write trace file " + path.string());
  out_ << kTraceHeader << '\n';
  out_.flush();
}

void CsvTraceWriter::write(const TraceRecord& record) {
  out_ << to_csv_line(record) << '\n';
  out_.flush();
  if (!out_) throw Error("failed writing trace file " + path_.string());
}

std::vector<TraceRecord> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw Error("trace header mismatch in " + path.string());
  std::vector<TraceRecord> out;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(parse_csv_line(line));
  }
  return out;
}

bool same_except_wall_time(const TraceRecord& a, const TraceRecord& b) {
  return a.method == b.method && a.meta_iter == b.meta_iter &&
         a.oracle_calls_optimizer == b.oracle_calls_optimizer &&
         a.oracle_calls_metrics == b.oracle_calls_metrics && same_real(a.f_value, b.f_value) &&
         same_real(a.suboptimality, b.suboptimality) && same_real(a.grad_norm_est, b.grad_norm_est) &&
         same_real(a.test_error, b.test_error);
}

bool same_except_wall_time(const std::vector<TraceRecord>& a, const std::vector<TraceRecord>& b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(),
                    [](const TraceRecord& x, const TraceRecord& y) { return same_except_wall_time(x, y); });
}

std::vector<double> suboptimality_against_final(const std::vector<TraceRecord>& records) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : records) best = std::min(best, r.f_value);
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.f_value - best);
  return out;
}

}  // namespace hozog::harness
