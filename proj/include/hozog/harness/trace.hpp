#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace hozog::harness {

/// One row of an experiment trace.
struct TraceRecord {
  std::string method;
  std::size_t meta_iter = 0;
  std::size_t oracle_calls_optimizer = 0;
  std::size_t oracle_calls_metrics = 0;
  double wall_time_s = 0.0;
  double f_value = 0.0;
  double suboptimality = 0.0;
  double grad_norm_est = 0.0;
  double test_error = 0.0;

  std::size_t oracle_calls_cumulative() const { return oracle_calls_optimizer + oracle_calls_metrics; }
};

inline constexpr std::string_view kTraceHeader =
    "method,meta_iter,oracle_calls_optimizer,oracle_calls_metrics,wall_time_s,f_value,"
    "suboptimality,grad_norm_est,test_error";

std::string to_csv_line(const TraceRecord& record);
TraceRecord parse_csv_line(std::string_view line);

/// Single-writer CSV sink; writes the header on open and flushes every row.
class CsvTraceWriter {
 public:
  explicit CsvTraceWriter(const std::filesystem::path& path);

  void write(const TraceRecord& record);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::vector<TraceRecord> read_trace(const std::filesystem::path& path);

/// Field-by-field equality ignoring wall_time_s; NaNs compare equal to NaNs.
bool same_except_wall_time(const TraceRecord& a, const TraceRecord& b);
bool same_except_wall_time(const std::vector<TraceRecord>& a, const std::vector<TraceRecord>& b);

/// f_value minus the minimum f_value over the whole trace, i.e. suboptimality
/// against the run's final incumbent rather than the running minimum.
std::vector<double> suboptimality_against_final(const std::vector<TraceRecord>& records);

}  // namespace hozog::harness
