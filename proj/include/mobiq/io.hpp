#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mobiq/harness.hpp"

namespace mobiq {

/// Malformed input while parsing an emitted file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed notation with six significant digits, independent of the locale.
/// Integral magnitudes of a million or more keep every integer digit.
std::string format_number(double x);
/// Strict parse of a decimal number; throws FormatError.
double parse_number(std::string_view text);
/// Value as it reads back after format_number.
double quantize(double x);

struct SummaryRecord {
  SimParams params;
  double window = kDefaultEtaWindow;
  /// Absent when undefined (zero rate or fewer than two steps).
  std::optional<double> eta;
  std::optional<double> mean_delay;
  std::optional<double> queue_delay_rate;
  std::optional<double> arrival_rate;
  std::uint64_t n_create = 0;
  std::uint64_t n_arrive = 0;
  std::uint64_t n_drop = 0;

  bool operator==(const SummaryRecord&) const = default;
};

SummaryRecord make_summary(const RunSummary& run, double window);
std::string write_summary_json(const SummaryRecord& s);
SummaryRecord read_summary_json(std::string_view text);

std::string write_timeseries_csv(const std::vector<StepStats>& rows);
std::vector<StepStats> read_timeseries_csv(std::string_view text);
std::string write_timeseries_json(const std::vector<StepStats>& rows);
std::vector<StepStats> read_timeseries_json(std::string_view text);

/// A sweep point as a CSV row. Statistics are rounded to what the file holds.
struct SweepRow {
  Discipline discipline = Discipline::sdf;
  SweepAxis axis = SweepAxis::rate;
  double value = 0.0;
  std::uint32_t realizations = 0;
  std::optional<double> eta_mean, eta_std, delay_mean, delay_std, q_mean, q_std, a_mean, a_std;

  bool operator==(const SweepRow&) const = default;
};

std::vector<SweepRow> sweep_rows(SweepAxis axis, const std::vector<SweepPoint>& points);
std::string write_sweep_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(std::string_view text);

/// Full-precision sweep, including critical-rate estimates.
std::string write_sweep_json(const SweepResult& result);
SweepResult read_sweep_json(std::string_view text);

struct RcEntry {
  Discipline discipline = Discipline::sdf;
  /// Value on the curve axis; absent for a single rate sweep.
  std::optional<double> value;
  std::optional<double> rc;
  double resolution = 0.0;
  double max_grid = 0.0;

  bool operator==(const RcEntry&) const = default;
};

struct RcTable {
  /// Curve axis; absent for a single rate sweep.
  std::optional<SweepAxis> axis;
  double epsilon = kDefaultRcEpsilon;
  std::vector<RcEntry> entries;

  bool operator==(const RcTable&) const = default;
};

RcTable rc_table(const SweepResult& result, double epsilon);
RcTable rc_table(const std::vector<RcSearchResult>& results, double epsilon);
RcTable rc_table(const RcCurve& curve, double epsilon);
std::string write_rc_json(const RcTable& table);
RcTable read_rc_json(std::string_view text);
std::string write_rc_csv(const RcTable& table);

/// Writes a whole file, creating parent directories. Throws std::runtime_error.
void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace mobiq
