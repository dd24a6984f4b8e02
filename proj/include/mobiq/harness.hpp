#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mobiq/metrics.hpp"
#include "mobiq/params.hpp"
#include "mobiq/traffic.hpp"

namespace mobiq {

struct RunOptions {
  double eta_window = kDefaultEtaWindow;
  /// Optional per-step record and event sinks.
  std::vector<StepStats>* timeseries = nullptr;
  std::vector<TraceEvent>* trace = nullptr;
  std::vector<Packet>* arrivals = nullptr;
};

/// Runs `params.steps` steps from a fresh world. Throws ConfigError before
/// any work if the parameters are invalid.
RunSummary run_once(const SimParams& params, const RunOptions& options = {});

enum class SweepAxis { rate, speed, radius };

std::string_view to_string(SweepAxis axis);
/// Accepts "R"/"rate", "v"/"speed", "alpha"/"radius". Throws ConfigError("axis").
SweepAxis parse_axis(std::string_view text);

/// Shorter runs for heavily loaded points, where the in-flight population
/// grows without bound.
struct StepCap {
  std::uint32_t rate_above = 500;
  Step steps = 2000;

  bool operator==(const StepCap&) const = default;
};

struct SweepSpec {
  SimParams base;
  SweepAxis axis = SweepAxis::rate;
  std::vector<double> grid;
  std::uint32_t realizations = 20;
  std::vector<Discipline> disciplines{Discipline::fifo, Discipline::sdf};
  std::uint64_t seed_base = 1;
  double eta_window = kDefaultEtaWindow;
  double epsilon = kDefaultRcEpsilon;
  std::optional<StepCap> step_cap;

  bool operator==(const SweepSpec&) const = default;
};

/// Throws ConfigError naming the offending field.
void validate(const SweepSpec& spec);

/// Parameters of one grid point (seed not yet assigned).
SimParams point_params(const SweepSpec& spec, Discipline d, double value);

/// Seed of one realization. Injective over (discipline, grid index,
/// realization) for fewer than 2^24 grid points and realizations.
std::uint64_t derive_seed(std::uint64_t seed_base, Discipline d, std::size_t grid_index, std::uint32_t realization);

/// Mean and sample standard deviation over the realizations that define the
/// quantity. The deviation needs at least two values.
struct Stat {
  std::optional<double> mean;
  std::optional<double> std;
  std::uint32_t count = 0;

  bool operator==(const Stat&) const = default;
};

Stat summarize(const std::vector<double>& values);

struct SweepPoint {
  Discipline discipline = Discipline::sdf;
  double value = 0.0;
  std::uint32_t realizations = 0;
  Stat eta;
  Stat delay;
  Stat q;
  Stat a;

  bool operator==(const SweepPoint&) const = default;
};

struct RcRecord {
  Discipline discipline = Discipline::sdf;
  RcEstimate estimate;

  bool operator==(const RcRecord& o) const {
    return discipline == o.discipline && estimate.rc == o.estimate.rc &&
           estimate.resolution == o.estimate.resolution && estimate.max_grid == o.estimate.max_grid;
  }
};

struct SweepResult {
  SweepAxis axis = SweepAxis::rate;
  /// Ordered by discipline as listed in the spec, then by grid value.
  std::vector<SweepPoint> points;
  /// One entry per discipline when the axis is the rate.
  std::vector<RcRecord> rc;

  bool operator==(const SweepResult&) const = default;
};

struct RunEvent {
  std::size_t done = 0;
  std::size_t total = 0;
  Discipline discipline = Discipline::sdf;
  double value = 0.0;
  std::uint32_t realization = 0;
  const RunSummary* summary = nullptr;
  double seconds = 0.0;
};

struct ExecOptions {
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;
  /// Called once per finished run, serialized.
  std::function<void(const RunEvent&)> progress;
};

/// Runs every (discipline, grid value, realization) and aggregates. A failed
/// run aborts the sweep with a SweepError naming the point.
SweepResult run_sweep(const SweepSpec& spec, const ExecOptions& exec = {});

class SweepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eta means of one discipline along a rate sweep.
std::vector<RcPoint> rc_points(const SweepResult& result, Discipline d);

/// Critical-rate search for one base configuration: a geometric coarse pass
/// that stops once `confirm` consecutive points are congested, then a linear
/// refinement inside the bracketing interval.
struct RcSearch {
  double r_min = 5.0;
  double r_max = 3000.0;
  double factor = 1.5;
  std::uint32_t confirm = 2;
  std::uint32_t refine_points = 4;

  bool operator==(const RcSearch&) const = default;
};

void validate(const RcSearch& search);

/// Integer rate grid r_min, r_min * factor, ... up to r_max (rounded, unique).
std::vector<double> geometric_grid(const RcSearch& search);
/// Up to `n` integer rates strictly between lo and hi, evenly spaced.
std::vector<double> refine_grid(double lo, double hi, std::uint32_t n);

struct RcSearchResult {
  Discipline discipline = Discipline::sdf;
  RcEstimate estimate;
  /// Every sampled rate, ascending.
  std::vector<SweepPoint> points;
};

/// `spec.axis` must be the rate; its grid is ignored. Each discipline in the
/// spec is searched independently.
std::vector<RcSearchResult> search_rc(const SweepSpec& spec, const RcSearch& search, const ExecOptions& exec = {});

/// Critical rate along a second axis (speed or radius).
struct RcCurvePoint {
  Discipline discipline = Discipline::sdf;
  double value = 0.0;
  RcEstimate estimate;
};

struct RcCurve {
  SweepAxis axis = SweepAxis::speed;
  std::vector<RcCurvePoint> points;
  /// Sampled rate sweeps, one per (value, discipline), in the same order.
  std::vector<std::vector<SweepPoint>> samples;
};

/// For each value on `values` (applied along `axis`), runs search_rc.
RcCurve rc_curve(const SweepSpec& spec, SweepAxis axis, const std::vector<double>& values, const RcSearch& search,
                 const ExecOptions& exec = {});

/// Named experiment configurations.
struct Preset {
  enum class Kind { sweep, rc_curve };
  std::string name;
  Kind kind = Kind::sweep;
  /// One spec per part (e.g. per speed); `labels` names the parts.
  std::vector<SweepSpec> parts;
  std::vector<std::string> labels;
  /// rc_curve only.
  SweepAxis curve_axis = SweepAxis::speed;
  std::vector<double> curve_values;
  RcSearch search;
};

std::vector<std::string> preset_names();
/// Throws ConfigError("preset") for an unknown name.
Preset make_preset(std::string_view name);

}  // namespace mobiq
