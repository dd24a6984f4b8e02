#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mobiq/model.hpp"
#include "mobiq/params.hpp"

namespace mobiq {

/// Time split of one arrived packet. Every hop costs exactly one step of
/// propagation; whatever remains was spent waiting in queues.
struct DelayComponents {
  Step end_to_end = 0;
  Step queue_delay = 0;
};

/// Throws std::invalid_argument for a packet that has not arrived.
DelayComponents delay_components(const Packet& p);

/// Incremental sums over arrived packets, in arrival order.
struct DelayTally {
  std::uint64_t count = 0;
  std::int64_t end_to_end_sum = 0;
  double queue_ratio_sum = 0.0;

  void add(const Packet& p);
  std::optional<double> mean_delay() const;
  std::optional<double> queue_delay_rate() const;
};

std::optional<double> mean_delay(std::span<const Packet> arrived);
std::optional<double> queue_delay_rate(std::span<const Packet> arrived);
std::optional<double> arrival_rate(std::uint64_t n_arrive, std::uint64_t n_create);

struct EtaEstimate {
  double eta = 0.0;
  /// False when the rate is zero or the series is too short to difference.
  bool defined = false;
};

inline constexpr double kDefaultEtaWindow = 0.2;
inline constexpr double kDefaultRcEpsilon = 0.02;

/// Growth-rate order parameter: (C / R) times the mean one-step change of the
/// in-flight count over the trailing ceil(w * T) steps, clamped at zero.
/// `np_series[i]` is the in-flight count after step i + 1.
EtaEstimate order_parameter(std::span<const std::uint64_t> np_series, std::uint32_t rate,
                            std::uint32_t capacity, double window_fraction = kDefaultEtaWindow);

struct RcPoint {
  double rate = 0.0;
  double eta_mean = 0.0;
};

struct RcEstimate {
  /// Empty when no grid point qualifies (onset lies beyond the grid).
  std::optional<double> rc;
  /// Distance to the preceding grid point; the onset lies in (rc - resolution, rc].
  double resolution = 0.0;
  double max_grid = 0.0;

  bool above_grid() const { return !rc.has_value(); }
};

/// Smallest grid rate whose mean eta exceeds `epsilon` with every larger grid
/// rate also exceeding it. Points must be sorted by strictly increasing rate.
RcEstimate estimate_rc(std::span<const RcPoint> sweep, double epsilon = kDefaultRcEpsilon);

/// End-of-run aggregate.
struct RunSummary {
  SimParams params;
  double eta = 0.0;
  bool eta_defined = false;
  std::optional<double> mean_delay;
  std::optional<double> queue_delay_rate;
  std::optional<double> arrival_rate;
  std::uint64_t n_arrive = 0;
  std::uint64_t n_create = 0;
  std::uint64_t n_drop = 0;
  std::vector<std::uint64_t> np_series;

  bool operator==(const RunSummary&) const = default;
};

}  // namespace mobiq
