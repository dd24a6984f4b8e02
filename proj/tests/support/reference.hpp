#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mobiq/metrics.hpp"
#include "mobiq/traffic.hpp"

namespace mobiq::ref {

/// Straightforward re-implementation of the step rules: all-pairs neighbour
/// scans, plain vectors for queues, full sorts. Shares only geometry, RNG
/// and mobility with the engine.
struct RefRun {
  std::vector<StepStats> steps;
  std::vector<TraceEvent> trace;
  std::vector<Packet> arrivals;
  /// Largest eligible queue seen at any scan.
  std::size_t max_eligible = 0;
};

RefRun run_reference(const SimParams& p);

/// Metrics recomputed from a packet event trace alone.
struct Replay {
  std::vector<std::uint64_t> np_series;
  double eta = 0.0;
  bool eta_defined = false;
  std::optional<double> mean_delay;
  std::optional<double> queue_delay_rate;
  std::optional<double> arrival_rate;
  std::uint64_t n_create = 0;
  std::uint64_t n_arrive = 0;
  std::uint64_t n_drop = 0;
};

/// Throws std::logic_error when the trace is internally inconsistent.
Replay replay(const std::vector<TraceEvent>& trace, const SimParams& p, double window = kDefaultEtaWindow);

/// Violations of the per-step transfer rules found in a trace: more than C
/// transmissions by one agent in one step, or a packet moving twice in one step.
std::vector<std::string> transfer_violations(const std::vector<TraceEvent>& trace, std::uint32_t capacity);

/// Per-packet (step, holder) sequences, indexed by packet id.
std::vector<std::vector<std::pair<Step, std::uint32_t>>> trajectories(const std::vector<TraceEvent>& trace);

}  // namespace mobiq::ref
