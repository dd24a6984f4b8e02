#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "mobiq/metrics.hpp"
#include "mobiq/model.hpp"
#include "mobiq/rng.hpp"
#include "mobiq/spatial_index.hpp"

namespace mobiq {

struct StepStats {
  Step t = 0;
  std::uint64_t created = 0;
  std::uint64_t arrived = 0;
  std::uint64_t dropped = 0;
  /// In-flight count after the step.
  std::uint64_t n_packets_after = 0;

  bool operator==(const StepStats&) const = default;
};

enum class TraceKind : std::uint8_t { created, forwarded, delivered, dropped };

/// One packet event. `from`/`to` are the transmitting and receiving agents;
/// for `created` and `dropped` both name the holder.
struct TraceEvent {
  Step t = 0;
  TraceKind kind = TraceKind::created;
  PacketId packet = 0;
  AgentId from;
  AgentId to;

  bool operator==(const TraceEvent&) const = default;
};

struct NextHop {
  AgentId id;
  double distance = 0.0;
};

/// Number of queued packets an agent examines for direct delivery.
std::size_t scan_pool_size(std::size_t eligible_len, Discipline discipline, std::uint32_t capacity);

/// One simulation world: agents, their queues, and the per-step engine.
///
/// A step runs, in order: packet generation, mobility, index rebuild, then
/// every agent in ascending id order (direct delivery followed by forwarding),
/// and finally TTL expiry when configured. A packet handed to a neighbour in
/// step t becomes eligible at t + 1, so it moves at most one hop per step.
/// A transmission in step t completes at t + 1; that is the recorded arrival
/// time of a directly delivered packet.
class Simulation {
 public:
  explicit Simulation(const SimParams& params);

  const SimParams& params() const { return params_; }
  const WorldGeometry& geometry() const { return geom_; }
  std::span<const AgentState> agents() const { return agents_; }
  const AgentState& agent(AgentId id) const { return agents_[id.index()]; }
  const GridIndex& index() const { return index_; }
  Step now() const { return now_; }

  std::uint64_t total_created() const { return total_created_; }
  std::uint64_t total_arrived() const { return total_arrived_; }
  std::uint64_t total_dropped() const { return total_dropped_; }
  std::uint64_t in_flight() const { return packets_.live_count(); }
  const DelayTally& delay_tally() const { return tally_; }

  /// Advances one step (t = now() + 1).
  StepStats step();

  // Individual phases, exposed for tests and instrumentation. step() is the
  // only composition the engine guarantees.

  std::vector<PacketId> generate_packets(Step t);
  void move_agents();
  /// Rebuilds the grid and every agent's contact list from current positions.
  void rebuild_index();
  /// Resets capacity, then direct delivery and forwarding for one agent.
  void process_agent(AgentId id, Step t);
  void expire_packets(Step t);

  /// Current neighbours, ascending by id.
  std::vector<AgentId> neighbors_of(AgentId id) const;
  std::optional<NextHop> best_next_hop(const Packet& packet, std::span<const AgentId> neighbors) const;
  /// Delivers eligible packets whose destination is in contact, scanning the
  /// first `pool` eligible packets in queue order, until capacity runs out.
  std::vector<PacketId> direct_delivery(AgentId id, std::size_t pool, std::span<const AgentId> neighbors,
                                        Step t);
  /// Forwards up to the agent's remaining capacity of eligible packets.
  std::vector<PacketId> forward_packets(AgentId id, std::span<const AgentId> neighbors, Step t);
  /// Eligible packets in the order the discipline would forward them (at
  /// most `limit`), together with their routing distance.
  std::vector<std::pair<PacketId, double>> forwarding_order(AgentId id, std::span<const AgentId> neighbors,
                                                            std::size_t limit, Step t) const;

  // Fixture hooks.

  void place_agent(AgentId id, Point p);
  void set_heading(AgentId id, double heading);
  /// Appends a packet to the source's queue, eligible immediately.
  PacketId inject_packet(AgentId src, AgentId dst, Step created_at);
  /// Packets queued at an agent, head first.
  std::vector<Packet> queue_contents(AgentId id) const;
  std::optional<Packet> find_packet(PacketId id) const;

  /// Optional sinks; null disables recording.
  void set_trace(std::vector<TraceEvent>* sink) { trace_ = sink; }
  void set_arrival_log(std::vector<Packet>* sink) { arrivals_ = sink; }

 private:
  struct Candidate {
    double d2;
    std::uint64_t stamp;
    Slot slot;
    bool operator<(const Candidate& o) const { return d2 < o.d2 || (d2 == o.d2 && stamp < o.stamp); }
  };

  AgentState& mut_agent(AgentId id) { return agents_[id.index()]; }
  void record(Step t, TraceKind kind, PacketId p, AgentId from, AgentId to);
  double min_d2_to(Point target, std::span<const AgentId> neighbors) const;
  void deliver(AgentState& holder, Slot s, Step t);
  void forward(AgentState& holder, Slot s, AgentId to, Step t);
  void collect_chain(const DstChain& chain, double d2, std::size_t limit, Step t,
                     std::vector<Candidate>& out) const;
  void select_sdf(const AgentState& holder, std::span<const AgentId> neighbors, std::size_t count, Step t,
                  std::vector<Candidate>& out) const;
  std::vector<Candidate> ordered_candidates(const AgentState& holder, std::span<const AgentId> neighbors,
                                            std::size_t limit, Step t) const;

  SimParams params_;
  WorldGeometry geom_;
  RngStream mobility_rng_;
  RngStream traffic_rng_;
  std::vector<AgentState> agents_;
  PacketStore packets_;
  GridIndex index_;
  Step now_ = 0;
  PacketId next_packet_id_ = 0;

  std::uint64_t total_created_ = 0;
  std::uint64_t total_arrived_ = 0;
  std::uint64_t total_dropped_ = 0;
  StepStats current_;
  DelayTally tally_;
  /// Creation-ordered (slot, id) pairs; maintained only with a TTL.
  std::deque<std::pair<Slot, PacketId>> ttl_queue_;

  std::vector<TraceEvent>* trace_ = nullptr;
  std::vector<Packet>* arrivals_ = nullptr;

  ContactLists contacts_;

  mutable std::vector<std::tuple<double, const DstChain*, std::uint32_t>> dst_scratch_;
};

}  // namespace mobiq
