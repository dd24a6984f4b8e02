#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "mobiq/geometry.hpp"
#include "mobiq/params.hpp"

namespace mobiq {

/// Agent identifier, 1-based as in the model description.
struct AgentId {
  std::uint32_t value = 0;

  constexpr AgentId() = default;
  constexpr explicit AgentId(std::uint32_t v) : value(v) {}
  static constexpr AgentId from_index(std::size_t i) { return AgentId(static_cast<std::uint32_t>(i + 1)); }
  constexpr std::size_t index() const { return value - 1; }

  auto operator<=>(const AgentId&) const = default;
};

using PacketId = std::uint64_t;

struct Packet {
  PacketId id = 0;
  AgentId src;
  AgentId dst;
  Step created_at = 0;
  std::optional<Step> arrived_at;
  std::uint32_t hops = 0;
  AgentId holder;
  /// Earliest step at which the holder may act on this packet.
  Step eligible_at = 0;
};

using Slot = std::uint32_t;
inline constexpr Slot kNoSlot = 0xffffffffu;

/// Packets of one destination inside one queue, linked in queue order.
struct DstChain {
  Slot head = kNoSlot;
  Slot tail = kNoSlot;
  std::uint32_t size = 0;
};

/// Ordered packet queue of one agent. The packets themselves live in a
/// PacketStore; the queue links them twice: once in arrival order and once
/// per destination.
struct AgentQueue {
  Slot head = kNoSlot;
  Slot tail = kNoSlot;
  std::size_t size = 0;
  /// Packets received during the current step. They sit at the tail.
  std::size_t ineligible = 0;
  std::unordered_map<std::uint32_t, DstChain> by_dst;

  std::size_t eligible() const { return size - ineligible; }
};

struct AgentState {
  AgentId id;
  Point pos;
  double heading = 0.0;
  std::uint32_t remaining_capacity = 0;
  AgentQueue queue;
};

/// Slot-recycling storage for live packets.
class PacketStore {
 public:
  struct Node {
    Packet packet;
    /// Monotone enqueue counter; orders packets within a queue.
    std::uint64_t stamp = 0;
    Slot prev = kNoSlot;
    Slot next = kNoSlot;
    Slot dst_prev = kNoSlot;
    Slot dst_next = kNoSlot;
    bool live = false;
  };

  Slot allocate(const Packet& p);
  void release(Slot s);

  Node& node(Slot s) { return nodes_[s]; }
  const Node& node(Slot s) const { return nodes_[s]; }
  Packet& packet(Slot s) { return nodes_[s].packet; }
  const Packet& packet(Slot s) const { return nodes_[s].packet; }

  std::size_t live_count() const { return live_; }

  /// Appends at the queue tail and stamps the node.
  void push_back(AgentQueue& q, Slot s);
  /// Unlinks from anywhere in the queue.
  void erase(AgentQueue& q, Slot s);

 private:
  std::vector<Node> nodes_;
  std::vector<Slot> free_;
  std::size_t live_ = 0;
  std::uint64_t next_stamp_ = 0;
};

}  // namespace mobiq
