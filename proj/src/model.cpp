#include "mobiq/model.hpp"

namespace mobiq {

Slot PacketStore::allocate(const Packet& p) {
  Slot s;
  if (!free_.empty()) {
    s = free_.back();
    free_.pop_back();
  } else {
    s = static_cast<Slot>(nodes_.size());
    nodes_.emplace_back();
  }
  Node& n = nodes_[s];
  n = Node{};
  n.packet = p;
  n.live = true;
  ++live_;
  return s;
}

void PacketStore::release(Slot s) {
  nodes_[s].live = false;
  free_.push_back(s);
  --live_;
}

void PacketStore::push_back(AgentQueue& q, Slot s) {
  Node& n = nodes_[s];
  n.stamp = next_stamp_++;
  n.prev = q.tail;
  n.next = kNoSlot;
  if (q.tail != kNoSlot) {
    nodes_[q.tail].next = s;
  } else {
    q.head = s;
  }
  q.tail = s;
  ++q.size;

  DstChain& chain = q.by_dst[n.packet.dst.value];
  n.dst_prev = chain.tail;
  n.dst_next = kNoSlot;
  if (chain.tail != kNoSlot) {
    nodes_[chain.tail].dst_next = s;
  } else {
    chain.head = s;
  }
  chain.tail = s;
  ++chain.size;
}

void PacketStore::erase(AgentQueue& q, Slot s) {
  Node& n = nodes_[s];
  if (n.prev != kNoSlot) nodes_[n.prev].next = n.next; else q.head = n.next;
  if (n.next != kNoSlot) nodes_[n.next].prev = n.prev; else q.tail = n.prev;
  --q.size;

  auto it = q.by_dst.find(n.packet.dst.value);
  DstChain& chain = it->second;
  if (n.dst_prev != kNoSlot) nodes_[n.dst_prev].dst_next = n.dst_next; else chain.head = n.dst_next;
  if (n.dst_next != kNoSlot) nodes_[n.dst_next].dst_prev = n.dst_prev; else chain.tail = n.dst_prev;
  if (--chain.size == 0) q.by_dst.erase(it);

  n.prev = n.next = n.dst_prev = n.dst_next = kNoSlot;
}

}  // namespace mobiq
