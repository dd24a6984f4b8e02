#include "mobiq/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "mobiq/mobility.hpp"

namespace mobiq {

namespace {

}  // namespace

std::size_t scan_pool_size(std::size_t eligible_len, Discipline discipline, std::uint32_t capacity) {
  if (discipline == Discipline::sdf) return eligible_len;
  return std::min<std::size_t>(eligible_len, capacity);
}

Simulation::Simulation(const SimParams& params)
    : params_((validate(params), params)),
      geom_(params.side_length),
      mobility_rng_(rng_stream(params.seed, StreamLabel::mobility)),
      traffic_rng_(rng_stream(params.seed, StreamLabel::traffic)),
      index_(geom_, params.radius) {
  RngStream init_rng = rng_stream(params.seed, StreamLabel::init);
  agents_ = init_positions(params_, init_rng);
  rebuild_index();
}

void Simulation::record(Step t, TraceKind kind, PacketId p, AgentId from, AgentId to) {
  if (trace_) trace_->push_back(TraceEvent{t, kind, p, from, to});
}

StepStats Simulation::step() {
  const Step t = now_ + 1;
  current_ = StepStats{};
  current_.t = t;
  for (AgentState& a : agents_) a.queue.ineligible = 0;

  generate_packets(t);
  move_agents();
  rebuild_index();
  for (const AgentState& a : agents_) process_agent(a.id, t);
  if (params_.ttl) expire_packets(t);

  now_ = t;
  current_.n_packets_after = packets_.live_count();
  return current_;
}

std::vector<PacketId> Simulation::generate_packets(Step t) {
  std::vector<PacketId> ids;
  ids.reserve(params_.rate);
  const std::uint64_t n = params_.agent_count;
  for (std::uint32_t r = 0; r < params_.rate; ++r) {
    const std::uint64_t src = traffic_rng_.below(n);
    std::uint64_t dst = traffic_rng_.below(n - 1);
    if (dst >= src) ++dst;
    ids.push_back(inject_packet(AgentId::from_index(src), AgentId::from_index(dst), t));
  }
  return ids;
}

PacketId Simulation::inject_packet(AgentId src, AgentId dst, Step created_at) {
  Packet p;
  p.id = next_packet_id_++;
  p.src = src;
  p.dst = dst;
  p.created_at = created_at;
  p.holder = src;
  p.eligible_at = created_at;
  const Slot s = packets_.allocate(p);
  packets_.push_back(mut_agent(src).queue, s);
  if (params_.ttl) ttl_queue_.emplace_back(s, p.id);
  ++total_created_;
  ++current_.created;
  record(created_at, TraceKind::created, p.id, src, src);
  return p.id;
}

void Simulation::move_agents() { step_mobility(agents_, params_.speed, geom_, mobility_rng_); }

void Simulation::rebuild_index() {
  index_.rebuild(agents_);
  index_.all_contacts(params_.radius, agents_.size(), contacts_);
}

std::vector<AgentId> Simulation::neighbors_of(AgentId id) const {
  return index_.neighbors_within(agents_, agent(id), params_.radius);
}

void Simulation::process_agent(AgentId id, Step t) {
  AgentState& a = mut_agent(id);
  a.remaining_capacity = params_.capacity;
  const std::span<const AgentId> nb = contacts_.of(id);
  const std::size_t pool = scan_pool_size(a.queue.eligible(), params_.discipline, params_.capacity);
  direct_delivery(id, pool, nb, t);
  if (a.remaining_capacity > 0 && !nb.empty()) forward_packets(id, nb, t);
}

double Simulation::min_d2_to(Point target, std::span<const AgentId> neighbors) const {
  double best = std::numeric_limits<double>::infinity();
  for (AgentId k : neighbors) {
    best = std::min(best, toroidal_distance_sq(agents_[k.index()].pos, target, geom_));
  }
  return best;
}

std::optional<NextHop> Simulation::best_next_hop(const Packet& packet, std::span<const AgentId> neighbors) const {
  if (neighbors.empty()) return std::nullopt;
  const Point target = agent(packet.dst).pos;
  AgentId best_id = neighbors.front();
  double best = std::numeric_limits<double>::infinity();
  for (AgentId k : neighbors) {
    const double d2 = toroidal_distance_sq(agents_[k.index()].pos, target, geom_);
    if (d2 < best || (d2 == best && k < best_id)) {
      best = d2;
      best_id = k;
    }
  }
  return NextHop{best_id, std::sqrt(best)};
}

void Simulation::collect_chain(const DstChain& chain, double d2, std::size_t limit, Step t,
                               std::vector<Candidate>& out) const {
  std::size_t taken = 0;
  for (Slot s = chain.head; s != kNoSlot && taken < limit; ++taken) {
    const PacketStore::Node& n = packets_.node(s);
    if (n.packet.eligible_at > t) break;
    out.push_back(Candidate{d2, n.stamp, s});
    s = n.dst_next;
  }
}

void Simulation::deliver(AgentState& holder, Slot s, Step t) {
  Packet& p = packets_.packet(s);
  if (p.dst != holder.id) ++p.hops;
  p.arrived_at = t + 1;
  tally_.add(p);
  if (arrivals_) arrivals_->push_back(p);
  record(t, TraceKind::delivered, p.id, holder.id, p.dst);
  packets_.erase(holder.queue, s);
  packets_.release(s);
  --holder.remaining_capacity;
  ++total_arrived_;
  ++current_.arrived;
}

void Simulation::forward(AgentState& holder, Slot s, AgentId to, Step t) {
  packets_.erase(holder.queue, s);
  Packet& p = packets_.packet(s);
  ++p.hops;
  p.holder = to;
  p.eligible_at = t + 1;
  AgentState& next = mut_agent(to);
  packets_.push_back(next.queue, s);
  ++next.queue.ineligible;
  --holder.remaining_capacity;
  record(t, TraceKind::forwarded, p.id, holder.id, to);
}

std::vector<PacketId> Simulation::direct_delivery(AgentId id, std::size_t pool, std::span<const AgentId> neighbors,
                                                  Step t) {
  AgentState& a = mut_agent(id);
  std::vector<PacketId> delivered;
  if (pool == 0 || a.remaining_capacity == 0) return delivered;

  if (pool >= a.queue.eligible()) {
    // Whole eligible queue: look packets up by destination instead of walking it.
    std::vector<Candidate> hits;
    auto take = [&](AgentId d) {
      auto it = a.queue.by_dst.find(d.value);
      if (it != a.queue.by_dst.end()) collect_chain(it->second, 0.0, a.remaining_capacity, t, hits);
    };
    take(a.id);
    for (AgentId k : neighbors) take(k);
    std::sort(hits.begin(), hits.end(),
              [](const Candidate& x, const Candidate& y) { return x.stamp < y.stamp; });
    for (const Candidate& c : hits) {
      if (a.remaining_capacity == 0) break;
      delivered.push_back(packets_.packet(c.slot).id);
      deliver(a, c.slot, t);
    }
    return delivered;
  }

  Slot s = a.queue.head;
  for (std::size_t i = 0; i < pool && s != kNoSlot && a.remaining_capacity > 0; ++i) {
    const Slot next = packets_.node(s).next;
    const Packet& p = packets_.packet(s);
    if (p.dst == a.id || in_contact_sq(toroidal_distance_sq(a.pos, agent(p.dst).pos, geom_), params_.radius)) {
      delivered.push_back(p.id);
      deliver(a, s, t);
    }
    s = next;
  }
  return delivered;
}

void Simulation::select_sdf(const AgentState& holder, std::span<const AgentId> neighbors, std::size_t count,
                            Step t, std::vector<Candidate>& out) const {
  // Every neighbour is within the contact radius of the holder, so a
  // destination at distance h from the holder has routing distance at least
  // h - radius. Visiting destinations by h lets the scan stop early.
  auto& order = dst_scratch_;
  order.clear();
  for (const auto& [dst, chain] : holder.queue.by_dst) {
    if (packets_.node(chain.head).packet.eligible_at > t) continue;
    order.emplace_back(toroidal_distance_sq(holder.pos, agents_[dst - 1].pos, geom_), &chain, dst);
  }
  std::sort(order.begin(), order.end(),
            [](const auto& x, const auto& y) { return std::get<0>(x) < std::get<0>(y); });

  out.clear();
  double kth = std::numeric_limits<double>::infinity();
  for (const auto& [h2, chain, dst] : order) {
    const double lb = std::sqrt(h2) - params_.radius - 1e-9;
    if (lb > 0.0 && lb * lb > kth) break;
    const std::size_t before = out.size();
    collect_chain(*chain, min_d2_to(agents_[dst - 1].pos, neighbors), count, t, out);
    if (out.size() == before) continue;
    if (out.size() >= count) {
      std::nth_element(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(count - 1), out.end());
      out.resize(count);
      kth = out[count - 1].d2;
      for (const Candidate& c : out) kth = std::max(kth, c.d2);
    }
  }
  std::sort(out.begin(), out.end());
}

std::vector<Simulation::Candidate> Simulation::ordered_candidates(const AgentState& holder,
                                                                  std::span<const AgentId> neighbors,
                                                                  std::size_t limit, Step t) const {
  std::vector<Candidate> out;
  const std::size_t eligible = holder.queue.eligible();
  if (eligible == 0 || limit == 0 || neighbors.empty()) return out;

  if (eligible <= limit || params_.discipline == Discipline::fifo) {
    const std::size_t n = std::min(eligible, limit);
    out.reserve(n);
    Slot s = holder.queue.head;
    for (std::size_t i = 0; i < n; ++i) {
      const PacketStore::Node& node = packets_.node(s);
      out.push_back(Candidate{min_d2_to(agent(node.packet.dst).pos, neighbors), node.stamp, s});
      s = node.next;
    }
    if (params_.discipline == Discipline::sdf) std::sort(out.begin(), out.end());
    return out;
  }
  select_sdf(holder, neighbors, limit, t, out);
  return out;
}

std::vector<std::pair<PacketId, double>> Simulation::forwarding_order(AgentId id, std::span<const AgentId> neighbors,
                                                                      std::size_t limit, Step t) const {
  std::vector<std::pair<PacketId, double>> order;
  for (const Candidate& c : ordered_candidates(agent(id), neighbors, limit, t)) {
    order.emplace_back(packets_.packet(c.slot).id, std::sqrt(c.d2));
  }
  return order;
}

std::vector<PacketId> Simulation::forward_packets(AgentId id, std::span<const AgentId> neighbors, Step t) {
  AgentState& a = mut_agent(id);
  std::vector<PacketId> forwarded;
  if (a.remaining_capacity == 0 || neighbors.empty()) return forwarded;
  const std::vector<Candidate> order = ordered_candidates(a, neighbors, a.remaining_capacity, t);
  for (const Candidate& c : order) {
    const Packet& p = packets_.packet(c.slot);
    const std::optional<NextHop> hop = best_next_hop(p, neighbors);
    if (!hop) continue;
    forwarded.push_back(p.id);
    forward(a, c.slot, hop->id, t);
  }
  return forwarded;
}

void Simulation::expire_packets(Step t) {
  if (!params_.ttl) return;
  const Step ttl = *params_.ttl;
  while (!ttl_queue_.empty()) {
    const auto [slot, id] = ttl_queue_.front();
    const PacketStore::Node& n = packets_.node(slot);
    if (!n.live || n.packet.id != id) {
      ttl_queue_.pop_front();
      continue;
    }
    if (t - n.packet.created_at < ttl) break;
    AgentState& holder = mut_agent(n.packet.holder);
    if (n.packet.eligible_at > t) --holder.queue.ineligible;
    record(t, TraceKind::dropped, id, holder.id, holder.id);
    packets_.erase(holder.queue, slot);
    packets_.release(slot);
    ++total_dropped_;
    ++current_.dropped;
    ttl_queue_.pop_front();
  }
}

void Simulation::place_agent(AgentId id, Point p) { mut_agent(id).pos = geom_.wrap(p); }

void Simulation::set_heading(AgentId id, double heading) { mut_agent(id).heading = heading; }

std::vector<Packet> Simulation::queue_contents(AgentId id) const {
  std::vector<Packet> out;
  for (Slot s = agent(id).queue.head; s != kNoSlot; s = packets_.node(s).next) out.push_back(packets_.packet(s));
  return out;
}

std::optional<Packet> Simulation::find_packet(PacketId id) const {
  for (const AgentState& a : agents_) {
    for (Slot s = a.queue.head; s != kNoSlot; s = packets_.node(s).next) {
      if (packets_.packet(s).id == id) return packets_.packet(s);
    }
  }
  return std::nullopt;
}

}  // namespace mobiq
