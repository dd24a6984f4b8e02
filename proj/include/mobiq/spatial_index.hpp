#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "mobiq/model.hpp"

namespace mobiq {

/// Per-agent neighbour lists in CSR layout, indexed by agent index.
class ContactLists {
 public:
  std::span<const AgentId> of(AgentId id) const {
    return {ids_.data() + offsets_[id.index()], ids_.data() + offsets_[id.index() + 1]};
  }

 private:
  friend class GridIndex;
  std::vector<std::size_t> offsets_;
  std::vector<AgentId> ids_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs_;
  std::vector<std::size_t> fill_;
};

/// Uniform bucket grid over the periodic square. Cells are at least
/// `min_cell_size` wide, so every agent within that distance of a point lies
/// in the 3x3 block of cells around it. Buckets are stored CSR-style and keep
/// agents in ascending id order.
class GridIndex {
 public:
  GridIndex(const WorldGeometry& geom, double min_cell_size);

  void rebuild(std::span<const AgentState> agents);

  double cell_size() const { return cell_size_; }
  std::size_t cells_per_axis() const { return dim_; }
  std::size_t indexed_count() const { return ids_.size(); }

  std::size_t cell_coord(double c) const {
    auto i = static_cast<std::size_t>(c / cell_size_);
    return i < dim_ ? i : dim_ - 1;
  }

  std::span<const AgentId> bucket(std::size_t cx, std::size_t cy) const {
    const std::size_t cell = cy * dim_ + cx;
    return {ids_.data() + offsets_[cell], ids_.data() + offsets_[cell + 1]};
  }

  /// Visits every indexed agent in cells that could hold a point within
  /// `reach` of `p` (a superset of the disc; callers filter by distance).
  /// Each agent is visited at most once, as fn(id, position).
  template <class Fn>
  void for_each_candidate(Point p, double reach, Fn&& fn) const {
    const auto span = static_cast<std::size_t>(std::ceil(reach / cell_size_));
    const std::size_t cx = cell_coord(p.x);
    const std::size_t cy = cell_coord(p.y);
    const bool all_x = 2 * span + 1 >= dim_;
    const bool all_y = all_x;
    const std::size_t nx = all_x ? dim_ : 2 * span + 1;
    const std::size_t ny = all_y ? dim_ : 2 * span + 1;
    const std::size_t x0 = all_x ? 0 : cx + dim_ - span;
    const std::size_t y0 = all_y ? 0 : cy + dim_ - span;
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t gy = (y0 + j) % dim_;
      for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t gx = (x0 + i) % dim_;
        const std::size_t cell = gy * dim_ + gx;
        for (std::size_t k = offsets_[cell]; k < offsets_[cell + 1]; ++k) fn(ids_[k], points_[k]);
      }
    }
  }

  /// Agents j != `agent` strictly closer than `radius`, ascending by id.
  /// `out` is cleared first.
  void neighbors_within(std::span<const AgentState> agents, const AgentState& agent, double radius,
                        std::vector<AgentId>& out) const;

  std::vector<AgentId> neighbors_within(std::span<const AgentState> agents, const AgentState& agent,
                                        double radius) const {
    std::vector<AgentId> out;
    neighbors_within(agents, agent, radius, out);
    return out;
  }

  /// Contact lists of every indexed agent at once (same predicate as
  /// neighbors_within, each pair tested once). Lists are unordered.
  /// `radius` must not exceed cell_size().
  void all_contacts(double radius, std::size_t agent_count, ContactLists& out) const;

 private:
  WorldGeometry geom_;
  std::size_t dim_;
  double cell_size_;
  std::vector<std::size_t> offsets_;
  std::vector<AgentId> ids_;
  std::vector<Point> points_;
  std::vector<std::size_t> cell_of_;
  std::vector<std::size_t> fill_;
};

}  // namespace mobiq
