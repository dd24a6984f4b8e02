#include "mobiq/spatial_index.hpp"

#include <stdexcept>

namespace mobiq {

GridIndex::GridIndex(const WorldGeometry& geom, double min_cell_size) : geom_(geom) {
  if (!(min_cell_size > 0.0)) throw std::invalid_argument("cell size must be positive");
  const double side = geom.side_length();
  dim_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(side / min_cell_size)));
  cell_size_ = side / static_cast<double>(dim_);
  // Floor division can leave cell_size a hair below the requested minimum.
  while (dim_ > 1 && cell_size_ < min_cell_size) {
    --dim_;
    cell_size_ = side / static_cast<double>(dim_);
  }
  offsets_.assign(dim_ * dim_ + 1, 0);
}

void GridIndex::rebuild(std::span<const AgentState> agents) {
  const std::size_t cells = dim_ * dim_;
  offsets_.assign(cells + 1, 0);
  cell_of_.resize(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::size_t cell = cell_coord(agents[i].pos.y) * dim_ + cell_coord(agents[i].pos.x);
    cell_of_[i] = cell;
    ++offsets_[cell + 1];
  }
  for (std::size_t c = 0; c < cells; ++c) offsets_[c + 1] += offsets_[c];
  ids_.resize(agents.size());
  points_.resize(agents.size());
  fill_.assign(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::size_t k = fill_[cell_of_[i]]++;
    ids_[k] = agents[i].id;
    points_[k] = agents[i].pos;
  }
}

void GridIndex::neighbors_within(std::span<const AgentState>, const AgentState& agent, double radius,
                                 std::vector<AgentId>& out) const {
  out.clear();
  const Point p = agent.pos;
  for_each_candidate(p, radius, [&](AgentId id, Point q) {
    if (id != agent.id && in_contact_sq(toroidal_distance_sq(p, q, geom_), radius)) out.push_back(id);
  });
  std::sort(out.begin(), out.end());
}

void GridIndex::all_contacts(double radius, std::size_t agent_count, ContactLists& out) const {
  if (radius > cell_size_) throw std::invalid_argument("contact radius exceeds cell size");
  auto& pairs = out.pairs_;
  pairs.clear();
  auto test = [&](std::size_t a, std::size_t b) {
    if (in_contact_sq(toroidal_distance_sq(points_[a], points_[b], geom_), radius)) {
      pairs.emplace_back(ids_[a].value - 1, ids_[b].value - 1);
    }
  };
  if (dim_ >= 3) {
    // Half stencil: own cell plus E, NE, N, NW. With at least three cells per
    // axis the eight surrounding cells are distinct, so each pair is seen once.
    static constexpr int kForward[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
    for (std::size_t cy = 0; cy < dim_; ++cy) {
      for (std::size_t cx = 0; cx < dim_; ++cx) {
        const std::size_t cell = cy * dim_ + cx;
        const std::size_t b0 = offsets_[cell], b1 = offsets_[cell + 1];
        for (std::size_t a = b0; a < b1; ++a) {
          for (std::size_t b = a + 1; b < b1; ++b) test(a, b);
        }
        for (const auto& d : kForward) {
          const std::size_t nx = (cx + dim_ + d[0]) % dim_;
          const std::size_t ny = (cy + dim_ + d[1]) % dim_;
          const std::size_t other = ny * dim_ + nx;
          const std::size_t o0 = offsets_[other], o1 = offsets_[other + 1];
          for (std::size_t a = b0; a < b1; ++a) {
            for (std::size_t b = o0; b < o1; ++b) test(a, b);
          }
        }
      }
    }
  } else {
    // Tiny grids: every pair, once.
    for (std::size_t a = 0; a < ids_.size(); ++a) {
      for (std::size_t b = a + 1; b < ids_.size(); ++b) test(a, b);
    }
  }

  out.offsets_.assign(agent_count + 1, 0);
  for (const auto& [i, j] : pairs) {
    ++out.offsets_[i + 1];
    ++out.offsets_[j + 1];
  }
  for (std::size_t k = 0; k < agent_count; ++k) out.offsets_[k + 1] += out.offsets_[k];
  out.ids_.resize(2 * pairs.size());
  auto& fill = out.fill_;
  fill.assign(out.offsets_.begin(), out.offsets_.end() - 1);
  for (const auto& [i, j] : pairs) {
    out.ids_[fill[i]++] = AgentId::from_index(j);
    out.ids_[fill[j]++] = AgentId::from_index(i);
  }
}

}  // namespace mobiq
