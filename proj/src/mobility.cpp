#include "mobiq/mobility.hpp"

#include <cmath>
#include <numbers>

namespace mobiq {

double draw_heading(RngStream& rng) { return rng.uniform(-std::numbers::pi, std::numbers::pi); }

std::vector<AgentState> init_positions(const SimParams& params, RngStream& init_rng) {
  const WorldGeometry geom(params.side_length);
  std::vector<AgentState> agents(params.agent_count);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    AgentState& a = agents[i];
    a.id = AgentId::from_index(i);
    a.pos.x = geom.wrap(init_rng.uniform01() * params.side_length);
    a.pos.y = geom.wrap(init_rng.uniform01() * params.side_length);
    a.heading = draw_heading(init_rng);
    a.remaining_capacity = params.capacity;
  }
  return agents;
}

void step_mobility(std::span<AgentState> agents, double speed, const WorldGeometry& geom,
                   RngStream& mobility_rng) {
  for (AgentState& a : agents) {
    a.pos.x = geom.wrap(a.pos.x + speed * std::cos(a.heading));
    a.pos.y = geom.wrap(a.pos.y + speed * std::sin(a.heading));
    a.heading = draw_heading(mobility_rng);
  }
}

}  // namespace mobiq
