#pragma once

#include <span>
#include <vector>

#include "mobiq/model.hpp"
#include "mobiq/rng.hpp"

namespace mobiq {

/// Uniform positions on [0, L)^2 and uniform headings on [-pi, pi], drawn per
/// agent in id order (x, y, heading).
std::vector<AgentState> init_positions(const SimParams& params, RngStream& init_rng);

/// Random-direction move: every agent advances by `speed` along its current
/// heading, wraps, then draws a fresh heading. Ascending id order, one draw per
/// agent.
void step_mobility(std::span<AgentState> agents, double speed, const WorldGeometry& geom,
                   RngStream& mobility_rng);

double draw_heading(RngStream& rng);

}  // namespace mobiq
