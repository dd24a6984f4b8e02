#include "mobiq/params.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace mobiq {

std::string_view to_string(Discipline d) {
  switch (d) {
    case Discipline::fifo: return "fifo";
    case Discipline::sdf: return "sdf";
  }
  return "?";
}

Discipline parse_discipline(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "fifo") return Discipline::fifo;
  if (lower == "sdf") return Discipline::sdf;
  throw ConfigError("discipline", "expected 'fifo' or 'sdf', got '" + std::string(text) + "'");
}

void validate(const SimParams& p) {
  if (p.agent_count < 1) throw ConfigError("agents", "must be at least 1");
  if (!(p.side_length > 0.0) || !std::isfinite(p.side_length)) {
    throw ConfigError("size", "must be positive and finite");
  }
  if (!(p.speed >= 0.0) || !std::isfinite(p.speed)) {
    throw ConfigError("speed", "must be non-negative and finite");
  }
  if (!(p.radius > 0.0)) throw ConfigError("radius", "must be positive");
  if (!(p.radius < p.side_length / 2.0)) {
    throw ConfigError("radius", "must be below half the side length");
  }
  if (p.capacity < 1) throw ConfigError("capacity", "must be at least 1");
  if (p.steps < 0) throw ConfigError("steps", "must be non-negative");
  if (p.time_step != 1.0) throw ConfigError("time_step", "only a unit step is supported");
  if (p.ttl && *p.ttl < 1) throw ConfigError("ttl", "must be positive when given");
  if (p.rate > 0 && p.agent_count < 2) {
    throw ConfigError("agents", "traffic needs at least two agents (source differs from destination)");
  }
}

}  // namespace mobiq
