#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mobiq {

using Step = std::int64_t;

enum class Discipline { fifo, sdf };

std::string_view to_string(Discipline d);
/// Accepts "fifo" / "sdf" in any case. Throws ConfigError otherwise.
Discipline parse_discipline(std::string_view text);

/// Invalid configuration. Carries the offending field name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Full parameter vector of one simulation run. Defaults are the reference
/// configuration (800 agents in a 10 x 10 square, unit radius and capacity,
/// 5000 steps).
struct SimParams {
  std::uint32_t agent_count = 800;
  double side_length = 10.0;
  double speed = 1.0;
  double radius = 1.0;
  std::uint32_t capacity = 1;
  std::uint32_t rate = 10;
  Step steps = 5000;
  double time_step = 1.0;
  std::uint64_t seed = 1;
  Discipline discipline = Discipline::sdf;
  std::optional<Step> ttl;

  bool operator==(const SimParams&) const = default;
};

/// Structural validation shared by every entry point. Zero speed, zero rate
/// and zero steps are legal degenerate runs here; the CLI applies the stricter
/// positivity rules for user input.
void validate(const SimParams& p);

}  // namespace mobiq
