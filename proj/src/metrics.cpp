#include "mobiq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mobiq {

DelayComponents delay_components(const Packet& p) {
  if (!p.arrived_at) throw std::invalid_argument("packet has not arrived");
  DelayComponents d;
  d.end_to_end = *p.arrived_at - p.created_at;
  d.queue_delay = d.end_to_end - static_cast<Step>(p.hops);
  return d;
}

void DelayTally::add(const Packet& p) {
  const DelayComponents d = delay_components(p);
  ++count;
  end_to_end_sum += d.end_to_end;
  queue_ratio_sum += static_cast<double>(d.queue_delay) / static_cast<double>(d.end_to_end);
}

std::optional<double> DelayTally::mean_delay() const {
  if (count == 0) return std::nullopt;
  return static_cast<double>(end_to_end_sum) / static_cast<double>(count);
}

std::optional<double> DelayTally::queue_delay_rate() const {
  if (count == 0) return std::nullopt;
  return queue_ratio_sum / static_cast<double>(count);
}

std::optional<double> mean_delay(std::span<const Packet> arrived) {
  DelayTally tally;
  for (const Packet& p : arrived) tally.add(p);
  return tally.mean_delay();
}

std::optional<double> queue_delay_rate(std::span<const Packet> arrived) {
  DelayTally tally;
  for (const Packet& p : arrived) tally.add(p);
  return tally.queue_delay_rate();
}

std::optional<double> arrival_rate(std::uint64_t n_arrive, std::uint64_t n_create) {
  if (n_create == 0) return std::nullopt;
  return static_cast<double>(n_arrive) / static_cast<double>(n_create);
}

EtaEstimate order_parameter(std::span<const std::uint64_t> np_series, std::uint32_t rate,
                            std::uint32_t capacity, double window_fraction) {
  if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
    throw std::invalid_argument("window fraction must lie in (0, 1]");
  }
  const std::size_t steps = np_series.size();
  if (rate == 0 || steps < 2) return {};
  auto window = static_cast<std::size_t>(std::ceil(window_fraction * static_cast<double>(steps) - 1e-9));
  window = std::clamp<std::size_t>(window, 1, steps - 1);
  // The mean of consecutive differences telescopes.
  const double rise = static_cast<double>(np_series[steps - 1]) -
                      static_cast<double>(np_series[steps - 1 - window]);
  const double slope = rise / static_cast<double>(window);
  const double eta = static_cast<double>(capacity) / static_cast<double>(rate) * slope;
  return {std::max(0.0, eta), true};
}

RcEstimate estimate_rc(std::span<const RcPoint> sweep, double epsilon) {
  RcEstimate est;
  if (sweep.empty()) return est;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    if (!(sweep[i].rate > sweep[i - 1].rate)) throw std::invalid_argument("rate grid must be strictly increasing");
  }
  est.max_grid = sweep.back().rate;
  // Walk down from the top while the tail stays above threshold.
  std::size_t first = sweep.size();
  while (first > 0 && sweep[first - 1].eta_mean > epsilon) --first;
  if (first == sweep.size()) return est;
  est.rc = sweep[first].rate;
  est.resolution = first == 0 ? sweep[first].rate : sweep[first].rate - sweep[first - 1].rate;
  return est;
}

}  // namespace mobiq
