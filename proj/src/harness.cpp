#include "mobiq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "mobiq/rng.hpp"

namespace mobiq {

RunSummary run_once(const SimParams& params, const RunOptions& options) {
  validate(params);
  if (!(options.eta_window > 0.0 && options.eta_window <= 1.0)) {
    throw ConfigError("window", "must lie in (0, 1]");
  }
  Simulation sim(params);
  sim.set_trace(options.trace);
  sim.set_arrival_log(options.arrivals);

  RunSummary out;
  out.params = params;
  out.np_series.reserve(static_cast<std::size_t>(params.steps));
  if (options.timeseries) options.timeseries->reserve(static_cast<std::size_t>(params.steps));
  for (Step i = 0; i < params.steps; ++i) {
    const StepStats s = sim.step();
    out.np_series.push_back(s.n_packets_after);
    if (options.timeseries) options.timeseries->push_back(s);
  }

  const EtaEstimate eta = order_parameter(out.np_series, params.rate, params.capacity, options.eta_window);
  out.eta = eta.eta;
  out.eta_defined = eta.defined;
  out.mean_delay = sim.delay_tally().mean_delay();
  out.queue_delay_rate = sim.delay_tally().queue_delay_rate();
  out.n_create = sim.total_created();
  out.n_arrive = sim.total_arrived();
  out.n_drop = sim.total_dropped();
  out.arrival_rate = arrival_rate(out.n_arrive, out.n_create);
  return out;
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::rate: return "R";
    case SweepAxis::speed: return "v";
    case SweepAxis::radius: return "alpha";
  }
  return "?";
}

SweepAxis parse_axis(std::string_view text) {
  if (text == "R" || text == "rate") return SweepAxis::rate;
  if (text == "v" || text == "speed") return SweepAxis::speed;
  if (text == "alpha" || text == "radius") return SweepAxis::radius;
  throw ConfigError("axis", "expected R, v or alpha, got '" + std::string(text) + "'");
}

namespace {

constexpr std::size_t kIndexLimit = std::size_t{1} << 24;

void check_rate_value(double value, const std::string& field) {
  if (!(value >= 1.0 && value <= 4294967295.0) || std::floor(value) != value) {
    std::ostringstream msg;
    msg << "rate values must be positive integers, got " << value;
    throw ConfigError(field, msg.str());
  }
}

std::string describe(Discipline d, SweepAxis axis, double value, std::uint32_t r) {
  std::ostringstream s;
  s << to_string(d) << ' ' << to_string(axis) << '=' << value << " realization " << r;
  return s.str();
}

/// Runs all realizations of the given (discipline, value, seed index) points.
std::vector<SweepPoint> evaluate(const SweepSpec& spec, const std::vector<std::pair<Discipline, double>>& points,
                                 const std::vector<std::size_t>& seed_index, const ExecOptions& exec) {
  struct Task {
    std::size_t point;
    std::uint32_t realization;
  };
  std::vector<Task> tasks;
  tasks.reserve(points.size() * spec.realizations);
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::uint32_t r = 0; r < spec.realizations; ++r) tasks.push_back({p, r});
  }
  std::vector<std::optional<RunSummary>> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex report_mutex;
  std::size_t done = 0;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size() || failed.load()) return;
      const Task& task = tasks[i];
      const auto [d, value] = points[task.point];
      const auto start = std::chrono::steady_clock::now();
      try {
        SimParams params = point_params(spec, d, value);
        params.seed = derive_seed(spec.seed_base, d, seed_index[task.point], task.realization);
        results[i] = run_once(params, RunOptions{spec.eta_window});
      } catch (...) {
        errors[i] = std::current_exception();
        failed.store(true);
        continue;
      }
      if (exec.progress) {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::lock_guard lock(report_mutex);
        exec.progress(RunEvent{++done, tasks.size(), d, value, task.realization, &*results[i], secs});
      }
    }
  };

  unsigned threads = exec.threads ? exec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!errors[i]) continue;
    const auto [d, value] = points[tasks[i].point];
    const std::string where = describe(d, spec.axis, value, tasks[i].realization);
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw SweepError("run failed at " + where + ": " + e.what());
    }
  }

  std::vector<SweepPoint> out;
  out.reserve(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    std::vector<double> eta, delay, q, a;
    for (std::uint32_t r = 0; r < spec.realizations; ++r) {
      const RunSummary& s = *results[p * spec.realizations + r];
      if (s.eta_defined) eta.push_back(s.eta);
      if (s.mean_delay) delay.push_back(*s.mean_delay);
      if (s.queue_delay_rate) q.push_back(*s.queue_delay_rate);
      if (s.arrival_rate) a.push_back(*s.arrival_rate);
    }
    out.push_back(SweepPoint{points[p].first, points[p].second, spec.realizations, summarize(eta), summarize(delay),
                             summarize(q), summarize(a)});
  }
  return out;
}

void validate_common(const SweepSpec& spec) {
  if (spec.realizations < 1) throw ConfigError("realizations", "must be at least 1");
  if (spec.realizations >= kIndexLimit) throw ConfigError("realizations", "too many realizations");
  if (spec.disciplines.empty()) throw ConfigError("disciplines", "must name at least one discipline");
  for (std::size_t i = 0; i < spec.disciplines.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (spec.disciplines[i] == spec.disciplines[j]) throw ConfigError("disciplines", "duplicate discipline");
    }
  }
  if (!(spec.eta_window > 0.0 && spec.eta_window <= 1.0)) throw ConfigError("window", "must lie in (0, 1]");
  if (!(spec.epsilon >= 0.0) || !std::isfinite(spec.epsilon)) {
    throw ConfigError("epsilon", "must be non-negative and finite");
  }
  if (spec.step_cap && spec.step_cap->steps < 0) throw ConfigError("cap_steps", "must be non-negative");
  validate(spec.base);
}

}  // namespace

void validate(const SweepSpec& spec) {
  validate_common(spec);
  if (spec.grid.empty()) throw ConfigError("grid", "must not be empty");
  if (spec.grid.size() >= kIndexLimit) throw ConfigError("grid", "too many grid points");
  for (std::size_t i = 1; i < spec.grid.size(); ++i) {
    if (!(spec.grid[i] > spec.grid[i - 1])) throw ConfigError("grid", "must be strictly ascending");
  }
  for (double value : spec.grid) {
    if (!std::isfinite(value)) throw ConfigError("grid", "values must be finite");
    if (spec.axis == SweepAxis::rate) check_rate_value(value, "grid");
    for (Discipline d : spec.disciplines) validate(point_params(spec, d, value));
  }
}

SimParams point_params(const SweepSpec& spec, Discipline d, double value) {
  SimParams p = spec.base;
  p.discipline = d;
  switch (spec.axis) {
    case SweepAxis::rate: p.rate = static_cast<std::uint32_t>(value); break;
    case SweepAxis::speed: p.speed = value; break;
    case SweepAxis::radius: p.radius = value; break;
  }
  if (spec.step_cap && p.rate > spec.step_cap->rate_above) p.steps = std::min(p.steps, spec.step_cap->steps);
  return p;
}

std::uint64_t derive_seed(std::uint64_t seed_base, Discipline d, std::size_t grid_index, std::uint32_t realization) {
  const std::uint64_t key = (static_cast<std::uint64_t>(d) << 48) |
                            (static_cast<std::uint64_t>(grid_index & (kIndexLimit - 1)) << 24) |
                            (realization & (kIndexLimit - 1));
  return seed_base ^ splitmix64(key);
}

Stat summarize(const std::vector<double>& values) {
  Stat s;
  s.count = static_cast<std::uint32_t>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (double x : values) sum += x;
  const double mean = sum / static_cast<double>(values.size());
  s.mean = mean;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double x : values) ss += (x - mean) * (x - mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

SweepResult run_sweep(const SweepSpec& spec, const ExecOptions& exec) {
  validate(spec);
  std::vector<std::pair<Discipline, double>> points;
  std::vector<std::size_t> seed_index;
  for (Discipline d : spec.disciplines) {
    for (std::size_t g = 0; g < spec.grid.size(); ++g) {
      points.emplace_back(d, spec.grid[g]);
      seed_index.push_back(g);
    }
  }
  SweepResult result;
  result.axis = spec.axis;
  result.points = evaluate(spec, points, seed_index, exec);
  if (spec.axis == SweepAxis::rate) {
    for (Discipline d : spec.disciplines) {
      const std::vector<RcPoint> curve = rc_points(result, d);
      result.rc.push_back(RcRecord{d, estimate_rc(curve, spec.epsilon)});
    }
  }
  return result;
}

std::vector<RcPoint> rc_points(const SweepResult& result, Discipline d) {
  std::vector<RcPoint> out;
  for (const SweepPoint& p : result.points) {
    if (p.discipline == d) out.push_back(RcPoint{p.value, p.eta.mean.value_or(0.0)});
  }
  return out;
}

void validate(const RcSearch& search) {
  if (!(search.r_min >= 1.0)) throw ConfigError("rc_min", "must be at least 1");
  if (!(search.r_max >= search.r_min) || !std::isfinite(search.r_max)) {
    throw ConfigError("rc_max", "must be finite and not below rc_min");
  }
  if (!(search.factor > 1.0) || !std::isfinite(search.factor)) throw ConfigError("rc_factor", "must exceed 1");
  if (search.confirm < 1) throw ConfigError("rc_confirm", "must be at least 1");
}

std::vector<double> geometric_grid(const RcSearch& search) {
  std::vector<double> out;
  for (double v = search.r_min; v <= search.r_max * (1.0 + 1e-12); v *= search.factor) {
    const double r = std::round(v);
    if (out.empty() || r > out.back()) out.push_back(r);
  }
  return out;
}

std::vector<double> refine_grid(double lo, double hi, std::uint32_t n) {
  std::vector<double> out;
  for (std::uint32_t i = 1; i <= n; ++i) {
    const double r = std::round(lo + (hi - lo) * i / (n + 1.0));
    if (r > lo && r < hi && (out.empty() || r > out.back())) out.push_back(r);
  }
  return out;
}

namespace {

std::vector<RcPoint> as_rc_points(const std::vector<SweepPoint>& points) {
  std::vector<RcPoint> out;
  for (const SweepPoint& p : points) out.push_back(RcPoint{p.value, p.eta.mean.value_or(0.0)});
  return out;
}

}  // namespace

std::vector<RcSearchResult> search_rc(const SweepSpec& spec, const RcSearch& search, const ExecOptions& exec) {
  if (spec.axis != SweepAxis::rate) throw ConfigError("axis", "critical-rate search runs along R");
  validate_common(spec);
  validate(search);
  const std::vector<double> coarse = geometric_grid(search);
  for (Discipline d : spec.disciplines) validate(point_params(spec, d, coarse.front()));

  // Seeds are keyed by the (integer) rate itself, so every sampled point of
  // one search gets its own stream regardless of sampling order.
  auto run_at = [&](Discipline d, const std::vector<double>& rates) {
    std::vector<std::pair<Discipline, double>> pts;
    std::vector<std::size_t> idx;
    for (double r : rates) {
      pts.emplace_back(d, r);
      idx.push_back(static_cast<std::size_t>(r));
    }
    return evaluate(spec, pts, idx, exec);
  };

  std::vector<RcSearchResult> out;
  for (Discipline d : spec.disciplines) {
    RcSearchResult res;
    res.discipline = d;
    std::uint32_t streak = 0;
    for (double r : coarse) {
      res.points.push_back(run_at(d, {r}).front());
      streak = res.points.back().eta.mean.value_or(0.0) > spec.epsilon ? streak + 1 : 0;
      if (streak >= search.confirm) break;
    }
    RcEstimate est = estimate_rc(as_rc_points(res.points), spec.epsilon);
    if (est.rc) {
      const double hi = *est.rc;
      const double lo = hi - est.resolution;
      for (const SweepPoint& p : run_at(d, refine_grid(lo, hi, search.refine_points))) res.points.push_back(p);
      std::sort(res.points.begin(), res.points.end(),
                [](const SweepPoint& x, const SweepPoint& y) { return x.value < y.value; });
      est = estimate_rc(as_rc_points(res.points), spec.epsilon);
    }
    res.estimate = est;
    out.push_back(std::move(res));
  }
  return out;
}

RcCurve rc_curve(const SweepSpec& spec, SweepAxis axis, const std::vector<double>& values, const RcSearch& search,
                 const ExecOptions& exec) {
  if (axis == SweepAxis::rate) throw ConfigError("axis", "curve axis must be v or alpha");
  if (values.empty()) throw ConfigError("grid", "must not be empty");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) throw ConfigError("grid", "must be strictly ascending");
  }
  RcCurve curve;
  curve.axis = axis;
  for (double value : values) {
    SweepSpec at = spec;
    if (axis == SweepAxis::speed) at.base.speed = value;
    else at.base.radius = value;
    for (RcSearchResult& r : search_rc(at, search, exec)) {
      curve.points.push_back(RcCurvePoint{r.discipline, value, r.estimate});
      curve.samples.push_back(std::move(r.points));
    }
  }
  return curve;
}

namespace {

const std::vector<double> kRateGrid{1,   2,   5,   10,  15,  20,  25,  30,  40,  50,  60,  80,
                                    100, 150, 200, 300, 400, 500, 600, 700, 800, 900, 1000};

SweepSpec reference_sweep() {
  SweepSpec s;
  s.axis = SweepAxis::rate;
  s.grid = kRateGrid;
  s.realizations = 20;
  s.step_cap = StepCap{};
  return s;
}

Preset two_speed_preset(std::string name) {
  Preset p;
  p.name = std::move(name);
  p.kind = Preset::Kind::sweep;
  for (double v : {0.1, 1.0}) {
    SweepSpec s = reference_sweep();
    s.base.speed = v;
    p.parts.push_back(s);
    p.labels.push_back(v == 1.0 ? "v1" : "v0.1");
  }
  return p;
}

Preset curve_preset(std::string name, SweepAxis axis, std::vector<double> values, double speed) {
  Preset p;
  p.name = std::move(name);
  p.kind = Preset::Kind::rc_curve;
  SweepSpec s = reference_sweep();
  s.grid.clear();
  s.base.speed = speed;
  p.parts.push_back(s);
  p.labels.push_back(p.name);
  p.curve_axis = axis;
  p.curve_values = std::move(values);
  return p;
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig1", "fig2a", "fig2b", "fig3", "fig4"}; }

Preset make_preset(std::string_view name) {
  if (name == "fig1" || name == "fig3" || name == "fig4") return two_speed_preset(std::string(name));
  if (name == "fig2a") {
    return curve_preset("fig2a", SweepAxis::speed, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}, 1.0);
  }
  if (name == "fig2b") return curve_preset("fig2b", SweepAxis::radius, {0.6, 0.8, 1.0, 1.2, 1.4, 1.5}, 0.3);
  throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
}

}  // namespace mobiq
