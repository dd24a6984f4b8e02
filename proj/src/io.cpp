#include "mobiq/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mobiq {

using nlohmann::json;

std::string format_number(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("cannot format a non-finite number");
  if (x == 0.0) return "0";
  // Exponent after rounding to six significant digits.
  char sci[32];
  auto res = std::to_chars(sci, sci + sizeof sci, x, std::chars_format::scientific, 5);
  const std::string_view s(sci, static_cast<std::size_t>(res.ptr - sci));
  const int exponent = std::stoi(std::string(s.substr(s.find('e') + 1)));
  const int precision = std::max(0, 5 - exponent);
  char buf[64];
  res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, precision);
  std::string out(buf, res.ptr);
  if (out.find_first_not_of("-0.") == std::string::npos) return "0";
  return out;
}

double parse_number(std::string_view text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != end) {
    throw FormatError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

double quantize(double x) { return parse_number(format_number(x)); }

namespace {

std::string trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return std::string(line);
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

/// Non-empty lines; the first must equal `header`.
std::vector<std::vector<std::string>> csv_body(std::string_view text, std::string_view header) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    line = trim_cr(line);
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header) throw FormatError("unexpected header: " + line);
      seen_header = true;
      continue;
    }
    rows.push_back(split(line, ','));
  }
  if (!seen_header) throw FormatError("missing header");
  return rows;
}

template <class T>
T parse_int(const std::string& s) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw FormatError("not an integer: '" + s + "'");
  }
  return v;
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_number(s);
}

std::optional<double> quantize_opt(const std::optional<double>& v) {
  if (!v) return v;
  return quantize(*v);
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed document: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("malformed document: ") + e.what());
  }
}

json params_json(const SimParams& p, double window) {
  return json{{"agents", p.agent_count},
              {"size", p.side_length},
              {"radius", p.radius},
              {"capacity", p.capacity},
              {"speed", p.speed},
              {"rate", p.rate},
              {"steps", p.steps},
              {"discipline", std::string(to_string(p.discipline))},
              {"seed", p.seed},
              {"ttl", p.ttl ? json(*p.ttl) : json(nullptr)},
              {"window", window}};
}

SimParams params_from(const json& j, double& window) {
  SimParams p;
  p.agent_count = j.at("agents").get<std::uint32_t>();
  p.side_length = j.at("size").get<double>();
  p.radius = j.at("radius").get<double>();
  p.capacity = j.at("capacity").get<std::uint32_t>();
  p.speed = j.at("speed").get<double>();
  p.rate = j.at("rate").get<std::uint32_t>();
  p.steps = j.at("steps").get<Step>();
  p.discipline = parse_discipline(j.at("discipline").get<std::string>());
  p.seed = j.at("seed").get<std::uint64_t>();
  if (!j.at("ttl").is_null()) p.ttl = j.at("ttl").get<Step>();
  window = j.at("window").get<double>();
  return p;
}

json stat_json(const Stat& s) { return json{{"mean", opt_json(s.mean)}, {"std", opt_json(s.std)}, {"count", s.count}}; }

Stat stat_from(const json& j) {
  return Stat{opt_from(j, "mean"), opt_from(j, "std"), j.at("count").get<std::uint32_t>()};
}

json estimate_json(Discipline d, const RcEstimate& e) {
  return json{{"discipline", std::string(to_string(d))},
              {"rc", opt_json(e.rc)},
              {"resolution", e.resolution},
              {"max_grid", e.max_grid},
              {"above_grid", e.above_grid()}};
}

}  // namespace

SummaryRecord make_summary(const RunSummary& run, double window) {
  SummaryRecord s;
  s.params = run.params;
  s.window = window;
  if (run.eta_defined) s.eta = run.eta;
  s.mean_delay = run.mean_delay;
  s.queue_delay_rate = run.queue_delay_rate;
  s.arrival_rate = run.arrival_rate;
  s.n_create = run.n_create;
  s.n_arrive = run.n_arrive;
  s.n_drop = run.n_drop;
  return s;
}

std::string write_summary_json(const SummaryRecord& s) {
  const json j{{"params", params_json(s.params, s.window)},
               {"eta", opt_json(s.eta)},
               {"mean_delay", opt_json(s.mean_delay)},
               {"queue_delay_rate", opt_json(s.queue_delay_rate)},
               {"arrival_rate", opt_json(s.arrival_rate)},
               {"n_create", s.n_create},
               {"n_arrive", s.n_arrive},
               {"n_drop", s.n_drop}};
  return j.dump(2) + "\n";
}

SummaryRecord read_summary_json(std::string_view text) {
  const json j = parse_json(text);
  return guarded([&] {
    SummaryRecord s;
    s.params = params_from(j.at("params"), s.window);
    s.eta = opt_from(j, "eta");
    s.mean_delay = opt_from(j, "mean_delay");
    s.queue_delay_rate = opt_from(j, "queue_delay_rate");
    s.arrival_rate = opt_from(j, "arrival_rate");
    s.n_create = j.at("n_create").get<std::uint64_t>();
    s.n_arrive = j.at("n_arrive").get<std::uint64_t>();
    s.n_drop = j.at("n_drop").get<std::uint64_t>();
    return s;
  });
}

namespace {
constexpr std::string_view kTimeseriesHeader = "t,n_packets,created,arrived,dropped";
constexpr std::string_view kSweepHeader =
    "discipline,axis,value,realizations,eta_mean,eta_std,delay_mean,delay_std,q_mean,q_std,a_mean,a_std";
constexpr std::string_view kRcHeader = "discipline,axis,value,rc,resolution,max_grid";
}  // namespace

std::string write_timeseries_csv(const std::vector<StepStats>& rows) {
  std::string out(kTimeseriesHeader);
  out += '\n';
  for (const StepStats& s : rows) {
    out += std::to_string(s.t) + ',' + std::to_string(s.n_packets_after) + ',' + std::to_string(s.created) + ',' +
           std::to_string(s.arrived) + ',' + std::to_string(s.dropped) + '\n';
  }
  return out;
}

std::vector<StepStats> read_timeseries_csv(std::string_view text) {
  std::vector<StepStats> out;
  for (const auto& f : csv_body(text, kTimeseriesHeader)) {
    if (f.size() != 5) throw FormatError("timeseries row needs 5 fields");
    out.push_back(StepStats{parse_int<Step>(f[0]), parse_int<std::uint64_t>(f[2]), parse_int<std::uint64_t>(f[3]),
                            parse_int<std::uint64_t>(f[4]), parse_int<std::uint64_t>(f[1])});
  }
  return out;
}

std::string write_timeseries_json(const std::vector<StepStats>& rows) {
  json arr = json::array();
  for (const StepStats& s : rows) {
    arr.push_back(json{{"t", s.t},
                       {"n_packets", s.n_packets_after},
                       {"created", s.created},
                       {"arrived", s.arrived},
                       {"dropped", s.dropped}});
  }
  return arr.dump() + "\n";
}

std::vector<StepStats> read_timeseries_json(std::string_view text) {
  const json j = parse_json(text);
  return guarded([&] {
    std::vector<StepStats> out;
    for (const json& r : j) {
      out.push_back(StepStats{r.at("t").get<Step>(), r.at("created").get<std::uint64_t>(),
                              r.at("arrived").get<std::uint64_t>(), r.at("dropped").get<std::uint64_t>(),
                              r.at("n_packets").get<std::uint64_t>()});
    }
    return out;
  });
}

std::vector<SweepRow> sweep_rows(SweepAxis axis, const std::vector<SweepPoint>& points) {
  std::vector<SweepRow> rows;
  for (const SweepPoint& p : points) {
    rows.push_back(SweepRow{p.discipline, axis, quantize(p.value), p.realizations, quantize_opt(p.eta.mean),
                            quantize_opt(p.eta.std), quantize_opt(p.delay.mean), quantize_opt(p.delay.std),
                            quantize_opt(p.q.mean), quantize_opt(p.q.std), quantize_opt(p.a.mean),
                            quantize_opt(p.a.std)});
  }
  return rows;
}

std::string write_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out(kSweepHeader);
  out += '\n';
  for (const SweepRow& r : rows) {
    out += std::string(to_string(r.discipline)) + ',' + std::string(to_string(r.axis)) + ',' +
           format_number(r.value) + ',' + std::to_string(r.realizations);
    for (const auto* v : {&r.eta_mean, &r.eta_std, &r.delay_mean, &r.delay_std, &r.q_mean, &r.q_std, &r.a_mean,
                          &r.a_std}) {
      out += ',' + opt_number(*v);
    }
    out += '\n';
  }
  return out;
}

std::vector<SweepRow> read_sweep_csv(std::string_view text) {
  std::vector<SweepRow> rows;
  for (const auto& f : csv_body(text, kSweepHeader)) {
    if (f.size() != 12) throw FormatError("sweep row needs 12 fields");
    SweepRow r;
    try {
      r.discipline = parse_discipline(f[0]);
      r.axis = parse_axis(f[1]);
    } catch (const ConfigError& e) {
      throw FormatError(e.what());
    }
    r.value = parse_number(f[2]);
    r.realizations = parse_int<std::uint32_t>(f[3]);
    std::optional<double>* slots[] = {&r.eta_mean, &r.eta_std, &r.delay_mean, &r.delay_std,
                                      &r.q_mean,   &r.q_std,   &r.a_mean,     &r.a_std};
    for (std::size_t i = 0; i < 8; ++i) *slots[i] = parse_opt(f[4 + i]);
    rows.push_back(r);
  }
  return rows;
}

std::string write_sweep_json(const SweepResult& result) {
  json points = json::array();
  for (const SweepPoint& p : result.points) {
    points.push_back(json{{"discipline", std::string(to_string(p.discipline))},
                          {"value", p.value},
                          {"realizations", p.realizations},
                          {"eta", stat_json(p.eta)},
                          {"delay", stat_json(p.delay)},
                          {"q", stat_json(p.q)},
                          {"a", stat_json(p.a)}});
  }
  json rc = json::array();
  for (const RcRecord& r : result.rc) rc.push_back(estimate_json(r.discipline, r.estimate));
  return json{{"axis", std::string(to_string(result.axis))}, {"points", points}, {"rc", rc}}.dump(2) + "\n";
}

SweepResult read_sweep_json(std::string_view text) {
  const json j = parse_json(text);
  return guarded([&] {
    SweepResult r;
    r.axis = parse_axis(j.at("axis").get<std::string>());
    for (const json& p : j.at("points")) {
      r.points.push_back(SweepPoint{parse_discipline(p.at("discipline").get<std::string>()),
                                    p.at("value").get<double>(), p.at("realizations").get<std::uint32_t>(),
                                    stat_from(p.at("eta")), stat_from(p.at("delay")), stat_from(p.at("q")),
                                    stat_from(p.at("a"))});
    }
    for (const json& e : j.at("rc")) {
      RcEstimate est{opt_from(e, "rc"), e.at("resolution").get<double>(), e.at("max_grid").get<double>()};
      r.rc.push_back(RcRecord{parse_discipline(e.at("discipline").get<std::string>()), est});
    }
    return r;
  });
}

RcTable rc_table(const SweepResult& result, double epsilon) {
  RcTable t;
  t.epsilon = epsilon;
  for (const RcRecord& r : result.rc) {
    t.entries.push_back(RcEntry{r.discipline, std::nullopt, r.estimate.rc, r.estimate.resolution, r.estimate.max_grid});
  }
  return t;
}

RcTable rc_table(const std::vector<RcSearchResult>& results, double epsilon) {
  RcTable t;
  t.epsilon = epsilon;
  for (const RcSearchResult& r : results) {
    t.entries.push_back(RcEntry{r.discipline, std::nullopt, r.estimate.rc, r.estimate.resolution, r.estimate.max_grid});
  }
  return t;
}

RcTable rc_table(const RcCurve& curve, double epsilon) {
  RcTable t;
  t.axis = curve.axis;
  t.epsilon = epsilon;
  for (const RcCurvePoint& p : curve.points) {
    t.entries.push_back(RcEntry{p.discipline, p.value, p.estimate.rc, p.estimate.resolution, p.estimate.max_grid});
  }
  return t;
}

std::string write_rc_json(const RcTable& table) {
  json entries = json::array();
  for (const RcEntry& e : table.entries) {
    entries.push_back(json{{"discipline", std::string(to_string(e.discipline))},
                           {"value", opt_json(e.value)},
                           {"rc", opt_json(e.rc)},
                           {"resolution", e.resolution},
                           {"max_grid", e.max_grid},
                           {"above_grid", !e.rc.has_value()}});
  }
  const json j{{"curve_axis", table.axis ? json(std::string(to_string(*table.axis))) : json(nullptr)},
               {"epsilon", table.epsilon},
               {"entries", entries}};
  return j.dump(2) + "\n";
}

RcTable read_rc_json(std::string_view text) {
  const json j = parse_json(text);
  return guarded([&] {
    RcTable t;
    if (!j.at("curve_axis").is_null()) t.axis = parse_axis(j.at("curve_axis").get<std::string>());
    t.epsilon = j.at("epsilon").get<double>();
    for (const json& e : j.at("entries")) {
      t.entries.push_back(RcEntry{parse_discipline(e.at("discipline").get<std::string>()), opt_from(e, "value"),
                                  opt_from(e, "rc"), e.at("resolution").get<double>(),
                                  e.at("max_grid").get<double>()});
    }
    return t;
  });
}

std::string write_rc_csv(const RcTable& table) {
  std::string out(kRcHeader);
  out += '\n';
  const std::string axis = table.axis ? std::string(to_string(*table.axis)) : std::string("R");
  for (const RcEntry& e : table.entries) {
    out += std::string(to_string(e.discipline)) + ',' + axis + ',' + opt_number(e.value) + ',' + opt_number(e.rc) +
           ',' + format_number(e.resolution) + ',' + format_number(e.max_grid) + '\n';
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mobiq
