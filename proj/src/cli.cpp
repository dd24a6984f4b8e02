#include "mobiq/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mobiq/harness.hpp"
#include "mobiq/io.hpp"

namespace mobiq {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

enum class Kind { u32, u64, real, text, reals, texts };

struct Key {
  const char* name;
  Kind kind;
  const char* help;
};

// Every key a flag or a config file may set. Flags use dashes for
// underscores.
const std::vector<Key>& all_keys() {
  static const std::vector<Key> keys{
      {"agents", Kind::u32, "number of agents N"},
      {"size", Kind::real, "side length L of the periodic square"},
      {"radius", Kind::real, "communication radius"},
      {"capacity", Kind::u32, "packets an agent can handle per step"},
      {"speed", Kind::real, "agent speed per step"},
      {"rate", Kind::u32, "packets generated per step"},
      {"steps", Kind::u32, "number of steps T"},
      {"discipline", Kind::text, "queue discipline: fifo or sdf"},
      {"disciplines", Kind::texts, "comma-separated disciplines (sweep, rc)"},
      {"seed", Kind::u64, "seed (base seed for sweeps)"},
      {"ttl", Kind::u32, "drop packets older than this many steps"},
      {"out", Kind::text, "output directory"},
      {"format", Kind::text, "tabular output format: csv or json"},
      {"window", Kind::real, "trailing fraction of steps used for eta"},
      {"epsilon", Kind::real, "eta threshold for the critical rate"},
      {"realizations", Kind::u32, "independent runs per point"},
      {"preset", Kind::text, "named experiment"},
      {"axis", Kind::text, "swept parameter: R, v or alpha"},
      {"grid", Kind::reals, "comma-separated values along the axis"},
      {"cap_steps", Kind::u32, "step count for heavily loaded points"},
      {"cap_above", Kind::u32, "rate above which cap-steps applies"},
      {"rc_min", Kind::real, "first rate of the coarse search"},
      {"rc_max", Kind::real, "last rate of the coarse search"},
      {"rc_factor", Kind::real, "ratio between coarse rates"},
      {"rc_confirm", Kind::u32, "congested points that end the coarse pass"},
      {"rc_refine", Kind::u32, "rates added inside the bracketing interval"},
      {"threads", Kind::u32, "worker threads (0: all cores)"},
  };
  return keys;
}

const Key& key(std::string_view name) {
  for (const Key& k : all_keys()) {
    if (name == k.name) return k;
  }
  throw std::logic_error("unknown key " + std::string(name));
}

std::string flag_name(std::string_view name) {
  std::string f = "--" + std::string(name);
  std::replace(f.begin(), f.end(), '_', '-');
  return f;
}

template <class T>
T parse_integer(const std::string& field, const std::string& s) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError(field, "expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

double parse_real(const std::string& field, const std::string& s) {
  try {
    const double v = parse_number(s);
    if (!std::isfinite(v)) throw FormatError("");
    return v;
  } catch (const FormatError&) {
    throw ConfigError(field, "expected a number, got '" + s + "'");
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

json from_flag(const Key& k, const std::string& s) {
  switch (k.kind) {
    case Kind::u32: return parse_integer<std::uint32_t>(k.name, s);
    case Kind::u64: return parse_integer<std::uint64_t>(k.name, s);
    case Kind::real: return parse_real(k.name, s);
    case Kind::text: return s;
    case Kind::reals: {
      json arr = json::array();
      for (const std::string& item : split_list(s)) arr.push_back(parse_real(k.name, item));
      return arr;
    }
    case Kind::texts: {
      json arr = json::array();
      for (const std::string& item : split_list(s)) arr.push_back(item);
      return arr;
    }
  }
  return nullptr;
}

json from_config(const Key& k, const json& v) {
  auto bad = [&](const char* what) { return ConfigError(k.name, std::string("expected ") + what); };
  switch (k.kind) {
    case Kind::u32:
      if (!v.is_number_unsigned() || v.get<std::uint64_t>() > std::numeric_limits<std::uint32_t>::max()) {
        throw bad("a non-negative integer");
      }
      return v;
    case Kind::u64:
      if (!v.is_number_unsigned()) throw bad("a non-negative integer");
      return v;
    case Kind::real:
      if (!v.is_number()) throw bad("a number");
      return v.get<double>();
    case Kind::text:
      if (!v.is_string()) throw bad("a string");
      return v;
    case Kind::reals:
      if (v.is_string()) return from_flag(k, v.get<std::string>());
      if (!v.is_array()) throw bad("an array of numbers");
      for (const json& x : v) {
        if (!x.is_number()) throw bad("an array of numbers");
      }
      return v;
    case Kind::texts:
      if (v.is_string()) return from_flag(k, v.get<std::string>());
      if (!v.is_array()) throw bad("an array of strings");
      for (const json& x : v) {
        if (!x.is_string()) throw bad("an array of strings");
      }
      return v;
  }
  return nullptr;
}

/// Merged key-value settings: flags over config file.
class Settings {
 public:
  void load_config(const fs::path& path) {
    std::string text;
    try {
      text = read_file(path);
    } catch (const std::runtime_error& e) {
      throw ConfigError("config", e.what());
    }
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config", "expected a JSON object");
    for (const auto& [name, value] : doc.items()) {
      const Key* k = find(name);
      if (!k) throw ConfigError(name, "unknown configuration key");
      if (values_.count(name) == 0) values_[name] = from_config(*k, value);
    }
  }

  void set_flag(const Key& k, const std::string& text) { values_[k.name] = from_flag(k, text); }

  bool has(std::string_view name) const { return values_.count(std::string(name)) > 0; }

  template <class T>
  T get(std::string_view name, T fallback) const {
    auto it = values_.find(std::string(name));
    if (it == values_.end()) return fallback;
    return it->second.get<T>();
  }

  std::optional<json> raw(std::string_view name) const {
    auto it = values_.find(std::string(name));
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

 private:
  static const Key* find(std::string_view name) {
    for (const Key& k : all_keys()) {
      if (name == k.name) return &k;
    }
    return nullptr;
  }

  std::map<std::string, json> values_;
};

void require_positive(const SimParams& p) {
  if (p.speed <= 0.0) throw ConfigError("speed", "must be positive");
  if (p.rate < 1) throw ConfigError("rate", "must be positive");
  if (p.steps < 1) throw ConfigError("steps", "must be positive");
  if (p.agent_count < 2) throw ConfigError("agents", "must be at least 2");
  if (p.side_length <= 0.0) throw ConfigError("size", "must be positive");
}

/// Applies parameter keys on top of `p`.
SimParams apply_params(SimParams p, const Settings& s) {
  p.agent_count = s.get<std::uint32_t>("agents", p.agent_count);
  p.side_length = s.get<double>("size", p.side_length);
  p.radius = s.get<double>("radius", p.radius);
  p.capacity = s.get<std::uint32_t>("capacity", p.capacity);
  p.speed = s.get<double>("speed", p.speed);
  p.rate = s.get<std::uint32_t>("rate", p.rate);
  p.steps = s.get<std::uint32_t>("steps", static_cast<std::uint32_t>(p.steps));
  p.seed = s.get<std::uint64_t>("seed", p.seed);
  if (s.has("ttl")) {
    const std::uint32_t ttl = s.get<std::uint32_t>("ttl", 0);
    if (ttl < 1) throw ConfigError("ttl", "must be positive");
    p.ttl = ttl;
  }
  if (s.has("discipline")) p.discipline = parse_discipline(s.get<std::string>("discipline", ""));
  return p;
}

enum class Format { csv, json };

Format output_format(const Settings& s) {
  const std::string f = s.get<std::string>("format", "csv");
  if (f == "csv") return Format::csv;
  if (f == "json") return Format::json;
  throw ConfigError("format", "expected csv or json, got '" + f + "'");
}

double window_of(const Settings& s) {
  const double w = s.get<double>("window", kDefaultEtaWindow);
  if (!(w > 0.0 && w <= 1.0)) throw ConfigError("window", "must lie in (0, 1]");
  return w;
}

fs::path out_dir(const Settings& s) { return s.get<std::string>("out", "out"); }

std::vector<Discipline> disciplines_of(const Settings& s, std::vector<Discipline> fallback) {
  if (s.has("disciplines")) {
    std::vector<Discipline> out;
    const json list = *s.raw("disciplines");
    for (const json& d : list) out.push_back(parse_discipline(d.get<std::string>()));
    return out;
  }
  if (s.has("discipline")) return {parse_discipline(s.get<std::string>("discipline", ""))};
  return fallback;
}

/// Sweep keys on top of `spec`.
SweepSpec apply_sweep(SweepSpec spec, const Settings& s) {
  spec.base = apply_params(spec.base, s);
  spec.seed_base = s.get<std::uint64_t>("seed", spec.seed_base);
  spec.realizations = s.get<std::uint32_t>("realizations", spec.realizations);
  spec.disciplines = disciplines_of(s, spec.disciplines);
  spec.eta_window = window_of(s);
  spec.epsilon = s.get<double>("epsilon", spec.epsilon);
  if (s.has("axis")) spec.axis = parse_axis(s.get<std::string>("axis", ""));
  if (s.has("grid")) spec.grid = s.raw("grid")->get<std::vector<double>>();
  if (s.has("cap_steps") || s.has("cap_above")) {
    StepCap cap = spec.step_cap.value_or(StepCap{});
    cap.steps = s.get<std::uint32_t>("cap_steps", static_cast<std::uint32_t>(cap.steps));
    cap.rate_above = s.get<std::uint32_t>("cap_above", cap.rate_above);
    spec.step_cap = cap;
  }
  return spec;
}

RcSearch apply_search(RcSearch r, const Settings& s) {
  r.r_min = s.get<double>("rc_min", r.r_min);
  r.r_max = s.get<double>("rc_max", r.r_max);
  r.factor = s.get<double>("rc_factor", r.factor);
  r.confirm = s.get<std::uint32_t>("rc_confirm", r.confirm);
  r.refine_points = s.get<std::uint32_t>("rc_refine", r.refine_points);
  return r;
}

void check_user_params(const SweepSpec& spec) {
  SimParams p = spec.base;
  if (spec.axis == SweepAxis::rate && p.rate < 1) p.rate = 1;
  require_positive(p);
  for (double v : spec.grid) {
    if (!(v > 0.0)) throw ConfigError("grid", "values must be positive");
  }
}

ExecOptions exec_options(const Settings& s, bool quiet, std::ostream& err) {
  ExecOptions exec;
  exec.threads = s.get<std::uint32_t>("threads", 0);
  if (!quiet) {
    exec.progress = [&err](const RunEvent& e) {
      std::ostringstream line;
      line << '[' << e.done << '/' << e.total << "] " << to_string(e.discipline) << " value=" << e.value << " #"
           << e.realization << " eta=" << std::fixed << std::setprecision(4) << e.summary->eta
           << " A=" << e.summary->arrival_rate.value_or(0.0) << ' ' << std::setprecision(1) << e.seconds << "s\n";
      err << line.str() << std::flush;
    };
  }
  return exec;
}

std::string axis_label(SweepAxis axis, double value) {
  return std::string(to_string(axis)) + format_number(value);
}

void write_sweep_outputs(const fs::path& dir, const SweepResult& result, const SweepSpec& spec, Format format) {
  if (format == Format::csv) {
    write_file(dir / "sweep.csv", write_sweep_csv(sweep_rows(result.axis, result.points)));
  } else {
    write_file(dir / "sweep.json", write_sweep_json(result));
  }
  if (result.axis == SweepAxis::rate) write_file(dir / "rc.json", write_rc_json(rc_table(result, spec.epsilon)));
}

void write_points(const fs::path& dir, const std::vector<SweepPoint>& points, Format format) {
  SweepResult r;
  r.axis = SweepAxis::rate;
  r.points = points;
  if (format == Format::csv) {
    write_file(dir / "sweep.csv", write_sweep_csv(sweep_rows(r.axis, r.points)));
  } else {
    write_file(dir / "sweep.json", write_sweep_json(r));
  }
}

void report_rc(std::ostream& out, const RcTable& table) {
  for (const RcEntry& e : table.entries) {
    out << to_string(e.discipline);
    if (table.axis && e.value) out << ' ' << to_string(*table.axis) << '=' << format_number(*e.value);
    if (e.rc) {
      out << " Rc=" << format_number(*e.rc) << " (resolution " << format_number(e.resolution) << ")\n";
    } else {
      out << " Rc>" << format_number(e.max_grid) << '\n';
    }
  }
}

int cmd_run(const Settings& s, bool quiet, std::ostream& out, std::ostream& err) {
  if (s.has("preset")) throw ConfigError("preset", "presets apply to sweep");
  const SimParams p = apply_params(SimParams{}, s);
  require_positive(p);
  validate(p);
  const double window = window_of(s);
  const Format format = output_format(s);
  const fs::path dir = out_dir(s);

  std::vector<StepStats> series;
  RunOptions opts;
  opts.eta_window = window;
  opts.timeseries = &series;
  const auto start = std::chrono::steady_clock::now();
  const RunSummary run = run_once(p, opts);
  const SummaryRecord summary = make_summary(run, window);
  write_file(dir / "summary.json", write_summary_json(summary));
  if (format == Format::csv) {
    write_file(dir / "timeseries.csv", write_timeseries_csv(series));
  } else {
    write_file(dir / "timeseries.json", write_timeseries_json(series));
  }
  if (!quiet) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << "run finished in " << std::fixed << std::setprecision(1) << secs << "s\n";
  }
  auto show = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("-"); };
  out << "eta=" << show(summary.eta) << " mean_delay=" << show(summary.mean_delay)
      << " queue_delay_rate=" << show(summary.queue_delay_rate) << " arrival_rate=" << show(summary.arrival_rate)
      << " n_create=" << summary.n_create << " n_arrive=" << summary.n_arrive << " n_drop=" << summary.n_drop << '\n';
  return kExitOk;
}

int cmd_sweep(const Settings& s, bool quiet, std::ostream& out, std::ostream& err) {
  const Format format = output_format(s);
  const fs::path dir = out_dir(s);
  const ExecOptions exec = exec_options(s, quiet, err);

  if (!s.has("preset")) {
    SweepSpec spec = apply_sweep(SweepSpec{}, s);
    check_user_params(spec);
    validate(spec);
    const SweepResult result = run_sweep(spec, exec);
    write_sweep_outputs(dir, result, spec, format);
    if (!result.rc.empty()) report_rc(out, rc_table(result, spec.epsilon));
    return kExitOk;
  }

  const Preset preset = make_preset(s.get<std::string>("preset", ""));
  if (preset.kind == Preset::Kind::sweep) {
    std::vector<SweepSpec> parts;
    for (const SweepSpec& part : preset.parts) {
      parts.push_back(apply_sweep(part, s));
      check_user_params(parts.back());
      validate(parts.back());
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const SweepResult result = run_sweep(parts[i], exec);
      const fs::path sub = parts.size() > 1 ? dir / preset.labels[i] : dir;
      write_sweep_outputs(sub, result, parts[i], format);
      out << preset.labels[i] << ":\n";
      report_rc(out, rc_table(result, parts[i].epsilon));
    }
    return kExitOk;
  }

  SweepSpec base = apply_sweep(preset.parts.front(), s);
  base.axis = SweepAxis::rate;
  std::vector<double> values = preset.curve_values;
  if (s.has("grid")) values = s.raw("grid")->get<std::vector<double>>();
  const RcSearch search = apply_search(preset.search, s);
  validate(search);
  const RcCurve curve = rc_curve(base, preset.curve_axis, values, search, exec);
  const RcTable table = rc_table(curve, base.epsilon);
  write_file(dir / "rc.json", write_rc_json(table));
  write_file(dir / "rc.csv", write_rc_csv(table));
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const RcCurvePoint& pt = curve.points[i];
    write_points(dir / axis_label(curve.axis, pt.value) / std::string(to_string(pt.discipline)), curve.samples[i],
                 format);
  }
  report_rc(out, table);
  return kExitOk;
}

int cmd_rc(const Settings& s, bool quiet, std::ostream& out, std::ostream& err) {
  if (s.has("preset")) throw ConfigError("preset", "presets apply to sweep");
  const Format format = output_format(s);
  const fs::path dir = out_dir(s);
  const ExecOptions exec = exec_options(s, quiet, err);
  SweepSpec spec = apply_sweep(SweepSpec{}, s);
  if (!s.has("cap_steps") && !s.has("cap_above")) spec.step_cap = StepCap{};
  const RcSearch search = apply_search(RcSearch{}, s);
  validate(search);
  const SweepAxis curve_axis = spec.axis;
  spec.axis = SweepAxis::rate;
  const std::vector<double> values = spec.grid;
  spec.grid.clear();
  {
    SweepSpec probe = spec;
    probe.base.rate = 1;
    require_positive(probe.base);
  }

  if (curve_axis == SweepAxis::rate) {
    if (!values.empty()) throw ConfigError("grid", "the search chooses its own rates; pass --axis v or alpha");
    const std::vector<RcSearchResult> results = search_rc(spec, search, exec);
    std::vector<SweepPoint> all;
    for (const RcSearchResult& r : results) all.insert(all.end(), r.points.begin(), r.points.end());
    write_points(dir, all, format);
    const RcTable table = rc_table(results, spec.epsilon);
    write_file(dir / "rc.json", write_rc_json(table));
    report_rc(out, table);
    return kExitOk;
  }
  if (values.empty()) throw ConfigError("grid", "a curve needs values along the axis");
  for (double v : values) {
    if (!(v > 0.0)) throw ConfigError("grid", "values must be positive");
  }
  const RcCurve curve = rc_curve(spec, curve_axis, values, search, exec);
  const RcTable table = rc_table(curve, spec.epsilon);
  write_file(dir / "rc.json", write_rc_json(table));
  write_file(dir / "rc.csv", write_rc_csv(table));
  report_rc(out, table);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Packet routing on mobile agents: FIFO and shortest-distance-first queues"};
  app.require_subcommand(1);
  struct Command {
    CLI::App* app;
    std::vector<std::string> keys;
  };
  const std::vector<std::string> common{"agents", "size", "radius", "capacity", "speed", "rate",   "steps",
                                        "seed",   "ttl",  "out",    "format",   "window", "threads"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> k = common;
    k.insert(k.end(), extra.begin(), extra.end());
    return k;
  };
  std::vector<Command> commands{
      {app.add_subcommand("run", "simulate one configuration"), with({"discipline"})},
      {app.add_subcommand("sweep", "average over realizations along one parameter"),
       with({"discipline", "disciplines", "realizations", "epsilon", "preset", "axis", "grid", "cap_steps",
             "cap_above", "rc_min", "rc_max", "rc_factor", "rc_confirm", "rc_refine"})},
      {app.add_subcommand("rc", "search the critical generation rate"),
       with({"discipline", "disciplines", "realizations", "epsilon", "axis", "grid", "cap_steps", "cap_above",
             "rc_min", "rc_max", "rc_factor", "rc_confirm", "rc_refine"})},
  };

  std::map<std::string, std::string> flag_text;
  std::map<std::string, CLI::Option*> flag_opts;
  std::string config_path;
  bool quiet = false;
  for (Command& c : commands) {
    for (const std::string& name : c.keys) {
      const Key& k = key(name);
      flag_opts[c.app->get_name() + "/" + name] = c.app->add_option(flag_name(name), flag_text[name], k.help);
    }
    c.app->add_option("--config", config_path, "JSON file with the same keys as the flags");
    c.app->add_flag("--quiet", quiet, "suppress the per-run log");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    for (Command& c : commands) {
      if (!c.app->parsed()) continue;
      Settings settings;
      for (const std::string& name : c.keys) {
        if (flag_opts[c.app->get_name() + "/" + name]->count() > 0) settings.set_flag(key(name), flag_text[name]);
      }
      if (!config_path.empty()) settings.load_config(config_path);
      const std::string& name = c.app->get_name();
      if (name == "run") return cmd_run(settings, quiet, out, err);
      if (name == "sweep") return cmd_sweep(settings, quiet, out, err);
      return cmd_rc(settings, quiet, out, err);
    }
  } catch (const ConfigError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace mobiq
