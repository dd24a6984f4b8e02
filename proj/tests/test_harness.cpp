#include <doctest.h>

#include <cmath>
#include <set>

#include "mobiq/harness.hpp"
#include "reference.hpp"

using namespace mobiq;

namespace {

SimParams small_world() {
  SimParams p;
  p.agent_count = 60;
  p.side_length = 6.0;
  p.rate = 5;
  p.steps = 80;
  return p;
}

SweepSpec small_sweep() {
  SweepSpec s;
  s.base = small_world();
  s.grid = {2, 8, 30};
  s.realizations = 3;
  s.seed_base = 77;
  return s;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("derived seeds are distinct") {
    std::set<std::uint64_t> seen;
    std::size_t n = 0;
    for (Discipline d : {Discipline::fifo, Discipline::sdf}) {
      for (std::size_t g = 0; g < 40; ++g) {
        for (std::uint32_t r = 0; r < 25; ++r, ++n) seen.insert(derive_seed(9, d, g, r));
      }
    }
    CHECK(seen.size() == n);
    CHECK(derive_seed(1, Discipline::sdf, 3, 4) != derive_seed(2, Discipline::sdf, 3, 4));
  }

  TEST_CASE("summarize") {
    CHECK(summarize({}) == Stat{});
    const Stat one = summarize({2.5});
    CHECK(one.mean == 2.5);
    CHECK_FALSE(one.std.has_value());
    CHECK(one.count == 1);
    const Stat s = summarize({1.0, 2.0, 3.0, 6.0});
    CHECK(s.mean == doctest::Approx(3.0));
    CHECK(*s.std == doctest::Approx(std::sqrt(14.0 / 3.0)));
  }

  TEST_CASE("run_once with no steps has undefined metrics") {
    SimParams p = small_world();
    p.steps = 0;
    const RunSummary r = run_once(p);
    CHECK_FALSE(r.eta_defined);
    CHECK_FALSE(r.mean_delay.has_value());
    CHECK_FALSE(r.arrival_rate.has_value());
    CHECK(r.np_series.empty());
  }

  TEST_CASE("run_once rejects a bad window") {
    RunOptions o;
    o.eta_window = 0.0;
    CHECK_THROWS_AS(run_once(small_world(), o), ConfigError);
  }

  TEST_CASE("single-point sweep equals run_once") {
    SweepSpec s = small_sweep();
    s.grid = {12};
    s.realizations = 1;
    s.disciplines = {Discipline::fifo};
    const SweepResult res = run_sweep(s, {.threads = 1, .progress = {}});
    REQUIRE(res.points.size() == 1);
    SimParams p = point_params(s, Discipline::fifo, 12);
    p.seed = derive_seed(s.seed_base, Discipline::fifo, 0, 0);
    const RunSummary once = run_once(p);
    CHECK(res.points[0].eta.mean == once.eta);
    CHECK(res.points[0].delay.mean == once.mean_delay);
    CHECK(res.points[0].a.mean == once.arrival_rate);
    CHECK(res.points[0].realizations == 1);
    REQUIRE(res.rc.size() == 1);
  }

  TEST_CASE("results do not depend on the thread count") {
    const SweepSpec s = small_sweep();
    std::size_t events = 0;
    ExecOptions one{.threads = 1, .progress = [&](const RunEvent&) { ++events; }};
    const SweepResult a = run_sweep(s, one);
    const SweepResult b = run_sweep(s, {.threads = 3, .progress = {}});
    CHECK(a == b);
    CHECK(events == 2 * 3 * 3);
    REQUIRE(a.points.size() == 6);
    CHECK(a.points[0].discipline == Discipline::fifo);
    CHECK(a.points[0].value == 2);
    CHECK(a.points[5].discipline == Discipline::sdf);
    CHECK(a.points[5].value == 30);
  }

  TEST_CASE("step cap shortens heavy points") {
    SweepSpec s = small_sweep();
    s.step_cap = StepCap{.rate_above = 10, .steps = 20};
    CHECK(point_params(s, Discipline::sdf, 8).steps == 80);
    CHECK(point_params(s, Discipline::sdf, 30).steps == 20);
    s.axis = SweepAxis::speed;
    CHECK(point_params(s, Discipline::sdf, 0.4).speed == 0.4);
    s.axis = SweepAxis::radius;
    CHECK(point_params(s, Discipline::sdf, 1.3).radius == 1.3);
  }

  TEST_CASE("sweep validation") {
    auto field_of = [](const SweepSpec& s) {
      try {
        validate(s);
      } catch (const ConfigError& e) {
        return std::string(e.field());
      }
      return std::string();
    };
    CHECK(field_of(small_sweep()).empty());
    SweepSpec s = small_sweep();
    s.grid.clear();
    CHECK(field_of(s) == "grid");
    s = small_sweep();
    s.grid = {5, 5};
    CHECK(field_of(s) == "grid");
    s = small_sweep();
    s.grid = {2.5};
    CHECK(field_of(s) == "grid");
    s = small_sweep();
    s.realizations = 0;
    CHECK(field_of(s) == "realizations");
    s = small_sweep();
    s.disciplines = {Discipline::sdf, Discipline::sdf};
    CHECK(field_of(s) == "disciplines");
    s = small_sweep();
    s.eta_window = 1.5;
    CHECK(field_of(s) == "window");
    s = small_sweep();
    s.epsilon = -1;
    CHECK(field_of(s) == "epsilon");
    s = small_sweep();
    s.axis = SweepAxis::radius;
    s.grid = {-1.0};
    CHECK_FALSE(field_of(s).empty());
  }

  TEST_CASE("axis names") {
    for (SweepAxis a : {SweepAxis::rate, SweepAxis::speed, SweepAxis::radius}) CHECK(parse_axis(to_string(a)) == a);
    CHECK(parse_axis("speed") == SweepAxis::speed);
    CHECK_THROWS_AS(parse_axis("beta"), ConfigError);
  }

  TEST_CASE("geometric and refinement grids") {
    const auto g = geometric_grid(RcSearch{.r_min = 5, .r_max = 40, .factor = 1.5});
    CHECK(g == std::vector<double>{5, 8, 11, 17, 25, 38});
    CHECK(refine_grid(10, 20, 4) == std::vector<double>{12, 14, 16, 18});
    CHECK(refine_grid(10, 12, 4) == std::vector<double>{11});
    CHECK(refine_grid(10, 11, 4).empty());
    CHECK_THROWS_AS(validate(RcSearch{.factor = 1.0}), ConfigError);
    CHECK_THROWS_AS(validate(RcSearch{.r_min = 50, .r_max = 10}), ConfigError);
  }

  TEST_CASE("critical-rate search brackets the onset") {
    SweepSpec s = small_sweep();
    s.base.steps = 150;
    s.realizations = 2;
    s.disciplines = {Discipline::fifo};
    const RcSearch search{.r_min = 2, .r_max = 400, .factor = 2.0, .confirm = 2, .refine_points = 3};
    const auto res = search_rc(s, search, {.threads = 2, .progress = {}});
    REQUIRE(res.size() == 1);
    const RcEstimate& e = res[0].estimate;
    REQUIRE(e.rc.has_value());
    std::vector<RcPoint> pts;
    for (const SweepPoint& p : res[0].points) pts.push_back({p.value, *p.eta.mean});
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i - 1].rate < pts[i].rate);
    const RcEstimate again = estimate_rc(pts, s.epsilon);
    CHECK(again.rc == e.rc);
    CHECK(again.resolution == e.resolution);
    for (const RcPoint& p : pts) {
      if (p.rate >= *e.rc) CHECK(p.eta_mean > s.epsilon);
    }
  }

  TEST_CASE("presets") {
    CHECK(preset_names() == std::vector<std::string>{"fig1", "fig2a", "fig2b", "fig3", "fig4"});
    for (const std::string& name : preset_names()) {
      const Preset p = make_preset(name);
      CHECK(p.name == name);
      REQUIRE_FALSE(p.parts.empty());
      CHECK(p.parts.size() == p.labels.size());
      for (const SweepSpec& s : p.parts) {
        if (p.kind == Preset::Kind::sweep) CHECK_NOTHROW(validate(s));
        if (p.kind == Preset::Kind::rc_curve) CHECK(s.grid.empty());
      }
    }
    const Preset f1 = make_preset("fig1");
    CHECK(f1.kind == Preset::Kind::sweep);
    REQUIRE(f1.parts.size() == 2);
    CHECK(f1.parts[0].base.speed == 0.1);
    CHECK(f1.parts[1].base.speed == 1.0);
    CHECK(f1.parts[0].base.agent_count == 800);
    CHECK(f1.parts[0].step_cap.has_value());
    const Preset f2b = make_preset("fig2b");
    CHECK(f2b.kind == Preset::Kind::rc_curve);
    CHECK(f2b.curve_axis == SweepAxis::radius);
    CHECK(f2b.parts[0].base.speed == 0.3);
    CHECK_THROWS_AS(make_preset("fig9"), ConfigError);
  }

  TEST_CASE("trace replay reproduces the summary") {
    for (Discipline d : {Discipline::fifo, Discipline::sdf}) {
      SimParams p = small_world();
      p.rate = 20;
      p.steps = 200;
      p.discipline = d;
      std::vector<TraceEvent> trace;
      RunOptions o;
      o.trace = &trace;
      const RunSummary r = run_once(p, o);
      const ref::Replay rp = ref::replay(trace, p);
      CHECK(rp.np_series == r.np_series);
      CHECK(rp.eta_defined == r.eta_defined);
      CHECK(std::abs(rp.eta - r.eta) <= 1e-9);
      CHECK(rp.mean_delay == r.mean_delay);
      CHECK(rp.queue_delay_rate.has_value());
      CHECK(*rp.queue_delay_rate == doctest::Approx(*r.queue_delay_rate).epsilon(1e-12));
      CHECK(rp.arrival_rate == r.arrival_rate);
      CHECK(rp.n_create == r.n_create);
      CHECK(rp.n_arrive == r.n_arrive);
    }
  }
}
