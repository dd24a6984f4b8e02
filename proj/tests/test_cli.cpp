#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "mobiq/cli.hpp"
#include "mobiq/io.hpp"

using namespace mobiq;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("mobiq_cli_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mobiq");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> small_run(const fs::path& dir) {
  return {"run", "--agents", "40", "--size", "5", "--rate", "4", "--steps", "60", "--seed", "3", "--out", dir.string(),
          "--quiet"};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("run writes a summary and a time series") {
    TempDir tmp;
    const Result r = cli(small_run(tmp.path));
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("eta=") != std::string::npos);
    const SummaryRecord s = read_summary_json(read_file(tmp.path / "summary.json"));
    CHECK(s.params.agent_count == 40);
    CHECK(s.params.rate == 4);
    CHECK(s.params.seed == 3);
    CHECK(s.n_create == 240);
    const auto series = read_timeseries_csv(read_file(tmp.path / "timeseries.csv"));
    REQUIRE(series.size() == 60);
    CHECK(series.back().t == 60);
  }

  TEST_CASE("repeated runs are byte-identical") {
    TempDir a, b;
    REQUIRE(cli(small_run(a.path)).code == kExitOk);
    REQUIRE(cli(small_run(b.path)).code == kExitOk);
    for (const char* f : {"summary.json", "timeseries.csv"}) CHECK(read_file(a.path / f) == read_file(b.path / f));
  }

  TEST_CASE("json format") {
    TempDir tmp;
    auto args = small_run(tmp.path);
    args.insert(args.end(), {"--format", "json"});
    REQUIRE(cli(args).code == kExitOk);
    CHECK(read_timeseries_json(read_file(tmp.path / "timeseries.json")).size() == 60);
  }

  TEST_CASE("validation errors exit with 2") {
    TempDir tmp;
    auto with = [&](std::vector<std::string> extra) {
      auto args = small_run(tmp.path);
      args.insert(args.end(), extra.begin(), extra.end());
      return cli(args).code;
    };
    CHECK(with({"--rate", "0"}) == kExitValidation);
    CHECK(with({"--speed", "0"}) == kExitValidation);
    CHECK(with({"--speed", "abc"}) == kExitValidation);
    CHECK(with({"--discipline", "lifo"}) == kExitValidation);
    CHECK(with({"--format", "xml"}) == kExitValidation);
    CHECK(with({"--window", "0"}) == kExitValidation);
    CHECK(with({"--ttl", "0"}) == kExitValidation);
    CHECK(with({"--bogus", "1"}) == kExitValidation);
    CHECK(cli({}).code == kExitValidation);
    CHECK(cli({"sweep", "--preset", "nope", "--quiet"}).code == kExitValidation);
    CHECK(cli({"run", "--config", (tmp.path / "missing.json").string()}).code == kExitValidation);
    CHECK(cli({"--help"}).code == kExitOk);
  }

  TEST_CASE("flags override the config file, which overrides defaults") {
    TempDir tmp;
    const fs::path cfg = tmp.path / "cfg.json";
    write_file(cfg, R"({"agents": 30, "rate": 7, "steps": 20, "size": 4.0, "discipline": "fifo"})");
    const fs::path out = tmp.path / "o";
    REQUIRE(cli({"run", "--config", cfg.string(), "--rate", "2", "--out", out.string(), "--quiet"}).code == kExitOk);
    const SummaryRecord s = read_summary_json(read_file(out / "summary.json"));
    CHECK(s.params.agent_count == 30);
    CHECK(s.params.rate == 2);
    CHECK(s.params.discipline == Discipline::fifo);
    CHECK(s.params.radius == SimParams{}.radius);

    write_file(cfg, R"({"agents": 30, "unknown_key": 1})");
    CHECK(cli({"run", "--config", cfg.string(), "--out", out.string(), "--quiet"}).code == kExitValidation);
    write_file(cfg, R"({"agents": -3})");
    CHECK(cli({"run", "--config", cfg.string(), "--out", out.string(), "--quiet"}).code == kExitValidation);
  }

  TEST_CASE("sweep writes rows and critical rates") {
    TempDir tmp;
    const Result r = cli({"sweep", "--agents", "40", "--size", "5", "--steps", "80", "--grid", "2,60",
                          "--realizations", "2", "--out", tmp.path.string(), "--quiet"});
    REQUIRE(r.code == kExitOk);
    const auto rows = read_sweep_csv(read_file(tmp.path / "sweep.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].discipline == Discipline::fifo);
    CHECK(rows[0].realizations == 2);
    const RcTable t = read_rc_json(read_file(tmp.path / "rc.json"));
    CHECK(t.entries.size() == 2);
    CHECK(r.out.find("Rc") != std::string::npos);
  }

  TEST_CASE("speed sweep has no critical-rate file") {
    TempDir tmp;
    REQUIRE(cli({"sweep", "--agents", "30", "--size", "5", "--steps", "40", "--rate", "3", "--axis", "v", "--grid",
                 "0.2,0.5", "--realizations", "1", "--disciplines", "sdf", "--format", "json", "--out",
                 tmp.path.string(), "--quiet"})
                .code == kExitOk);
    const SweepResult res = read_sweep_json(read_file(tmp.path / "sweep.json"));
    CHECK(res.axis == SweepAxis::speed);
    CHECK(res.points.size() == 2);
    CHECK_FALSE(fs::exists(tmp.path / "rc.json"));
  }

  TEST_CASE("rc search") {
    TempDir tmp;
    const Result r = cli({"rc", "--agents", "40", "--size", "5", "--steps", "80", "--realizations", "1",
                          "--disciplines", "fifo", "--rc-min", "2", "--rc-max", "200", "--rc-factor", "3", "--out",
                          tmp.path.string(), "--quiet"});
    REQUIRE(r.code == kExitOk);
    const RcTable t = read_rc_json(read_file(tmp.path / "rc.json"));
    REQUIRE(t.entries.size() == 1);
    CHECK(t.entries[0].discipline == Discipline::fifo);
    CHECK_FALSE(read_sweep_csv(read_file(tmp.path / "sweep.csv")).empty());
    CHECK(cli({"rc", "--grid", "5,10", "--out", tmp.path.string(), "--quiet"}).code == kExitValidation);
  }
}
