#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bcj/config.hpp"
#include "bcj/io.hpp"

using namespace bcj;
namespace fs = std::filesystem;

TEST_CASE("experiment config") {
  const auto j = json::parse(R"({
    "schema": 1, "regime": "WignerStationary", "N": [20, 40],
    "p": {"coef": 1, "exponent": 2}, "q": {"exponent": 1.8}, "swap_pq": true,
    "mu0": {"free_add": [{"dirac": 0.5}, {"semicircle": 1}]}, "t": [0.5, "inf"], "L": 5
  })");
  const auto e = parse_experiment(j);
  CHECK(e.N_list == std::vector<int>{20, 40});
  CHECK(e.rule.p(10) == doctest::Approx(100));
  CHECK(e.rule.q.coef == 1);
  CHECK(e.rule.swap_pq);
  CHECK(std::isinf(e.t_list[1]));
  CHECK(e.mu0.evaluate(2)[1] == doctest::Approx(0.5));
  CHECK(e.L == 5);
}

TEST_CASE("config strictness") {
  CHECK_THROWS_AS(parse_experiment(json::parse(R"({"schema":1,"regime":"WignerStationary","N":[2],"p":1,"q":1,"t":[1],"bogus":0})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment(json::parse(R"({"schema":2,"regime":"WignerStationary","N":[2],"p":1,"q":1,"t":[1]})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment(json::parse(R"({"schema":1,"regime":"Nope","N":[2],"p":1,"q":1,"t":[1]})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_measure(json::parse(R"({"mp":{"c":1,"t":1,"x":2}})")), ConfigError);
  CHECK_THROWS_AS(parse_measure(json::parse(R"({"moments":[2, 0, 1]})")), ConfigError);
  CHECK_THROWS_AS(parse_freeprob(json::parse(R"({"schema":1,"expr":{"dirac":0},"regime":"MPLocal"})")), ConfigError);
  CHECK_THROWS_AS(load_json_file("/nonexistent/x.json"), ConfigError);
}

TEST_CASE("measure round trip") {
  const auto j = json::parse(R"({"square": {"free_add": [{"semicircle": 2}, {"scale": {"by": 0.5, "of": {"atoms": {"x": [-1, 1]}}}}]}})");
  const auto e = parse_measure(j);
  const auto back = parse_measure(measure_to_json(e));
  const auto a = e.evaluate(6), b = back.evaluate(6);
  for (int l = 0; l <= 6; ++l) CHECK(a[l] == doctest::Approx(b[l]).epsilon(1e-14));
}

TEST_CASE("sde run clock") {
  const auto c = parse_sde_run(json::parse(R"({"schema":1,"kappa":2,"p":12,"q":9,"x0":[0.1,0.2],"t_end":1,"clock":"unrescaled"})"));
  CHECK(c.unrescaled_clock);
  CHECK(c.cfg.params.N == 2);
}

TEST_CASE("csv output is exact and deterministic") {
  Trajectory tr;
  tr.t = {0, 0.1};
  tr.x = {{-0.5, 1.0 / 3}, {-0.25, 0.5}};
  std::ostringstream a, b;
  write_trajectory_csv(a, tr);
  write_trajectory_csv(b, tr);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("t,x_1,x_2\n0,-0.5,0.33333333333333331\n", 0) == 0);
  CHECK(std::stod(fmt17(1.0 / 3)) == 1.0 / 3);
  CHECK(fmt17(INFINITY) == "inf");
}

TEST_CASE("output directory") {
  const fs::path dir = fs::temp_directory_path() / "bcj_outdir_test";
  fs::remove_all(dir);
  {
    OutputDir o(dir, false);
    o.write("a.txt", "x");
    o.commit();
  }
  CHECK(fs::exists(dir / "a.txt"));
  CHECK_THROWS(OutputDir(dir, false));
  {
    OutputDir o(dir, true);
    o.write("b.txt", "y");
  }
  CHECK(fs::exists(dir / "a.txt"));
  CHECK_FALSE(fs::exists(dir / "b.txt"));
  fs::remove_all(dir);
}
