#include "myosolve/bench.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"

using namespace myo;

TEST_CASE("config text parsing: comments, blanks, and bad lines") {
  std::vector<std::string> errors;
  const auto kv = bench::parse_config_text(
      "# leading comment\n"
      "mesh.kind = beam   # trailing comment\n"
      "\n"
      "time.dt= 1e-3\n"
      "bench.name = run a=b\n"
      "this line is broken\n"
      "   = empty key\n",
      errors);
  CHECK(kv.at("mesh.kind") == "beam");
  CHECK(kv.at("time.dt") == "1e-3");
  CHECK(kv.at("bench.name") == "run a=b");  // first '=' splits
  REQUIRE(errors.size() == 2);
  CHECK(errors[0].find("line 6") != std::string::npos);
  CHECK(errors[1].find("line 7") != std::string::npos);
}

TEST_CASE("validation lists every offending key") {
  const std::map<std::string, std::string> kv{
      {"mesh.kind", "pyramid"},        // bad choice
      {"time.steps", "many"},          // bad integer
      {"no.such.key", "1"},            // unknown
      {"sweep.also.unknown", "1, 2"},  // unknown sweep target
      {"sweep.fem.order", "1, 7"},     // bad sweep item
      {"solver.rtol", "1e-9"},         // fine
  };
  const auto problems = bench::validate(kv);
  REQUIRE(problems.size() == 5);
  int hits = 0;
  for (const auto& p : problems) {
    hits += p.find("pyramid") != std::string::npos;
    hits += p.find("many") != std::string::npos;
    hits += p.find("no.such.key") != std::string::npos;
    hits += p.find("also.unknown") != std::string::npos;
    hits += p.find("'7'") != std::string::npos;
  }
  CHECK(hits == 5);
}

TEST_CASE("oversized sweeps are rejected") {
  std::string many;
  for (int i = 0; i < 65; ++i) many += (i ? ", " : "") + std::to_string(i);
  const auto problems = bench::validate({{"sweep.time.steps", many}});
  REQUIRE(problems.size() == 1);
  CHECK(problems[0].find("65") != std::string::npos);

  // products count too
  const auto crossed = bench::validate(
      {{"sweep.mesh.nx", "1,2,3,4,5,6,7,8,9"}, {"sweep.mesh.ny", "1,2,3,4,5,6,7,8"}});
  REQUIRE(crossed.size() == 1);
}

TEST_CASE("sweep expansion is a cartesian product in key order") {
  auto cfg = bench::resolve({{"sweep.solver.type", "bddc, amg"},
                             {"sweep.bddc.primal", "v, ve, vef"}});
  std::vector<std::string> errors;
  const auto runs = bench::expand_sweeps(cfg, errors);
  CHECK(errors.empty());
  REQUIRE(runs.size() == 6);
  // map order puts bddc.primal before solver.type
  CHECK(runs[0].at("bddc.primal") == "v");
  CHECK(runs[0].at("solver.type") == "bddc");
  CHECK(runs[1].at("solver.type") == "amg");
  CHECK(runs[4].at("bddc.primal") == "vef");
  CHECK(runs[5] == std::map<std::string, std::string>{{"bddc.primal", "vef"},
                                                      {"solver.type", "amg"}});
}

TEST_CASE("defaults cover the registry and overrides land") {
  const auto cfg = bench::default_config();
  for (const auto& spec : bench::key_registry()) {
    REQUIRE(cfg.values.count(spec.name) == 1);
    CHECK(cfg.values.at(spec.name) == spec.def);
  }
  const auto tuned = bench::resolve({{"material.c", "880"}});
  CHECK(tuned.real("material.c") == 880.0);
  CHECK(tuned.real("material.bulk") == 50000.0);
}

TEST_CASE("build case wires the config into the problem") {
  const auto cfg = bench::resolve({{"mesh.nx", "4"},
                                   {"mesh.ny", "2"},
                                   {"mesh.nz", "2"},
                                   {"partition.px", "2"},
                                   {"material.c", "880"},
                                   {"robin.base.k_perp", "123"},
                                   {"pressure.follower", "false"},
                                   {"solver.freeze", "true"},
                                   {"bddc.primal", "ve"},
                                   {"time.steps", "7"}});
  const auto cs = bench::build_case(cfg);
  CHECK(cs->dofs.n_dofs() == 135);
  CHECK(cs->part.n_subdomains == 2);
  CHECK(cs->prob.material.C == 880.0);
  CHECK(cs->prob.robin_base.k_perp == 123.0);
  CHECK(!cs->prob.follower_pressure);
  CHECK(cs->opts.freeze_preconditioner);
  CHECK(cs->opts.bddc.primal.name() == "ve");
  CHECK(cs->opts.n_steps == 7);
  CHECK(cs->prob.mesh == &cs->mesh);
}

TEST_CASE("bench reports round-trip and police their aggregates") {
  const auto cfg = bench::resolve({{"mesh.nx", "4"},
                                   {"mesh.ny", "2"},
                                   {"mesh.nz", "2"},
                                   {"partition.px", "2"},
                                   {"time.steps", "2"},
                                   {"load.pressure", "4"},
                                   {"material.rho", "1"},
                                   {"sweep.solver.type", "bddc, amg"}});
  const bench::BenchReport rep = bench::run_bench(cfg);
  REQUIRE(rep.runs.size() == 2);
  for (const auto& rr : rep.runs) {
    CHECK(rr.ok);
    CHECK(rr.steps.size() == 2);
    CHECK(rr.aggregates.total_linear_iters > 0);
  }
  CHECK(rep.runs[0].solver == "bddc");
  CHECK(rep.runs[1].solver == "amg");

  const std::string jpath = "bench_roundtrip.json";
  const std::string cpath = "bench_roundtrip.csv";
  bench::write_report_json(rep, jpath);
  bench::write_report_csv(rep, cpath);

  const bench::BenchReport back = bench::load_report_json(jpath);
  REQUIRE(back.runs.size() == 2);
  CHECK(back.name == rep.name);
  CHECK(back.config == rep.config);
  for (std::size_t r = 0; r < 2; ++r) {
    CHECK(back.runs[r].aggregates.total_newton_iters == rep.runs[r].aggregates.total_newton_iters);
    CHECK(back.runs[r].aggregates.total_seconds ==
          doctest::Approx(rep.runs[r].aggregates.total_seconds));
    CHECK(back.runs[r].overrides == rep.runs[r].overrides);
  }

  // the csv carries one row per run and step, consistent with the aggregates
  std::ifstream csv(cpath);
  std::string line;
  std::getline(csv, line);
  CHECK(line == "run,step,time,newton_iters,linear_iters,seconds");
  std::map<int, long> linear_by_run;
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    int run, step, newton;
    long linear;
    double time, seconds;
    REQUIRE(std::sscanf(line.c_str(), "%d,%d,%lf,%d,%ld,%lf", &run, &step, &time, &newton,
                        &linear, &seconds) == 6);
    linear_by_run[run] += linear;
  }
  CHECK(rows == 4);
  CHECK(linear_by_run[0] == rep.runs[0].aggregates.total_linear_iters);
  CHECK(linear_by_run[1] == rep.runs[1].aggregates.total_linear_iters);

  // tampering with a stored aggregate must be caught on load
  std::stringstream buf;
  buf << std::ifstream(jpath).rdbuf();
  std::string text = buf.str();
  const std::string needle = "\"total_newton_iters\": " +
                             std::to_string(rep.runs[0].aggregates.total_newton_iters);
  const auto pos = text.find(needle);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, needle.size(), "\"total_newton_iters\": 999");
  std::ofstream(jpath) << text;
  CHECK_THROWS_AS((void)bench::load_report_json(jpath), std::runtime_error);

  std::remove(jpath.c_str());
  std::remove(cpath.c_str());
}
