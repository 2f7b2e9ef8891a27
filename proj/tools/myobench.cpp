#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "myosolve/bench.hpp"

namespace {

// exit codes: 0 success, 1 validation or run failure, 2 unusable input
constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

std::string format_overrides(const std::map<std::string, std::string>& ov) {
  if (ov.empty()) return "(base config)";
  std::string s;
  for (const auto& [k, v] : ov) s += (s.empty() ? "" : " ") + k + "=" + v;
  return s;
}

int cmd_verify(const std::string& path) {
  std::vector<std::string> errors;
  const auto kv = myo::bench::load_config_file(path, errors);
  if (!errors.empty()) {
    for (const auto& e : errors) std::fprintf(stderr, "%s: %s\n", path.c_str(), e.c_str());
    return exit_usage;
  }
  const auto problems = myo::bench::validate(kv);
  if (!problems.empty()) {
    for (const auto& p : problems) std::fprintf(stderr, "%s: %s\n", path.c_str(), p.c_str());
    std::printf("invalid: %zu problem(s)\n", problems.size());
    return exit_failed;
  }
  const auto cfg = myo::bench::resolve(kv);
  std::vector<std::string> sweep_errors;
  const auto plans = myo::bench::expand_sweeps(cfg, sweep_errors);
  if (!sweep_errors.empty()) {
    for (const auto& e : sweep_errors) std::fprintf(stderr, "%s: %s\n", path.c_str(), e.c_str());
    return exit_failed;
  }
  std::printf("ok: %zu key(s), %zu run(s) planned\n", kv.size(), plans.size());
  return exit_ok;
}

int cmd_run(const std::string& path, const std::vector<std::string>& sets,
            const std::string& out_dir, const std::string& format) {
  std::vector<std::string> errors;
  auto kv = myo::bench::load_config_file(path, errors);
  if (!errors.empty()) {
    for (const auto& e : errors) std::fprintf(stderr, "%s: %s\n", path.c_str(), e.c_str());
    return exit_usage;
  }
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "--set expects key=value, got '%s'\n", s.c_str());
      return exit_usage;
    }
    kv[s.substr(0, eq)] = s.substr(eq + 1);
  }
  const auto problems = myo::bench::validate(kv);
  if (!problems.empty()) {
    for (const auto& p : problems) std::fprintf(stderr, "%s\n", p.c_str());
    return exit_failed;
  }
  const auto cfg = myo::bench::resolve(kv);

  myo::bench::BenchReport rep;
  try {
    rep = myo::bench::run_bench(cfg, [](const myo::bench::RunResult& rr) {
      std::printf("run %d %s: dofs=%d steps=%zu newton=%ld linear=%ld %.2fs %s\n", rr.id,
                  format_overrides(rr.overrides).c_str(), rr.n_dofs, rr.steps.size(),
                  rr.aggregates.total_newton_iters, rr.aggregates.total_linear_iters,
                  rr.aggregates.total_seconds, rr.ok ? "ok" : rr.failure.c_str());
      std::fflush(stdout);
    });
  } catch (const std::exception& e) {
    std::fprintf(stderr, "run failed: %s\n", e.what());
    return exit_failed;
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::fprintf(stderr, "cannot create %s: %s\n", out_dir.c_str(), ec.message().c_str());
    return exit_usage;
  }
  const std::string base = out_dir + "/report";
  try {
    if (format.empty() || format == "json") {
      myo::bench::write_report_json(rep, base + ".json");
      std::printf("wrote %s.json\n", base.c_str());
    }
    if (format.empty() || format == "csv") {
      myo::bench::write_report_csv(rep, base + ".csv");
      std::printf("wrote %s.csv\n", base.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return exit_usage;
  }

  bool all_ok = !rep.runs.empty();
  std::printf("\n%-4s %-8s %-5s %-7s %-7s %-7s %-6s %-8s %s\n", "run", "dofs", "subs", "solver",
              "newton", "linear", "mean", "seconds", "status");
  for (const auto& rr : rep.runs) {
    std::printf("%-4d %-8d %-5d %-7s %-7ld %-7ld %-6.1f %-8.2f %s\n", rr.id, rr.n_dofs,
                rr.n_subdomains, rr.solver.c_str(), rr.aggregates.total_newton_iters,
                rr.aggregates.total_linear_iters, rr.aggregates.mean_linear_per_newton,
                rr.aggregates.total_seconds, rr.ok ? "ok" : rr.failure.c_str());
    all_ok = all_ok && rr.ok;
  }
  return all_ok ? exit_ok : exit_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cardiac mechanics solver benchmarks"};
  app.require_subcommand(1);

  std::string run_config, out_dir = "bench_out", format;
  std::vector<std::string> sets;
  auto* run = app.add_subcommand("run", "run the benchmark a config file describes");
  run->add_option("config", run_config, "config file")->required();
  run->add_option("--set", sets, "override one key, as key=value (repeatable)");
  run->add_option("--out", out_dir, "output directory (default bench_out)");
  run->add_option("--format", format, "write only this report format")
      ->check(CLI::IsMember({"csv", "json"}));

  std::string verify_config;
  auto* verify = app.add_subcommand("verify", "check a config file and list every problem");
  verify->add_option("config", verify_config, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  if (*verify) return cmd_verify(verify_config);
  return cmd_run(run_config, sets, out_dir, format);
}
