#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "myosolve/timestepper.hpp"

namespace myo::bench {

/// One configuration key: its value type, default, and (for choices) the
/// admissible spellings.
struct KeySpec {
  enum class Kind { integer, real, boolean, choice, text };
  std::string name;
  Kind kind = Kind::text;
  std::string def;
  std::vector<std::string> allowed;
};

const std::vector<KeySpec>& key_registry();
const KeySpec* find_key(const std::string& name);

/// Flat dotted-key configuration. Every registered key is present once
/// resolved; `sweep.*` entries ride along untyped.
struct Config {
  std::map<std::string, std::string> values;

  const std::string& str(const std::string& key) const;
  long integer(const std::string& key) const;
  double real(const std::string& key) const;
  bool boolean(const std::string& key) const;
};

Config default_config();

/// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
/// Malformed lines are reported with their line number and do not abort the
/// scan.
std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     std::vector<std::string>& errors);
std::map<std::string, std::string> load_config_file(const std::string& path,
                                                    std::vector<std::string>& errors);

/// Every problem with the overrides at once: unknown keys, values that do not
/// parse as their key's type, malformed or oversized sweeps. Empty means
/// valid.
std::vector<std::string> validate(const std::map<std::string, std::string>& kv);

/// Defaults overlaid with the (validated) overrides.
Config resolve(const std::map<std::string, std::string>& kv);

inline constexpr int max_sweep_runs = 64;

/// Cartesian expansion of the `sweep.<key> = a, b, c` entries into per-run
/// override sets, in key order. A config without sweeps yields one empty set.
std::vector<std::map<std::string, std::string>> expand_sweeps(const Config& cfg,
                                                              std::vector<std::string>& errors);

/// A config turned into live objects. `prob` points into the sibling members,
/// so instances are pinned to the heap.
struct ResolvedCase {
  HexMesh mesh;
  Partition part;
  DofMap dofs;
  Problem prob;
  TransientOptions opts;
};

std::unique_ptr<ResolvedCase> build_case(const Config& cfg);

struct RunAggregates {
  long total_newton_iters = 0;
  long total_linear_iters = 0;
  double mean_linear_per_newton = 0.0;  // over the Newton iterations that ran a solve
  long max_linear_iters = 0;
  double total_seconds = 0.0;
};

RunAggregates compute_aggregates(const std::vector<StepRecord>& steps);

struct RunResult {
  int id = 0;
  std::map<std::string, std::string> overrides;
  bool ok = false;
  std::string failure;
  index_t n_dofs = 0;
  index_t n_subdomains = 0;
  std::string solver;
  std::vector<StepRecord> steps;
  RunAggregates aggregates;
};

struct BenchReport {
  int schema_version = 1;
  std::string name;
  std::map<std::string, std::string> config;
  std::vector<RunResult> runs;
};

using ProgressFn = std::function<void(const RunResult&)>;

/// Builds and runs every sweep combination. Failures are recorded per run and
/// do not stop the remaining runs.
BenchReport run_bench(const Config& cfg, const ProgressFn& progress = {});

void write_report_json(const BenchReport& rep, const std::string& path);
std::string report_json_string(const BenchReport& rep);

/// One row per (run, step): run, step, time, newton_iters, linear_iters,
/// seconds. Linear iterations are the step's total over its Newton
/// iterations.
void write_report_csv(const BenchReport& rep, const std::string& path);

/// Reads a report back, recomputing every run's aggregates from its steps.
/// Throws on a schema or aggregate mismatch.
BenchReport load_report_json(const std::string& path);

}  // namespace myo::bench
