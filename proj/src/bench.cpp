#include "myosolve/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace myo::bench {

namespace {

using Kind = KeySpec::Kind;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_long(const std::string& s, long& out) {
  char* end = nullptr;
  out = std::strtol(s.c_str(), &end, 10);
  return end != s.c_str() && *end == '\0';
}

bool parse_double(const std::string& s, double& out) {
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end != s.c_str() && *end == '\0';
}

// empty string when the value fits the key's schema, otherwise the complaint
std::string check_value(const KeySpec& spec, const std::string& v) {
  switch (spec.kind) {
    case Kind::integer: {
      long x;
      if (!parse_long(v, x)) return "'" + v + "' is not an integer";
      return "";
    }
    case Kind::real: {
      double x;
      if (!parse_double(v, x)) return "'" + v + "' is not a number";
      return "";
    }
    case Kind::boolean:
      if (v != "true" && v != "false") return "'" + v + "' is not true/false";
      return "";
    case Kind::choice: {
      if (std::find(spec.allowed.begin(), spec.allowed.end(), v) != spec.allowed.end()) return "";
      std::string opts;
      for (const auto& a : spec.allowed) opts += (opts.empty() ? "" : "|") + a;
      return "'" + v + "' is not one of " + opts;
    }
    case Kind::text:
      return "";
  }
  return "";
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> items;
  std::string cur;
  std::stringstream ss(v);
  while (std::getline(ss, cur, ',')) items.push_back(trim(cur));
  if (!v.empty() && v.back() == ',') items.push_back("");
  return items;
}

}  // namespace

const std::vector<KeySpec>& key_registry() {
  static const std::vector<KeySpec> reg = {
      {"bench.name", Kind::text, "bench", {}},
      {"mesh.kind", Kind::choice, "beam", {"beam", "ellipsoid"}},
      {"mesh.nx", Kind::integer, "8", {}},
      {"mesh.ny", Kind::integer, "2", {}},
      {"mesh.nz", Kind::integer, "2", {}},
      {"mesh.lx", Kind::real, "10", {}},
      {"mesh.ly", Kind::real, "1", {}},
      {"mesh.lz", Kind::real, "1", {}},
      {"mesh.circ", Kind::integer, "12", {}},
      {"mesh.trans", Kind::integer, "2", {}},
      {"mesh.api", Kind::integer, "8", {}},
      {"fem.order", Kind::choice, "1", {"1", "2"}},
      {"partition.method", Kind::choice, "structured", {"structured", "rcb"}},
      {"partition.subdomains", Kind::integer, "4", {}},
      {"partition.px", Kind::integer, "2", {}},
      {"partition.py", Kind::integer, "1", {}},
      {"partition.pz", Kind::integer, "1", {}},
      {"time.dt", Kind::real, "1e-3", {}},
      {"time.steps", Kind::integer, "3", {}},
      {"solver.type", Kind::choice, "bddc", {"bddc", "amg"}},
      {"solver.rtol", Kind::real, "1e-8", {}},
      {"solver.restart", Kind::integer, "200", {}},
      {"solver.max_iters", Kind::integer, "2000", {}},
      {"solver.freeze", Kind::boolean, "false", {}},
      {"newton.abs_tol", Kind::real, "1e-9", {}},
      {"newton.rel_tol", Kind::real, "1e-6", {}},
      {"newton.max_iters", Kind::integer, "25", {}},
      {"bddc.primal", Kind::choice, "vef", {"v", "ve", "ef", "vef", "full"}},
      {"bddc.levels", Kind::integer, "2", {}},
      {"bddc.coarsening", Kind::integer, "8", {}},
      {"amg.strength_eps", Kind::real, "0.08", {}},
      {"amg.signed_strength", Kind::boolean, "false", {}},
      {"amg.smooth_prolongator", Kind::boolean, "false", {}},
      {"amg.smoother", Kind::choice, "sgs", {"sgs", "bjacobi"}},
      {"amg.jacobi_omega", Kind::real, "0.6666666666666666", {}},
      {"load.pressure", Kind::real, "0", {}},
      {"load.pressure_ramp", Kind::real, "0.1", {}},
      {"load.gamma", Kind::real, "0", {}},
      {"load.gamma_ramp", Kind::real, "0.25", {}},
      {"material.c", Kind::real, "2000", {}},
      {"material.bulk", Kind::real, "50000", {}},
      {"material.rho", Kind::real, "1000", {}},
      {"material.b_ff", Kind::real, "8", {}},
      {"material.b_ss", Kind::real, "2", {}},
      {"material.b_nn", Kind::real, "2", {}},
      {"material.b_fs", Kind::real, "4", {}},
      {"material.b_fn", Kind::real, "4", {}},
      {"material.b_sn", Kind::real, "2", {}},
      {"robin.base.k_perp", Kind::real, "0", {}},
      {"robin.base.k_par", Kind::real, "0", {}},
      {"robin.base.c_perp", Kind::real, "0", {}},
      {"robin.base.c_par", Kind::real, "0", {}},
      {"robin.epi.k_perp", Kind::real, "0", {}},
      {"robin.epi.k_par", Kind::real, "0", {}},
      {"robin.epi.c_perp", Kind::real, "0", {}},
      {"robin.epi.c_par", Kind::real, "0", {}},
      {"pressure.follower", Kind::boolean, "true", {}},
  };
  return reg;
}

const KeySpec* find_key(const std::string& name) {
  for (const auto& k : key_registry())
    if (k.name == name) return &k;
  return nullptr;
}

const std::string& Config::str(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw std::invalid_argument("config: no key " + key);
  return it->second;
}

long Config::integer(const std::string& key) const {
  long x;
  if (!parse_long(str(key), x)) throw std::invalid_argument("config: bad integer at " + key);
  return x;
}

double Config::real(const std::string& key) const {
  double x;
  if (!parse_double(str(key), x)) throw std::invalid_argument("config: bad number at " + key);
  return x;
}

bool Config::boolean(const std::string& key) const { return str(key) == "true"; }

Config default_config() {
  Config cfg;
  for (const auto& k : key_registry()) cfg.values[k.name] = k.def;
  return cfg;
}

std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     std::vector<std::string>& errors) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) {
      errors.push_back("line " + std::to_string(lineno) + ": empty key");
      continue;
    }
    kv[key] = val;
  }
  return kv;
}

std::map<std::string, std::string> load_config_file(const std::string& path,
                                                    std::vector<std::string>& errors) {
  std::ifstream in(path);
  if (!in) {
    errors.push_back("cannot open " + path);
    return {};
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), errors);
}

std::vector<std::string> validate(const std::map<std::string, std::string>& kv) {
  std::vector<std::string> problems;
  long n_runs = 1;
  for (const auto& [key, val] : kv) {
    if (key.rfind("sweep.", 0) == 0) {
      const std::string target = key.substr(6);
      const KeySpec* spec = find_key(target);
      if (!spec) {
        problems.push_back(key + ": unknown sweep target '" + target + "'");
        continue;
      }
      const auto items = split_list(val);
      if (items.empty() || (items.size() == 1 && items[0].empty())) {
        problems.push_back(key + ": empty sweep list");
        continue;
      }
      bool bad = false;
      for (const auto& item : items) {
        const std::string err = check_value(*spec, item);
        if (!err.empty()) {
          problems.push_back(key + ": " + err);
          bad = true;
        }
      }
      if (!bad) n_runs *= static_cast<long>(items.size());
      continue;
    }
    const KeySpec* spec = find_key(key);
    if (!spec) {
      problems.push_back("unknown key '" + key + "'");
      continue;
    }
    const std::string err = check_value(*spec, val);
    if (!err.empty()) problems.push_back(key + ": " + err);
  }
  if (n_runs > max_sweep_runs)
    problems.push_back("sweep expands to " + std::to_string(n_runs) + " runs, limit is " +
                       std::to_string(max_sweep_runs));
  return problems;
}

Config resolve(const std::map<std::string, std::string>& kv) {
  Config cfg = default_config();
  for (const auto& [key, val] : kv) cfg.values[key] = val;
  return cfg;
}

std::vector<std::map<std::string, std::string>> expand_sweeps(const Config& cfg,
                                                              std::vector<std::string>& errors) {
  std::vector<std::pair<std::string, std::vector<std::string>>> sweeps;
  for (const auto& [key, val] : cfg.values)
    if (key.rfind("sweep.", 0) == 0) sweeps.emplace_back(key.substr(6), split_list(val));

  std::vector<std::map<std::string, std::string>> runs{{}};
  for (const auto& [target, items] : sweeps) {
    std::vector<std::map<std::string, std::string>> next;
    next.reserve(runs.size() * items.size());
    for (const auto& base : runs)
      for (const auto& item : items) {
        auto ov = base;
        ov[target] = item;
        next.push_back(std::move(ov));
      }
    runs = std::move(next);
    if (runs.size() > static_cast<std::size_t>(max_sweep_runs)) {
      errors.push_back("sweep expands past the " + std::to_string(max_sweep_runs) + " run limit");
      return {};
    }
  }
  return runs;
}

std::unique_ptr<ResolvedCase> build_case(const Config& cfg) {
  auto rc = std::make_unique<ResolvedCase>();

  if (cfg.str("mesh.kind") == "beam") {
    rc->mesh = build_beam_mesh(static_cast<index_t>(cfg.integer("mesh.nx")),
                               static_cast<index_t>(cfg.integer("mesh.ny")),
                               static_cast<index_t>(cfg.integer("mesh.nz")), cfg.real("mesh.lx"),
                               cfg.real("mesh.ly"), cfg.real("mesh.lz"));
  } else {
    rc->mesh = build_ellipsoid_mesh(static_cast<index_t>(cfg.integer("mesh.circ")),
                                    static_cast<index_t>(cfg.integer("mesh.trans")),
                                    static_cast<index_t>(cfg.integer("mesh.api")));
  }

  if (cfg.str("partition.method") == "structured") {
    rc->part = partition_structured(rc->mesh, static_cast<index_t>(cfg.integer("partition.px")),
                                    static_cast<index_t>(cfg.integer("partition.py")),
                                    static_cast<index_t>(cfg.integer("partition.pz")));
  } else {
    rc->part = partition_rcb(rc->mesh, static_cast<index_t>(cfg.integer("partition.subdomains")));
  }

  rc->dofs = build_dofmap(rc->mesh, rc->part, static_cast<int>(cfg.integer("fem.order")));

  rc->prob.mesh = &rc->mesh;
  rc->prob.partition = &rc->part;
  rc->prob.dofs = &rc->dofs;
  rc->prob.material.C = cfg.real("material.c");
  rc->prob.material.B = cfg.real("material.bulk");
  rc->prob.material.rho = cfg.real("material.rho");
  rc->prob.material.b_ff = cfg.real("material.b_ff");
  rc->prob.material.b_ss = cfg.real("material.b_ss");
  rc->prob.material.b_nn = cfg.real("material.b_nn");
  rc->prob.material.b_fs = cfg.real("material.b_fs");
  rc->prob.material.b_fn = cfg.real("material.b_fn");
  rc->prob.material.b_sn = cfg.real("material.b_sn");
  rc->prob.robin_base = {cfg.real("robin.base.k_perp"), cfg.real("robin.base.k_par"),
                         cfg.real("robin.base.c_perp"), cfg.real("robin.base.c_par")};
  rc->prob.robin_epi = {cfg.real("robin.epi.k_perp"), cfg.real("robin.epi.k_par"),
                        cfg.real("robin.epi.c_perp"), cfg.real("robin.epi.c_par")};
  rc->prob.follower_pressure = cfg.boolean("pressure.follower");

  rc->opts.dt = cfg.real("time.dt");
  rc->opts.n_steps = static_cast<int>(cfg.integer("time.steps"));
  rc->opts.solver = cfg.str("solver.type");
  rc->opts.bddc.primal = PrimalConfig::from_name(cfg.str("bddc.primal"));
  rc->opts.bddc.levels = static_cast<int>(cfg.integer("bddc.levels"));
  rc->opts.bddc.coarsening = static_cast<int>(cfg.integer("bddc.coarsening"));
  rc->opts.amg.strength_eps = cfg.real("amg.strength_eps");
  rc->opts.amg.signed_strength = cfg.boolean("amg.signed_strength");
  rc->opts.amg.smooth_prolongator = cfg.boolean("amg.smooth_prolongator");
  rc->opts.amg.smoother = cfg.str("amg.smoother");
  rc->opts.amg.jacobi_omega = cfg.real("amg.jacobi_omega");
  rc->opts.gmres.restart = static_cast<index_t>(cfg.integer("solver.restart"));
  rc->opts.gmres.max_iters = static_cast<index_t>(cfg.integer("solver.max_iters"));
  rc->opts.gmres.rtol = cfg.real("solver.rtol");
  rc->opts.newton.abs_tol = cfg.real("newton.abs_tol");
  rc->opts.newton.rel_tol = cfg.real("newton.rel_tol");
  rc->opts.newton.max_iters = static_cast<int>(cfg.integer("newton.max_iters"));
  rc->opts.loads.pressure_max = cfg.real("load.pressure");
  rc->opts.loads.pressure_ramp = cfg.real("load.pressure_ramp");
  rc->opts.loads.gamma_max = cfg.real("load.gamma");
  rc->opts.loads.gamma_ramp = cfg.real("load.gamma_ramp");
  rc->opts.freeze_preconditioner = cfg.boolean("solver.freeze");
  return rc;
}

RunAggregates compute_aggregates(const std::vector<StepRecord>& steps) {
  RunAggregates ag;
  long solves = 0;
  for (const auto& rec : steps) {
    ag.total_newton_iters += rec.newton.iters;
    for (int li : rec.newton.linear_iters) {
      ag.total_linear_iters += li;
      ag.max_linear_iters = std::max<long>(ag.max_linear_iters, li);
      ++solves;
    }
    ag.total_seconds += rec.seconds;
  }
  ag.mean_linear_per_newton =
      solves > 0 ? static_cast<double>(ag.total_linear_iters) / static_cast<double>(solves) : 0.0;
  return ag;
}

BenchReport run_bench(const Config& cfg, const ProgressFn& progress) {
  BenchReport rep;
  rep.name = cfg.str("bench.name");
  rep.config = cfg.values;

  std::vector<std::string> errors;
  const auto plans = expand_sweeps(cfg, errors);
  if (!errors.empty()) throw std::invalid_argument("run_bench: " + errors.front());

  for (std::size_t i = 0; i < plans.size(); ++i) {
    RunResult rr;
    rr.id = static_cast<int>(i);
    rr.overrides = plans[i];

    Config rcfg = cfg;
    for (auto it = rcfg.values.begin(); it != rcfg.values.end();)
      it = it->first.rfind("sweep.", 0) == 0 ? rcfg.values.erase(it) : std::next(it);
    for (const auto& [k, v] : plans[i]) rcfg.values[k] = v;

    try {
      const auto cs = build_case(rcfg);
      rr.n_dofs = cs->dofs.n_dofs();
      rr.n_subdomains = cs->part.n_subdomains;
      rr.solver = rcfg.str("solver.type");
      TransientResult tr = run_transient(cs->prob, cs->opts);
      rr.ok = tr.ok;
      rr.failure = tr.failure;
      rr.steps = std::move(tr.steps);
    } catch (const std::exception& e) {
      rr.ok = false;
      rr.failure = e.what();
    }
    rr.aggregates = compute_aggregates(rr.steps);
    if (progress) progress(rr);
    rep.runs.push_back(std::move(rr));
  }
  return rep;
}

namespace {

nlohmann::json to_json(const BenchReport& rep) {
  nlohmann::json j;
  j["schema_version"] = rep.schema_version;
  j["name"] = rep.name;
  j["config"] = rep.config;
  j["runs"] = nlohmann::json::array();
  for (const auto& rr : rep.runs) {
    nlohmann::json r;
    r["id"] = rr.id;
    r["overrides"] = rr.overrides;
    r["ok"] = rr.ok;
    r["failure"] = rr.failure;
    r["n_dofs"] = rr.n_dofs;
    r["n_subdomains"] = rr.n_subdomains;
    r["solver"] = rr.solver;
    r["steps"] = nlohmann::json::array();
    for (const auto& rec : rr.steps) {
      nlohmann::json s;
      s["step"] = rec.step;
      s["time"] = rec.time;
      s["seconds"] = rec.seconds;
      s["converged"] = rec.newton.converged;
      s["newton_iters"] = rec.newton.iters;
      s["residual_norms"] = rec.newton.residual_norms;
      s["linear_iters"] = rec.newton.linear_iters;
      s["linear_relres"] = rec.newton.linear_relres;
      r["steps"].push_back(std::move(s));
    }
    r["aggregates"] = {{"total_newton_iters", rr.aggregates.total_newton_iters},
                       {"total_linear_iters", rr.aggregates.total_linear_iters},
                       {"mean_linear_per_newton", rr.aggregates.mean_linear_per_newton},
                       {"max_linear_iters", rr.aggregates.max_linear_iters},
                       {"total_seconds", rr.aggregates.total_seconds}};
    j["runs"].push_back(std::move(r));
  }
  return j;
}

}  // namespace

void write_report_json(const BenchReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json(rep).dump(1) << '\n';
}

std::string report_json_string(const BenchReport& rep) { return to_json(rep).dump(1); }

void write_report_csv(const BenchReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "run,step,time,newton_iters,linear_iters,seconds\n";
  char buf[128];
  for (const auto& rr : rep.runs)
    for (const auto& rec : rr.steps) {
      long lin = 0;
      for (int li : rec.newton.linear_iters) lin += li;
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%d,%ld,%.17g\n", rr.id, rec.step, rec.time,
                    rec.newton.iters, lin, rec.seconds);
      out << buf;
    }
}

BenchReport load_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;

  BenchReport rep;
  rep.schema_version = j.at("schema_version").get<int>();
  if (rep.schema_version != 1)
    throw std::runtime_error(path + ": unsupported schema_version " +
                             std::to_string(rep.schema_version));
  rep.name = j.at("name").get<std::string>();
  rep.config = j.at("config").get<std::map<std::string, std::string>>();

  std::vector<std::string> bad;
  const auto close = [](double a, double b) {
    return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
  };
  for (const auto& r : j.at("runs")) {
    RunResult rr;
    rr.id = r.at("id").get<int>();
    rr.overrides = r.at("overrides").get<std::map<std::string, std::string>>();
    rr.ok = r.at("ok").get<bool>();
    rr.failure = r.at("failure").get<std::string>();
    rr.n_dofs = r.at("n_dofs").get<index_t>();
    rr.n_subdomains = r.at("n_subdomains").get<index_t>();
    rr.solver = r.at("solver").get<std::string>();
    for (const auto& s : r.at("steps")) {
      StepRecord rec;
      rec.step = s.at("step").get<int>();
      rec.time = s.at("time").get<double>();
      rec.seconds = s.at("seconds").get<double>();
      rec.newton.converged = s.at("converged").get<bool>();
      rec.newton.iters = s.at("newton_iters").get<int>();
      rec.newton.residual_norms = s.at("residual_norms").get<std::vector<double>>();
      rec.newton.linear_iters = s.at("linear_iters").get<std::vector<int>>();
      rec.newton.linear_relres = s.at("linear_relres").get<std::vector<double>>();
      rr.steps.push_back(std::move(rec));
    }
    rr.aggregates = compute_aggregates(rr.steps);

    const auto& ag = r.at("aggregates");
    const std::string where = "run " + std::to_string(rr.id) + " aggregates: ";
    if (ag.at("total_newton_iters").get<long>() != rr.aggregates.total_newton_iters)
      bad.push_back(where + "total_newton_iters");
    if (ag.at("total_linear_iters").get<long>() != rr.aggregates.total_linear_iters)
      bad.push_back(where + "total_linear_iters");
    if (ag.at("max_linear_iters").get<long>() != rr.aggregates.max_linear_iters)
      bad.push_back(where + "max_linear_iters");
    if (!close(ag.at("mean_linear_per_newton").get<double>(),
               rr.aggregates.mean_linear_per_newton))
      bad.push_back(where + "mean_linear_per_newton");
    if (!close(ag.at("total_seconds").get<double>(), rr.aggregates.total_seconds))
      bad.push_back(where + "total_seconds");
    rep.runs.push_back(std::move(rr));
  }
  if (!bad.empty()) {
    std::string msg = path + ": stored aggregates disagree with the steps:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw std::runtime_error(msg);
  }
  return rep;
}

}  // namespace myo::bench
