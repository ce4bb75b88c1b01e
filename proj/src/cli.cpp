#include "ptds/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "ptds/analysis.hpp"
#include "ptds/errors.hpp"
#include "ptds/integrator.hpp"
#include "ptds/projection.hpp"
#include "ptds/rng.hpp"
#include "ptds/scenarios.hpp"
#include "ptds/tangent.hpp"

namespace ptds {
namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// JSON has no infinity literal; ratio reports keep "inf" as a string.
Json finite_or_label(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

double parse_double(const std::string& tok, const char* what) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw ConfigError(std::string(what) + ": cannot parse number \"" + tok + "\"");
  return v;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  size_t pos = 0;
  while (true) {
    size_t comma = text.find(',', pos);
    std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                  : comma - pos);
    out.push_back(parse_double(tok, what));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

Eigen::VectorXd to_vec(const std::vector<double>& v) {
  Eigen::VectorXd x(v.size());
  for (size_t i = 0; i < v.size(); ++i) x(i) = v[i];
  return x;
}

Eigen::VectorXd vec_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw ConfigError(std::string(what) + ": expected a non-empty array of numbers");
  Eigen::VectorXd x(j.size());
  for (size_t i = 0; i < j.size(); ++i) x(i) = j[i].get<double>();
  return x;
}

Json json_vec(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json json_matrix(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) rows.push_back(json_vec(m.row(r).transpose()));
  return rows;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

void write_json_file(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

/// Options shared by every subcommand, with config-file fallback. Explicit
/// flags beat config values; config values beat scenario defaults.
struct Common {
  std::string scenario;
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 1;
  CLI::Option* scenario_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  Json config = Json::object();

  void attach(CLI::App* cmd, bool with_scenario) {
    if (with_scenario)
      scenario_opt = cmd->add_option("--scenario", scenario,
                                     "built-in scenario (wedge, parabola, two-bus, disk, "
                                     "saturated-flow, moving-wall)");
    cmd->add_option("--config", config_path, "JSON config or manifest to run from");
    cmd->add_option("--out", out_dir, "output directory (created if missing)");
    seed_opt = cmd->add_option("--seed", seed, "seed for every random draw");
    threads_opt = cmd->add_option("--threads", threads, "threads for independent sample loops");
  }

  void load(const char* command) {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config \"" + config_path + "\"");
      try {
        in >> config;
      } catch (const Json::parse_error& e) {
        throw ConfigError("config " + config_path + ": " + e.what());
      }
      if (!config.is_object())
        throw ConfigError("config " + config_path + ": root must be an object");
      if (config.contains("command") && config.at("command").get<std::string>() != command)
        throw ConfigError("config is for command \"" +
                          config.at("command").get<std::string>() + "\", not \"" +
                          std::string(command) + "\"");
    }
    if (scenario_opt && scenario_opt->count() == 0 && config.contains("scenario"))
      scenario = config.at("scenario").get<std::string>();
    if (seed_opt->count() == 0 && config.contains("seed"))
      seed = config.at("seed").get<std::uint64_t>();
    if (threads_opt->count() == 0 && config.contains("threads"))
      threads = config.at("threads").get<int>();
    if (threads < 1 || threads > 64) throw ConfigError("--threads must lie in [1, 64]");
  }

  double number(const CLI::Option* opt, double flag_value, const char* key,
                double fallback) const {
    if (opt && opt->count() > 0) return flag_value;
    if (config.contains(key)) return config.at(key).get<double>();
    return fallback;
  }

  int integer(const CLI::Option* opt, int flag_value, const char* key, int fallback) const {
    if (opt && opt->count() > 0) return flag_value;
    if (config.contains(key)) return config.at(key).get<int>();
    return fallback;
  }

  std::string text(const CLI::Option* opt, const std::string& flag_value, const char* key,
                   const std::string& fallback) const {
    if (opt && opt->count() > 0) return flag_value;
    if (config.contains(key)) return config.at(key).get<std::string>();
    return fallback;
  }

  Eigen::VectorXd vector(const CLI::Option* opt, const std::string& flag_value, const char* key,
                         const Eigen::VectorXd& fallback) const {
    if (opt && opt->count() > 0) return to_vec(parse_list(flag_value, key));
    if (config.contains(key)) return vec_from_json(config.at(key), key);
    return fallback;
  }

  std::vector<double> list(const CLI::Option* opt, const std::string& flag_value,
                           const char* key, const std::vector<double>& fallback) const {
    if (opt && opt->count() > 0) return parse_list(flag_value, key);
    if (config.contains(key)) {
      std::vector<double> out;
      for (const auto& v : config.at(key)) out.push_back(v.get<double>());
      return out;
    }
    return fallback;
  }

  Scenario resolve_scenario() const {
    if (scenario.empty())
      throw ConfigError("a scenario is required (--scenario or config \"scenario\")");
    Scenario s = make_scenario(scenario, config.value("params", Json::object()));
    Json tols = config.value("tolerances", Json::object());
    for (const auto& [key, value] : tols.items()) {
      if (key == "tau_feas") s.domain.tol.tau_feas = value.get<double>();
      else if (key == "tau_act") s.domain.tol.tau_act = value.get<double>();
      else throw ConfigError("tolerances: unknown key \"" + key + "\"");
    }
    return s;
  }

  Json manifest_base(const char* command, const Scenario& s) const {
    Json m;
    m["command"] = command;
    m["scenario"] = s.name;
    m["seed"] = seed;
    m["threads"] = threads;
    m["tolerances"] =
        Json{{"tau_feas", s.domain.tol.tau_feas}, {"tau_act", s.domain.tol.tau_act}};
    if (!s.params.empty()) m["params"] = s.params;
    return m;
  }

  fs::path prepare_out() const {
    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string());
    return dir;
  }
};

struct ConeArgs {
  Common common;
  std::string x_str;
  double t = 0.0;
  CLI::Option *x_opt = nullptr, *t_opt = nullptr;
};

int cmd_cone(ConeArgs& a) {
  a.common.load("cone");
  Scenario s = a.common.resolve_scenario();
  Eigen::VectorXd x = a.common.vector(a.x_opt, a.x_str, "x", s.x0);
  double t = a.common.number(a.t_opt, a.t, "t", s.t0);
  if (x.size() != s.domain.dim) throw ConfigError("x has the wrong dimension for the scenario");

  Json manifest = a.common.manifest_base("cone", s);
  manifest["x"] = json_vec(x);
  manifest["t"] = t;

  PolyhedronUnion u = temporal_tangent_union(s.domain, x, t);

  bool all_empty = true;
  Json members = Json::array();
  for (const auto& m : u.members) {
    Json mem;
    mem["piece"] = m.active.piece_index + 1;
    mem["name"] = s.domain.pieces[m.active.piece_index].name;
    mem["status"] = qual_status_name(m.qualification.status);
    mem["rank"] = m.qualification.rank;
    mem["active_row_count"] = m.qualification.active_row_count;
    mem["A"] = json_matrix(m.sys.A);
    mem["b"] = json_vec(m.sys.b);
    mem["E"] = json_matrix(m.sys.E);
    mem["e"] = json_vec(m.sys.e);
    if (m.qualification.status != QualStatus::Empty) all_empty = false;
    members.push_back(std::move(mem));
  }

  Json out;
  out["scenario"] = s.name;
  out["x"] = json_vec(x);
  out["t"] = t;
  out["members"] = std::move(members);
  out["tangent_union_empty"] = all_empty;

  fs::path dir = a.common.prepare_out();
  write_json_file(dir / "cone.json", out);
  write_json_file(dir / "manifest.json", manifest);
  std::cout << "cone: " << u.members.size() << " member(s) -> " << (dir / "cone.json").string()
            << (all_empty ? "  [warning: tangent union is empty]" : "") << "\n";
  return 0;
}

struct CertifyArgs {
  Common common;
  double t = 0.0;
  int samples = 200;
  double bias = 0.8;
  std::string deltas_str, box_lo_str, box_hi_str;
  CLI::Option *t_opt = nullptr, *samples_opt = nullptr, *bias_opt = nullptr,
              *deltas_opt = nullptr, *box_lo_opt = nullptr, *box_hi_opt = nullptr;
};

int cmd_certify(CertifyArgs& a) {
  a.common.load("certify");
  Scenario s = a.common.resolve_scenario();

  double t = a.common.number(a.t_opt, a.t, "t", s.certify_t);
  int samples = a.common.integer(a.samples_opt, a.samples, "samples", 200);
  double bias = a.common.number(a.bias_opt, a.bias, "boundary_bias", 0.8);
  std::vector<double> deltas =
      a.common.list(a.deltas_opt, a.deltas_str, "deltas", {1e-1, 1e-2, 1e-3, 1e-4});
  Eigen::VectorXd box_lo = a.common.vector(a.box_lo_opt, a.box_lo_str, "box_lo", s.box_lo);
  Eigen::VectorXd box_hi = a.common.vector(a.box_hi_opt, a.box_hi_str, "box_hi", s.box_hi);
  if (samples < 1) throw ConfigError("samples must be positive");
  if (bias < 0.0 || bias > 1.0) throw ConfigError("boundary_bias must lie in [0, 1]");

  Json manifest = a.common.manifest_base("certify", s);
  manifest["t"] = t;
  manifest["samples"] = samples;
  manifest["boundary_bias"] = bias;
  manifest["deltas"] = deltas;
  manifest["box_lo"] = json_vec(box_lo);
  manifest["box_hi"] = json_vec(box_hi);

  SamplerSpec sampler;
  sampler.count = samples;
  sampler.boundary_bias = bias;
  sampler.seed = a.common.seed;
  sampler.box_lo = box_lo;
  sampler.box_hi = box_hi;
  sampler.anchors = s.anchors;

  CertifyOptions copts;
  copts.deltas = deltas;
  copts.threads = a.common.threads;
  LipschitzProfile prof = forward_lipschitz_profile(s.domain, t, sampler, copts);

  Json report;
  report["scenario"] = s.name;
  report["t"] = prof.t;
  report["verdict"] = verdict_name(prof.verdict);
  report["l_hat"] = prof.l_hat;
  report["slope"] = prof.slope;
  report["horizon"] = prof.horizon;
  report["failures"] = prof.failures;
  report["samples"] = int(prof.points.size());
  report["deltas"] = prof.deltas;
  Json maxr = Json::array();
  for (double m : prof.max_ratio_per_delta) maxr.push_back(finite_or_label(m));
  report["max_ratio_per_delta"] = std::move(maxr);

  std::string csv = "point_id,delta,ratio\n";
  for (size_t p = 0; p < prof.points.size(); ++p)
    for (size_t d = 0; d < prof.deltas.size(); ++d)
      csv += std::to_string(p) + "," + num(prof.deltas[d]) + "," +
             num(prof.ratios(int(p), int(d))) + "\n";

  fs::path dir = a.common.prepare_out();
  write_json_file(dir / "profile.json", report);
  write_text(dir / "ratios.csv", csv);
  write_json_file(dir / "manifest.json", manifest);
  std::cout << "certify: verdict " << verdict_name(prof.verdict) << ", l_hat " << num(prof.l_hat)
            << ", slope " << num(prof.slope) << " -> " << (dir / "profile.json").string() << "\n";
  return prof.verdict == Verdict::Divergent ? 3 : 0;
}

struct SimulateArgs {
  Common common;
  std::string x0_str, scheme_str = "CATCHING_UP";
  double t0 = 0.0, t_end = 0.0, dt = 0.0;
  CLI::Option *x0_opt = nullptr, *t0_opt = nullptr, *t_end_opt = nullptr, *dt_opt = nullptr,
              *scheme_opt = nullptr;
};

int cmd_simulate(SimulateArgs& a) {
  a.common.load("simulate");
  Scenario s = a.common.resolve_scenario();

  Eigen::VectorXd x0 = a.common.vector(a.x0_opt, a.x0_str, "x0", s.x0);
  double t0 = a.common.number(a.t0_opt, a.t0, "t0", s.t0);
  double t_end = a.common.number(a.t_end_opt, a.t_end, "t_end", s.t_end);
  double dt = a.common.number(a.dt_opt, a.dt, "dt", s.dt);
  Scheme scheme = scheme_from_name(
      a.common.text(a.scheme_opt, a.scheme_str, "scheme", "CATCHING_UP"));
  if (x0.size() != s.domain.dim) throw ConfigError("x0 has the wrong dimension for the scenario");

  Json manifest = a.common.manifest_base("simulate", s);
  manifest["x0"] = json_vec(x0);
  manifest["t0"] = t0;
  manifest["t_end"] = t_end;
  manifest["dt"] = dt;
  manifest["scheme"] = scheme_name(scheme);

  IntegratorOptions iopts;
  iopts.scheme = scheme;
  iopts.dt = dt;
  SimulationResult res = simulate(s.domain, s.field, x0, t0, t_end, iopts);
  const Trajectory& traj = res.trajectory;

  std::string csv = "t";
  for (int i = 1; i <= s.domain.dim; ++i) csv += ",x" + std::to_string(i);
  csv += ",piece,feas_residual,speed\n";
  for (int k = 0; k < traj.size(); ++k) {
    csv += num(traj.times[k]);
    for (int i = 0; i < s.domain.dim; ++i) csv += "," + num(traj.states[k](i));
    csv += "," + std::to_string(traj.pieces[k] + 1);
    csv += "," + num(traj.feas_residuals[k]);
    csv += "," + num(traj.speeds[k]) + "\n";
  }

  double max_speed = 0.0, max_res = 0.0;
  for (int k = 0; k < traj.size(); ++k) {
    max_speed = std::max(max_speed, traj.speeds[k]);
    max_res = std::max(max_res, traj.feas_residuals[k]);
  }
  Json transitions = Json::array();
  for (int k = 1; k < traj.size(); ++k)
    if (traj.pieces[k] != traj.pieces[k - 1])
      transitions.push_back(Json{{"step", k},
                                 {"time", traj.times[k]},
                                 {"from", traj.pieces[k - 1] + 1},
                                 {"to", traj.pieces[k] + 1}});

  Json summary;
  summary["scenario"] = s.name;
  summary["scheme"] = scheme_name(scheme);
  summary["dt"] = dt;
  summary["t0"] = t0;
  summary["t_end"] = t_end;
  summary["nodes"] = traj.size();
  summary["max_speed"] = max_speed;
  summary["max_feas_residual"] = max_res;
  summary["transitions"] = std::move(transitions);
  summary["aborted"] = res.aborted;
  if (res.aborted) {
    summary["abort_step"] = res.abort_step;
    summary["error"] = res.error;
  }
  if (traj.size() > 0) {
    summary["t_final"] = traj.times.back();
    summary["x_final"] = json_vec(traj.states.back());
  }

  fs::path dir = a.common.prepare_out();
  write_text(dir / "trajectory.csv", csv);
  write_json_file(dir / "summary.json", summary);
  write_json_file(dir / "manifest.json", manifest);

  if (res.aborted) {
    std::cerr << "simulation aborted at step " << res.abort_step << ": " << res.error << "\n";
    return 4;
  }
  std::cout << "simulate: " << traj.size() << " nodes, max speed " << num(max_speed) << " -> "
            << (dir / "trajectory.csv").string() << "\n";
  return 0;
}

struct OracleArgs {
  Common common;
  int instances = 50;
  double resolution = 1e-3;
  CLI::Option *instances_opt = nullptr, *resolution_opt = nullptr;
};

int cmd_oracle_compare(OracleArgs& a) {
  a.common.load("oracle-compare");
  int instances = a.common.integer(a.instances_opt, a.instances, "instances", 50);
  double resolution = a.common.number(a.resolution_opt, a.resolution, "resolution", 1e-3);
  if (instances < 1) throw ConfigError("instances must be positive");
  if (resolution <= 0.0) throw ConfigError("resolution must be positive");

  Json manifest;
  manifest["command"] = "oracle-compare";
  manifest["seed"] = a.common.seed;
  manifest["threads"] = a.common.threads;
  manifest["instances"] = instances;
  manifest["resolution"] = resolution;

  struct Row {
    int dim = 0;
    double solver = 0.0, oracle = 0.0;
  };
  std::vector<Row> rows(instances);
  std::vector<std::string> errors(instances);

  auto work = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      try {
        int dim = 2 + (i % 2);
        PolyhedralInstance inst = random_polyhedron_instance(dim, derive_seed(a.common.seed, i));
        ProjectionResult solver = project_to_set(inst.query, inst.domain, 0.0);
        OracleResult oracle =
            oracle_project(inst.query, inst.domain, 0.0, inst.box_lo, inst.box_hi, resolution);
        rows[i] = Row{dim, solver.distance, oracle.distance};
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  int threads = std::max(1, std::min(a.common.threads, instances));
  if (threads == 1) {
    work(0, instances);
  } else {
    std::vector<std::thread> pool;
    int chunk = (instances + threads - 1) / threads;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back(work, std::min(w * chunk, instances),
                        std::min((w + 1) * chunk, instances));
    for (auto& th : pool) th.join();
  }
  for (int i = 0; i < instances; ++i)
    if (!errors[i].empty())
      throw ConvergenceError("instance " + std::to_string(i) + ": " + errors[i]);

  std::string csv = "instance_id,dim,solver_distance,oracle_distance,gap\n";
  double max_gap = 0.0;
  for (int i = 0; i < instances; ++i) {
    double gap = std::abs(rows[i].solver - rows[i].oracle);
    max_gap = std::max(max_gap, gap);
    csv += std::to_string(i) + "," + std::to_string(rows[i].dim) + "," + num(rows[i].solver) +
           "," + num(rows[i].oracle) + "," + num(gap) + "\n";
  }

  fs::path dir = a.common.prepare_out();
  write_text(dir / "gaps.csv", csv);
  write_json_file(dir / "manifest.json", manifest);
  std::cout << "oracle-compare: " << instances << " instances, max gap " << num(max_gap)
            << " -> " << (dir / "gaps.csv").string() << "\n";
  return 0;
}

} // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"projected dynamics on time-varying piecewise-smooth domains"};
  app.require_subcommand(1);

  ConeArgs cone;
  CLI::App* cone_cmd =
      app.add_subcommand("cone", "feasible-velocity polyhedra at a point and time");
  cone.common.attach(cone_cmd, true);
  cone.x_opt = cone_cmd->add_option("--x", cone.x_str, "query point, comma separated");
  cone.t_opt = cone_cmd->add_option("--t", cone.t, "query time");

  CertifyArgs certify;
  CLI::App* certify_cmd =
      app.add_subcommand("certify", "sample displacement ratios and grade the domain");
  certify.common.attach(certify_cmd, true);
  certify.t_opt = certify_cmd->add_option("--t", certify.t, "base time");
  certify.samples_opt = certify_cmd->add_option("--samples", certify.samples, "sample count");
  certify.bias_opt =
      certify_cmd->add_option("--bias", certify.bias, "fraction of samples on the boundary");
  certify.deltas_opt =
      certify_cmd->add_option("--deltas", certify.deltas_str, "probe offsets, comma separated");
  certify.box_lo_opt =
      certify_cmd->add_option("--box-lo", certify.box_lo_str, "sampling box lower corner");
  certify.box_hi_opt =
      certify_cmd->add_option("--box-hi", certify.box_hi_str, "sampling box upper corner");

  SimulateArgs simulate;
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "time-step the projected dynamics");
  simulate.common.attach(simulate_cmd, true);
  simulate.x0_opt = simulate_cmd->add_option("--x0", simulate.x0_str, "start state");
  simulate.t0_opt = simulate_cmd->add_option("--t0", simulate.t0, "start time");
  simulate.t_end_opt = simulate_cmd->add_option("--t-end", simulate.t_end, "end time");
  simulate.dt_opt = simulate_cmd->add_option("--dt", simulate.dt, "step size");
  simulate.scheme_opt = simulate_cmd->add_option(
      "--scheme", simulate.scheme_str, "CATCHING_UP (default) or TANGENT_EULER");

  OracleArgs oracle;
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle-compare", "projection solver against the brute-force grid oracle");
  oracle.common.attach(oracle_cmd, false);
  oracle.instances_opt =
      oracle_cmd->add_option("--instances", oracle.instances, "random instance count");
  oracle.resolution_opt =
      oracle_cmd->add_option("--resolution", oracle.resolution, "oracle grid spacing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
    std::cerr << "argument error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (cone_cmd->parsed()) return cmd_cone(cone);
    if (certify_cmd->parsed()) return cmd_certify(certify);
    if (simulate_cmd->parsed()) return cmd_simulate(simulate);
    if (oracle_cmd->parsed()) return cmd_oracle_compare(oracle);
    std::cerr << "no subcommand given\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const EmptyTangentError& e) {
    std::cerr << "aborted: " << e.what() << "\n";
    return 4;
  } catch (const ConvergenceError& e) {
    std::cerr << "aborted: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace ptds
