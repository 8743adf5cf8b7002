#include "fracsee/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "fracsee/config.hpp"
#include "fracsee/errors.hpp"
#include "fracsee/existence.hpp"
#include "fracsee/heat_example.hpp"
#include "fracsee/mlf.hpp"

namespace fracsee {

namespace {

using json = nlohmann::ordered_json;

json constants_json(const HypothesisConstants& c) {
  return json{{"M", c.M},           {"N1", c.N1},           {"N2_star", c.N2_star},   {"N3_star", c.N3_star},
              {"J_star", c.J_star}, {"L_k1", c.L_k1},       {"L_k2", c.L_k2},         {"l1_star", c.l1_star},
              {"l2_star", c.l2_star}, {"M_b", c.M_b},       {"l_b_star", c.l_b_star}, {"M_i", c.M_i},
              {"l_mi_star", c.l_mi_star}, {"lambda_i", c.lambda_i}, {"L_i", c.L_i}, {"lambda_h", c.lambda_h},
              {"M_h", c.M_h},       {"sup_m", c.sup_m},     {"lambda_f", c.lambda_f}, {"sup_n", c.sup_n},
              {"mho", c.mho},       {"chi_L2", c.chi_L2},   {"trace_Q", c.trace_Q},   {"a", c.a},
              {"n_impulses", c.n_impulses}, {"psi_norm", c.psi_norm}, {"xi1_sq", c.xi1_sq}};
}

json report_json(const ExistenceReport& r, const HypothesisConstants& c) {
  return json{{"delta1", r.delta1}, {"delta2", r.delta2}, {"max", r.max},     {"satisfied", r.satisfied},
              {"C0", r.C0},         {"C1", r.C1},         {"m_hat", r.m_hat}, {"constants", constants_json(c)}};
}

json error_json(const std::exception& e) {
  json j;
  if (const auto* fe = dynamic_cast<const Error*>(&e)) {
    j["error"] = fe->kind();
  } else {
    j["error"] = "InternalError";
  }
  j["message"] = e.what();
  if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
    j["line"] = pe->line();
    j["key"] = pe->key();
  }
  if (const auto* ve = dynamic_cast<const ValidationError*>(&e)) j["problems"] = ve->problems();
  if (const auto* mi = dynamic_cast<const MaxIterations*>(&e)) j["distances"] = mi->distances();
  return j;
}

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_paths;
  std::optional<double> dt;
  std::string out_dir = ".";
  std::vector<std::string> formats;
};

LoadedConfig load_with_overrides(const Overrides& o) {
  LoadedConfig cfg;
  if (o.config) {
    cfg = load_config(*o.config);
  } else {
    std::istringstream in(render_config(default_heat_config(), RunSettings{}));
    cfg = parse_config(in);
  }
  if (o.seed) cfg.run.seed = *o.seed;
  if (o.n_paths) cfg.run.n_paths = *o.n_paths;
  if (o.dt) cfg.run.dt = *o.dt;
  std::vector<std::string> problems;
  if (!(cfg.run.dt > 0.0)) problems.push_back("--dt must be > 0");
  if (cfg.run.n_paths == 0) problems.push_back("--n-paths must be >= 1");
  if (!problems.empty()) throw ValidationError(problems);
  for (auto& [k, v] : cfg.echo) {
    if (k == "run.seed") v = std::to_string(cfg.run.seed);
    if (k == "run.n_paths") v = std::to_string(cfg.run.n_paths);
    if (k == "run.dt") v = format_number(cfg.run.dt);
  }
  return cfg;
}

int cmd_check(const Overrides& o, std::ostream& out) {
  const LoadedConfig cfg = load_with_overrides(o);
  const HypothesisConstants c = resolve_constants(cfg);
  const ExistenceReport r = check_existence(c);
  out << report_json(r, c).dump(2) << "\n";
  return r.satisfied ? 0 : 1;
}

int cmd_simulate(const Overrides& o, std::ostream& out) {
  const LoadedConfig cfg = load_with_overrides(o);
  if (!cfg.has_model) throw ConfigError("simulate needs a [model] section");
  bool want_csv = o.formats.empty(), want_json = o.formats.empty();
  for (const auto& f : o.formats) {
    if (f == "csv") want_csv = true;
    else if (f == "json") want_json = true;
    else throw ConfigError("unknown output format '" + f + "' (csv, json)");
  }

  HeatExampleConfig heat = cfg.heat;
  heat.seed = cfg.run.seed;
  const ProblemSpec spec = build_spec(heat);
  const TimeGrid grid = heat_grid(heat, cfg.run.dt);
  EnsembleOptions opts;
  opts.n_paths = cfg.run.n_paths;
  opts.base_seed = cfg.run.seed;
  opts.threads = cfg.run.threads;
  opts.keep_paths = true;
  opts.picard = cfg.run.picard;
  const EnsembleStats st = simulate_ensemble(spec, grid, opts);

  std::filesystem::create_directories(o.out_dir);
  const std::filesystem::path dir(o.out_dir);
  const std::size_t n = spec.n_modes();
  if (want_csv) {
    std::ofstream csv(dir / "paths.csv", std::ios::binary);
    if (!csv) throw ConfigError("cannot write " + (dir / "paths.csv").string());
    csv << "path_id,t,branch";
    for (std::size_t m = 1; m <= n; ++m) csv << ",c_" << m;
    csv << ",norm\n";
    for (std::size_t p = 0; p < st.paths.size(); ++p) {
      const HistoryPath& path = st.paths[p];
      for (std::size_t k = 0; k < path.size(); ++k) {
        const double t = path.times()[k];
        csv << p << "," << format_number(t) << "," << classify_time(spec.schedule, t).label();
        for (std::size_t m = 0; m < n; ++m) csv << "," << format_number(path.left(k)[m]);
        csv << "," << format_number(field_norm(path.left(k))) << "\n";
      }
    }
  }
  json summary;
  json config = json::object();
  for (const auto& [k, v] : cfg.echo) config[k] = v;
  summary["config"] = config;
  summary["grid"] = json{{"a", grid.horizon()},
                         {"dt", cfg.run.dt},
                         {"n_nodes", grid.size()},
                         {"breakpoints", spec.schedule.breakpoints()}};
  summary["seed"] = cfg.run.seed;
  summary["n_paths"] = cfg.run.n_paths;
  summary["t"] = std::vector<double>(grid.nodes().begin(), grid.nodes().end());
  summary["mean_sq_norm"] = st.mean_sq_norm;
  summary["var_sq_norm"] = st.var_sq_norm;
  summary["picard"] = json{{"tol", cfg.run.picard.tol}, {"max_iter", cfg.run.picard.max_iter}, {"sweeps", st.sweeps}};
  summary["jump_counts"] = st.jump_counts;
  json gaps = json::array();
  for (const auto& path : st.paths) {
    json g = json::array();
    for (const auto& gap : branch_continuity_check(path, spec)) g.push_back(json{{"s", gap.s}, {"gap", gap.gap}});
    gaps.push_back(g);
  }
  summary["continuity_gaps"] = gaps;
  try {
    const HypothesisConstants c = resolve_constants(cfg);
    summary["existence"] = report_json(check_existence(c), c);
  } catch (const UnsupportedKernel& e) {
    summary["existence"] = json{{"unavailable", e.what()}};
  }
  if (want_json) {
    std::ofstream js(dir / "summary.json", std::ios::binary);
    if (!js) throw ConfigError("cannot write " + (dir / "summary.json").string());
    js << summary.dump(2) << "\n";
  }
  out << json{{"paths_csv", want_csv ? (dir / "paths.csv").string() : ""},
              {"summary_json", want_json ? (dir / "summary.json").string() : ""},
              {"sweeps", st.sweeps}}
             .dump()
      << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator and condition checker for fractional neutral stochastic systems", "fracsee"};
  app.require_subcommand(1);
  Overrides o;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "configuration file");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--n-paths", o.n_paths, "number of Monte Carlo paths");
    cmd->add_option("--dt", o.dt, "time step");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--format", o.formats, "output formats: csv,json")->delimiter(',');
  };
  CLI::App* simulate = app.add_subcommand("simulate", "run the Monte Carlo simulation");
  add_common(simulate);
  CLI::App* check = app.add_subcommand("check", "evaluate the existence condition");
  add_common(check);

  CLI::App* ml = app.add_subcommand("ml-eval", "evaluate Mittag-Leffler values or resolvent symbols");
  std::vector<double> ml_args;
  std::string kernel;
  double kq = 1.5, kmu = 1.0;
  std::vector<double> kt;
  double bound = mlf::kDefaultOverflowBound;
  ml->add_option("values", ml_args, "alpha beta z [z ...]");
  ml->add_option("--kernel", kernel, "T or S: print the resolvent symbol instead")->check(CLI::IsMember({"T", "S"}));
  ml->add_option("--q", kq, "order q for --kernel");
  ml->add_option("--mu", kmu, "eigenvalue mu for --kernel");
  ml->add_option("--t", kt, "times for --kernel")->delimiter(',');
  ml->add_option("--bound", bound, "overflow bound on |z| for positive arguments");

  CLI::App* heat = app.add_subcommand("heat-example", "print the shipped heat-example configuration");
  std::string heat_out;
  heat->add_option("--out", heat_out, "write to this file instead of standard output");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << json{{"error", "UsageError"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }

  try {
    if (*simulate) return cmd_simulate(o, out);
    if (*check) return cmd_check(o, out);
    if (*ml) {
      if (!kernel.empty()) {
        if (kt.empty()) throw ConfigError("--kernel needs --t");
        for (double t : kt) {
          out << format_number(kernel == "T" ? mlf::relaxation_T(kq, kmu, t) : mlf::relaxation_S(kq, kmu, t))
              << "\n";
        }
        return 0;
      }
      if (ml_args.size() < 3) throw ConfigError("ml-eval needs alpha beta z [z ...]");
      const mlf::MlParams p{ml_args[0], ml_args[1]};
      for (std::size_t i = 2; i < ml_args.size(); ++i) out << format_number(mlf::ml_eval(p, ml_args[i], bound)) << "\n";
      return 0;
    }
    if (*heat) {
      const std::string text = render_config(default_heat_config(), RunSettings{});
      if (heat_out.empty()) {
        out << text;
      } else {
        std::ofstream f(heat_out, std::ios::binary);
        if (!f) throw ConfigError("cannot write " + heat_out);
        f << text;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    err << error_json(e).dump() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace fracsee
