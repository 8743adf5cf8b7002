#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "fracsee/cli.hpp"
#include "fracsee/config.hpp"
#include "fracsee/dynamics.hpp"
#include "fracsee/errors.hpp"
#include "fracsee/existence.hpp"
#include "fracsee/heat_example.hpp"
#include "fracsee/mlf.hpp"

namespace py = pybind11;
using namespace fracsee;

namespace {

py::dict constants_to_dict(const HypothesisConstants& c) {
  py::dict d;
  d["M"] = c.M;
  d["N1"] = c.N1;
  d["N2_star"] = c.N2_star;
  d["N3_star"] = c.N3_star;
  d["J_star"] = c.J_star;
  d["L_k1"] = c.L_k1;
  d["L_k2"] = c.L_k2;
  d["l1_star"] = c.l1_star;
  d["l2_star"] = c.l2_star;
  d["M_b"] = c.M_b;
  d["l_b_star"] = c.l_b_star;
  d["M_i"] = c.M_i;
  d["l_mi_star"] = c.l_mi_star;
  d["lambda_i"] = c.lambda_i;
  d["L_i"] = c.L_i;
  d["lambda_h"] = c.lambda_h;
  d["M_h"] = c.M_h;
  d["sup_m"] = c.sup_m;
  d["lambda_f"] = c.lambda_f;
  d["sup_n"] = c.sup_n;
  d["mho"] = c.mho;
  d["chi_L2"] = c.chi_L2;
  d["trace_Q"] = c.trace_Q;
  d["a"] = c.a;
  d["n_impulses"] = c.n_impulses;
  d["psi_norm"] = c.psi_norm;
  d["xi1_sq"] = c.xi1_sq;
  return d;
}

HypothesisConstants constants_from_dict(const py::dict& d) {
  HypothesisConstants c;
  for (const auto& [key, value] : d) {
    const auto k = py::cast<std::string>(key);
    auto scalar = [&](double& field) { field = py::cast<double>(value); };
    auto array = [&](std::vector<double>& field) { field = py::cast<std::vector<double>>(value); };
    if (k == "M") scalar(c.M);
    else if (k == "N1") scalar(c.N1);
    else if (k == "N2_star") scalar(c.N2_star);
    else if (k == "N3_star") scalar(c.N3_star);
    else if (k == "J_star") scalar(c.J_star);
    else if (k == "L_k1") scalar(c.L_k1);
    else if (k == "L_k2") scalar(c.L_k2);
    else if (k == "l1_star") scalar(c.l1_star);
    else if (k == "l2_star") scalar(c.l2_star);
    else if (k == "M_b") scalar(c.M_b);
    else if (k == "l_b_star") scalar(c.l_b_star);
    else if (k == "M_i") array(c.M_i);
    else if (k == "l_mi_star") array(c.l_mi_star);
    else if (k == "lambda_i") array(c.lambda_i);
    else if (k == "L_i") array(c.L_i);
    else if (k == "lambda_h") scalar(c.lambda_h);
    else if (k == "M_h") scalar(c.M_h);
    else if (k == "sup_m") scalar(c.sup_m);
    else if (k == "lambda_f") scalar(c.lambda_f);
    else if (k == "sup_n") scalar(c.sup_n);
    else if (k == "mho") scalar(c.mho);
    else if (k == "chi_L2") scalar(c.chi_L2);
    else if (k == "trace_Q") scalar(c.trace_Q);
    else if (k == "a") scalar(c.a);
    else if (k == "n_impulses") c.n_impulses = py::cast<std::size_t>(value);
    else if (k == "psi_norm") scalar(c.psi_norm);
    else if (k == "xi1_sq") scalar(c.xi1_sq);
    else throw py::key_error("unknown constant '" + k + "'");
  }
  if (!d.contains("n_impulses")) {
    c.n_impulses = std::max({c.M_i.size(), c.l_mi_star.size(), c.lambda_i.size(), c.L_i.size()});
  }
  return c;
}

py::dict report_to_dict(const ExistenceReport& r) {
  py::dict d;
  d["delta1"] = r.delta1;
  d["delta2"] = r.delta2;
  d["max"] = r.max;
  d["satisfied"] = r.satisfied;
  d["C0"] = r.C0;
  d["C1"] = r.C1;
  d["m_hat"] = r.m_hat;
  return d;
}

LoadedConfig parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

PYBIND11_MODULE(_fracsee, m) {
  m.doc() = "Fractional neutral stochastic evolution equations with non-instantaneous impulses";

  static py::exception<Error> error(m, "FracseeError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(py::str(e.what()));
      exc.attr("kind") = e.kind();
      if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
        exc.attr("line") = pe->line();
        exc.attr("key") = pe->key();
      }
      if (const auto* ve = dynamic_cast<const ValidationError*>(&e)) exc.attr("problems") = ve->problems();
      if (const auto* mi = dynamic_cast<const MaxIterations*>(&e)) exc.attr("distances") = mi->distances();
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def(
      "ml_eval", [](double alpha, double beta, double z, double bound) { return mlf::ml_eval({alpha, beta}, z, bound); },
      py::arg("alpha"), py::arg("beta"), py::arg("z"), py::arg("overflow_bound") = mlf::kDefaultOverflowBound,
      "Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for real z.");
  m.def("relaxation_T", &mlf::relaxation_T, py::arg("q"), py::arg("mu"), py::arg("t"), "E_{q,1}(-mu t^q)");
  m.def("relaxation_S", &mlf::relaxation_S, py::arg("q"), py::arg("mu"), py::arg("t"), "t E_{q,2}(-mu t^q)");
  m.def(
      "fractional_integral",
      [](const std::vector<double>& g, double q, const std::vector<double>& times) {
        return mlf::fractional_integral(g, q, TimeGrid(times));
      },
      py::arg("values"), py::arg("q"), py::arg("times"),
      "Riemann-Liouville integral of order q of samples on the given nodes.");

  m.def(
      "check_existence", [](const py::dict& d) { return report_to_dict(check_existence(constants_from_dict(d))); },
      py::arg("constants"), "Delta1, Delta2 and the existence verdict for a dict of hypothesis constants.");
  m.def(
      "scale_growth_constants",
      [](const py::dict& d, double s) { return constants_to_dict(scale_growth_constants(constants_from_dict(d), s)); },
      py::arg("constants"), py::arg("factor"));

  m.def(
      "heat_example_config",
      [](double amplitude_scale) {
        return render_config(default_heat_config().scaled(amplitude_scale), RunSettings{});
      },
      py::arg("amplitude_scale") = 1.0, "Configuration text of the shipped heat example.");
  m.def(
      "resolve_constants", [](const std::string& text) { return constants_to_dict(resolve_constants(parse_text(text))); },
      py::arg("config_text"), "Hypothesis constants for a configuration (suggested, then overridden).");

  m.def(
      "simulate",
      [](const std::string& text, std::optional<std::uint64_t> seed, std::optional<std::size_t> n_paths,
         std::optional<double> dt) {
        const LoadedConfig cfg = parse_text(text);
        if (!cfg.has_model) throw ConfigError("simulate needs a [model] section");
        HeatExampleConfig heat = cfg.heat;
        if (seed) heat.seed = *seed;
        const ProblemSpec spec = build_spec(heat);
        const TimeGrid grid = heat_grid(heat, dt.value_or(cfg.run.dt));
        EnsembleOptions opt;
        opt.n_paths = n_paths.value_or(cfg.run.n_paths);
        opt.base_seed = heat.seed;
        opt.threads = cfg.run.threads;
        opt.picard = cfg.run.picard;
        EnsembleStats st;
        {
          py::gil_scoped_release release;
          st = simulate_ensemble(spec, grid, opt);
        }
        std::vector<std::string> branches;
        std::vector<std::vector<double>> mean_field;
        for (std::size_t k = 0; k < grid.size(); ++k) {
          branches.push_back(classify_time(spec.schedule, grid[k]).label());
          const auto c = st.mean_field[k].coeffs();
          mean_field.emplace_back(c.begin(), c.end());
        }
        py::dict out;
        out["t"] = std::vector<double>(grid.nodes().begin(), grid.nodes().end());
        out["branch"] = branches;
        out["mean_field"] = mean_field;
        out["mean_sq_norm"] = st.mean_sq_norm;
        out["var_sq_norm"] = st.var_sq_norm;
        out["sweeps"] = st.sweeps;
        out["jump_counts"] = st.jump_counts;
        return out;
      },
      py::arg("config_text"), py::arg("seed") = py::none(), py::arg("n_paths") = py::none(),
      py::arg("dt") = py::none(), "Monte Carlo ensemble of the heat example described by a configuration.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line interface in process; returns (exit_code, stdout, stderr).");
}
