#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <limits>

#include "ionmux/bsm.hpp"
#include "ionmux/cli.hpp"
#include "ionmux/config.hpp"
#include "ionmux/errors.hpp"
#include "ionmux/link_timing.hpp"
#include "ionmux/markov_engine.hpp"
#include "ionmux/monte_carlo.hpp"
#include "ionmux/protocol.hpp"
#include "ionmux/strategy_optimizer.hpp"

namespace py = pybind11;
using namespace ionmux;

namespace {

AtomicParams atomic(double p_br_d, double w_up, double tau_p) {
  AtomicParams p;
  p.p_br_d = p_br_d;
  p.w_up = w_up;
  p.tau_p = tau_p;
  p.validate();
  return p;
}

py::object cell(const Cell& c) {
  return std::visit([](const auto& v) -> py::object { return py::cast(v); }, c);
}

py::dict tables_dict(const std::vector<Table>& tables) {
  py::dict out;
  for (const auto& t : tables) {
    py::list rows;
    for (const auto& r : t.rows) {
      py::dict row;
      for (std::size_t i = 0; i < t.columns.size(); ++i) row[py::str(t.columns[i])] = cell(r[i]);
      rows.append(row);
    }
    out[py::str(t.name)] = rows;
  }
  return out;
}

py::dict rate_dict(const RateReport& r) {
  py::dict d;
  d["modes"] = r.modes;
  d["per_mode_p"] = r.per_mode_p;
  d["p0"] = r.p0;
  d["p_round"] = r.p_round;
  d["p_round_exact"] = r.p_round_exact;
  d["t_round"] = r.timing.t_round;
  d["active_span"] = r.timing.active_span;
  d["t_ovh"] = r.timing.t_ovh;
  d["attempt_rate"] = r.attempt_rate;
  d["success_rate"] = r.success_rate;
  d["success_rate_exact"] = r.success_rate_exact;
  d["M"] = r.M;
  d["M_prime"] = r.M_prime;
  d["survival"] = r.survival;
  d["eta_link"] = r.eta_link;
  d["efficiency"] = r.efficiency;
  d["other_efficiency"] = r.other_efficiency;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ionmux, m) {
  m.doc() = "Multiplexed ion-photon entanglement rate model";
  m.attr("__version__") = std::string(tool_version());

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<ProtocolError>(m, "ProtocolError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<AnalysisError>(m, "AnalysisError", base.ptr());
  py::register_exception<BudgetError>(m, "BudgetError", base.ptr());

  const double inf = std::numeric_limits<double>::infinity();

  m.def(
      "emission_profile",
      [](const std::string& strategy, int pulses, double window, std::vector<int> pump_after,
         double p_br_d, double w_up, double tau_p) {
        const auto s = strategy == "custom" ? Strategy::custom(pulses, pump_after, window)
                                            : Strategy::named(strategy, pulses, window);
        return run_program(PopulationVector::pure(Level::SUp),
                           compile_strategy(s, atomic(p_br_d, w_up, tau_p)))
            .profile.per_mode;
      },
      py::arg("strategy"), py::arg("pulses"), py::arg("window") = inf,
      py::arg("pump_after") = std::vector<int>{}, py::arg("p_br_d") = 0.06,
      py::arg("w_up") = 2.0 / 3.0, py::arg("tau_p") = 7e-9,
      "Collected-photon probability per mode of a pulse train started in S_up.");

  m.def(
      "effective_branching_ratio",
      [](const std::string& strategy, int pulses, double window, double p_br_d, double w_up,
         double tau_p) {
        return effective_branching_ratio(Strategy::named(strategy, pulses, window),
                                         atomic(p_br_d, w_up, tau_p));
      },
      py::arg("strategy"), py::arg("pulses"), py::arg("window") = inf, py::arg("p_br_d") = 0.06,
      py::arg("w_up") = 2.0 / 3.0, py::arg("tau_p") = 7e-9);

  m.def(
      "monte_carlo_profile",
      [](const std::string& strategy, int pulses, double window, std::uint64_t samples,
         std::uint64_t seed) {
        const auto est =
            monte_carlo_oracle(PopulationVector::pure(Level::SUp),
                               compile_strategy(Strategy::named(strategy, pulses, window), {}),
                               samples, seed);
        return py::make_tuple(est.profile.per_mode, est.per_mode_se);
      },
      py::arg("strategy"), py::arg("pulses"), py::arg("window") = inf, py::arg("samples") = 100000,
      py::arg("seed") = 1, "(per-mode estimates, standard errors) from path sampling.");

  m.def(
      "optimize",
      [](int pulses, const std::string& objective, double pulse_interval, double pump_duration,
         bool exhaustive) {
        OptimizationProblem pr;
        pr.pulses = pulses;
        pr.objective = objective_from_string(objective);
        pr.pulse_interval = pulse_interval;
        pr.pump_duration = pump_duration;
        const auto r = exhaustive ? solve_exhaustive(pr) : solve_dp(pr);
        return py::make_tuple(r.best.pump_after, r.value);
      },
      py::arg("pulses"), py::arg("objective") = "total_emission", py::arg("pulse_interval") = 200e-9,
      py::arg("pump_duration") = 100e-9, py::arg("exhaustive") = false,
      "(pump_after, value) of the optimal pump placement.");

  m.def(
      "enhancement",
      [](double length, double t_ovh, double dt, int modes, double c_fiber) {
        LinkParams l{length, c_fiber, t_ovh, dt, modes};
        l.validate();
        return enhancement(l);
      },
      py::arg("length"), py::arg("t_ovh"), py::arg("dt"), py::arg("modes"), py::arg("c_fiber") = 2e8);
  m.def(
      "t_eff",
      [](double length, double t_ovh, double dt, int modes, double c_fiber) {
        LinkParams l{length, c_fiber, t_ovh, dt, modes};
        l.validate();
        return t_eff(l);
      },
      py::arg("length"), py::arg("t_ovh"), py::arg("dt"), py::arg("modes"), py::arg("c_fiber") = 2e8);

  m.def("memory_survival", [](double t, double tau_life) {
    MemoryParams mem;
    mem.tau_life = tau_life;
    return memory_survival(t, mem);
  }, py::arg("t"), py::arg("tau_life") = 0.958);
  m.def("memory_fidelity", [](double t, double tau_coh, double a) {
    MemoryParams mem;
    mem.tau_coh = tau_coh;
    mem.a = a;
    return memory_fidelity(t, mem);
  }, py::arg("t"), py::arg("tau_coh") = 0.366, py::arg("a") = 0.5);
  m.def("link_efficiency", [](double rate, double tau_coh, double survival) {
    MemoryParams mem;
    mem.tau_coh = tau_coh;
    return link_efficiency(rate, mem, survival);
  }, py::arg("success_rate"), py::arg("tau_coh") = 0.366, py::arg("survival") = 1.0);

  py::class_<RunConfig>(m, "Config")
      .def(py::init<>())
      .def("set", [](RunConfig& c, const std::string& k, const std::string& v) { c.set(k, v); })
      .def("number", [](const RunConfig& c, const std::string& k) { return c.number(k); })
      .def("text", [](const RunConfig& c, const std::string& k) { return c.text(k); })
      .def("serialize", &RunConfig::serialize)
      .def("hash", &RunConfig::hash)
      .def("__eq__", &RunConfig::operator==)
      .def("__repr__", &RunConfig::serialize);

  m.def("load_preset", [](const std::string& name) { return load_preset(name); });
  m.def("load_config", [](const std::filesystem::path& p) { return load_config(p); });
  m.def("parse_config", [](const std::string& text) { return parse_config_text(text); });
  m.def("preset_names", &preset_names);

  m.def("simulate_rates", [](const RunConfig& c) { return rate_dict(simulate_rates(protocol_spec(c))); },
        "Single-node rate report of a resolved config.");
  m.def(
      "simulate_ion_ion",
      [](const RunConfig& c) {
        const auto r = simulate_ion_ion(node_pair(c));
        py::dict d;
        d["p_herald"] = r.p_herald;
        d["success_rate"] = r.success_rate;
        d["t_round"] = r.timing.t_round;
        d["max_balance_error"] = r.max_balance_error;
        d["windows"] = r.windows.size();
        return d;
      },
      "Two-node heralding summary of a resolved config.");
  m.def(
      "sweep_enhancement",
      [](const RunConfig& c) {
        const auto curve = sweep_enhancement(node_pair(c), sweep_axis_from_string(c.text("bsm.axis")),
                                             c.int_list("bsm.grid"));
        py::list pts;
        for (const auto& p : curve.points) {
          py::dict d;
          d["grid"] = p.grid_value;
          d["N"] = p.n;
          d["M"] = p.M;
          d["M_prime"] = p.M_prime;
          d["efficiency_ratio"] = p.efficiency_ratio;
          pts.append(d);
        }
        return pts;
      });

  m.def("execute", [](const std::string& command, const RunConfig& c) {
    return tables_dict(execute(command, c));
  }, "Tables of a CLI command as {table: [row dicts]}.");
  m.def(
      "run",
      [](const std::string& command, const RunConfig& c, const std::filesystem::path& out,
         const std::string& format) {
        return run(command, c, out, format == "json" ? OutputFormat::Json : OutputFormat::Csv);
      },
      py::arg("command"), py::arg("config"), py::arg("out_dir"), py::arg("format") = "csv");
}
