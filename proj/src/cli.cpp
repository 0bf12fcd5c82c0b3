#include "ionmux/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <thread>

#include "ionmux/errors.hpp"
#include "ionmux/markov_engine.hpp"
#include "ionmux/monte_carlo.hpp"

#ifndef IONMUX_VERSION
#define IONMUX_VERSION "0.0.0"
#endif

namespace ionmux {

namespace {

using json = nlohmann::ordered_json;

Table make_table(std::string name, std::vector<std::string> columns) {
  Table t;
  t.name = std::move(name);
  t.columns = std::move(columns);
  return t;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (int x : v) out += (out.empty() ? "" : ";") + std::to_string(x);
  return out;
}

std::uint64_t mc_seed(const RunConfig& c, std::uint64_t stream) {
  return splitmix64(static_cast<std::uint64_t>(c.integer("run.seed")) ^ splitmix64(stream));
}

// Evaluates `fn(i)` for i in [0, n) on worker threads; results keep index order.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn fn) {
  std::vector<T> out(n);
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                           static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::future<void>> jobs;
  for (unsigned w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

std::vector<Table> branching_ratio(const RunConfig& c) {
  const auto base = strategy(c);
  const auto params = atomic_params(c);
  auto t = make_table("branching_ratio", {"N", "pumps", "BR", "BR_increment"});
  double previous = 0.0;
  for (int n = 1; n <= base.pulse_count; ++n) {
    const auto s = base.resized(n);
    const double br = effective_branching_ratio(s, params);
    t.rows.push_back({std::int64_t{n}, std::int64_t{s.pump_count()}, br, br - previous});
    previous = br;
  }
  return {t};
}

std::vector<Table> enhance(const RunConfig& c) {
  const auto link = link_params(c);
  const auto curve = enhancement_curve(link, link.modes);
  auto t = make_table("enhance", {"N", "t_eff_s", "M", "duty_cycle", "N0", "M_saturated"});
  for (const auto& p : curve.points) {
    t.rows.push_back({std::int64_t{p.n}, p.t_eff, p.m, p.duty_cycle, curve.n_half, curve.m_saturated});
  }
  return {t};
}

std::vector<Table> protocol(const RunConfig& c) {
  const auto spec = protocol_spec(c);
  const auto r = simulate_rates(spec);
  auto summary = make_table("protocol", {"quantity", "value"});
  auto add = [&](const char* name, double v) { summary.rows.push_back({std::string(name), v}); };
  add("modes", r.timing.modes);
  add("t_round_s", r.timing.t_round);
  add("round_trip_s", r.timing.round_trip);
  add("active_span_s", r.timing.active_span);
  add("t_ovh_s", r.timing.t_ovh);
  add("cooling_per_round_s", r.timing.cooling);
  add("comm_overhead_s", r.timing.comm_overhead);
  add("efficiency", r.efficiency);
  add("efficiency_other", r.other_efficiency);
  add("p0", r.p0);
  add("p_round", r.p_round);
  add("p_round_exact", r.p_round_exact);
  add("attempt_rate_per_s", r.attempt_rate);
  add("success_rate_per_s", r.success_rate);
  add("success_rate_exact_per_s", r.success_rate_exact);
  add("generation_time_s", r.success_rate > 0.0 ? 1.0 / r.success_rate : INFINITY);
  add("M", r.M);
  add("M_prime", r.M_prime);
  add("survival", r.survival);
  add("decay_error", 1.0 - r.survival);
  add("eta_link", r.eta_link);

  const auto samples = static_cast<std::uint64_t>(c.integer("mc.samples"));
  std::vector<std::string> cols = {"mode", "ion", "p"};
  if (samples > 0) {
    cols.push_back("p_mc");
    cols.push_back("p_mc_se");
  }
  auto modes = make_table("protocol_modes", cols);
  const auto program = compile(spec);
  std::size_t k = 0;
  for (int ion : spec.visit_order()) {
    std::optional<MonteCarloEstimate> mc;
    if (samples > 0) {
      mc = monte_carlo_oracle(PopulationVector::pure(Level::SUp), program, samples,
                              mc_seed(c, static_cast<std::uint64_t>(ion)), ion);
    }
    const auto ion_modes = program.modes(ion);
    for (std::size_t i = 0; i < ion_modes.size(); ++i, ++k) {
      std::vector<Cell> row = {std::int64_t{ion_modes[i]}, std::int64_t{ion}, r.per_mode_p[k]};
      if (mc) {
        row.push_back(mc->profile.per_mode[i] * r.efficiency);
        row.push_back(mc->per_mode_se[i] * r.efficiency);
      }
      modes.rows.push_back(std::move(row));
    }
  }
  return {summary, modes};
}

std::vector<Table> bsm(const RunConfig& c) {
  const auto pair = node_pair(c);
  const auto axis = sweep_axis_from_string(c.text("bsm.axis"));
  const auto& grid = c.int_list("bsm.grid");
  const auto curve = sweep_enhancement(pair, axis, grid);
  auto sweep = make_table("bsm_sweep", {"grid", "N", "ions", "pulses_per_ion", "p_herald", "t_round_s",
                                        "rate_per_s", "M", "M_prime", "efficiency_ratio"});
  for (const auto& p : curve.points) {
    sweep.rows.push_back({std::int64_t{p.grid_value}, std::int64_t{p.n}, std::int64_t{p.ions},
                          std::int64_t{p.pulses_per_ion}, p.p_herald, p.t_round, p.rate, p.M,
                          p.M_prime, p.efficiency_ratio});
  }

  const auto report = simulate_ion_ion(pair);
  const auto samples = static_cast<std::uint64_t>(c.integer("mc.samples"));
  std::vector<std::string> cols = {"mode",      "ion_pair",   "p_a",          "p_b",
                                   "active_in", "herald",     "terminated",   "continuing",
                                   "heralded_cum", "terminated_cum", "active_cum"};
  std::optional<IonIonMonteCarlo> mc;
  if (samples > 0) {
    mc = monte_carlo_ion_ion(pair, samples, mc_seed(c, 0x6273'6d00ULL));
    cols.push_back("herald_mc");
    cols.push_back("herald_mc_se");
  }
  auto windows = make_table("bsm_windows", cols);
  for (std::size_t i = 0; i < report.windows.size(); ++i) {
    const auto& w = report.windows[i];
    std::vector<Cell> row = {std::int64_t{w.mode}, std::int64_t{w.ion_pair}, w.p_a, w.p_b,
                             w.active_in, w.herald, w.terminated, w.continuing, w.heralded_cum,
                             w.terminated_cum, w.active_cum};
    if (mc) {
      row.push_back(mc->per_mode_herald[i]);
      row.push_back(mc->per_mode_se[i]);
    }
    windows.rows.push_back(std::move(row));
  }
  return {sweep, windows};
}

std::vector<Table> optimize(const RunConfig& c) {
  const auto problem = optimization_problem(c);
  const auto result = c.text("optimize.method") == "exhaustive" ? solve_exhaustive(problem)
                                                               : solve_dp(problem);
  auto t = make_table("optimize", {"pumps", "value", "pump_after", "best"});
  for (const auto& e : result.frontier) {
    const bool best = e.strategy.pump_after == result.best.pump_after;
    t.rows.push_back({std::int64_t{e.pumps}, e.value, join_ints(e.strategy.pump_after),
                      std::int64_t{best ? 1 : 0}});
  }
  return {t};
}

std::vector<Table> sweep(const RunConfig& c) {
  if (!c.has("sweep.key")) throw ConfigError("sweep.key", "sweep.key must name a config key");
  const std::string key = c.text("sweep.key");
  if (!find_key(key) || key.starts_with("sweep.")) {
    throw ConfigError("sweep.key", "sweep.key '" + key + "' is not a sweepable config key");
  }
  const auto& values = c.text_list("sweep.values");
  if (values.empty()) throw ConfigError("sweep.values", "sweep.values must list at least one value");

  std::vector<RunConfig> points;
  for (const auto& v : values) {
    RunConfig point = c;
    point.set(key, v);
    points.push_back(std::move(point));
  }
  const auto reports =
      parallel_map<RateReport>(points.size(), [&](std::size_t i) { return simulate_rates(protocol_spec(points[i])); });

  auto t = make_table("sweep", {key, "N", "t_round_s", "p_round", "success_rate_per_s", "M",
                                "M_prime", "eta_link"});
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& r = reports[i];
    t.rows.push_back({format_value(*find_key(key), points[i].get(key)), std::int64_t{r.timing.modes},
                      r.timing.t_round, r.p_round, r.success_rate, r.M, r.M_prime, r.eta_link});
  }
  return {t};
}

std::string csv_cell(const Cell& cell) {
  if (const double* d = std::get_if<double>(&cell)) {
    if (std::isnan(*d)) return "nan";
    if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", *d);
    return buf;
  }
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  const auto& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json json_cell(const Cell& cell) {
  if (const double* d = std::get_if<double>(&cell)) {
    if (!std::isfinite(*d)) return csv_cell(cell);
    return *d;
  }
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return *i;
  return std::get<std::string>(cell);
}

}  // namespace

std::string_view tool_version() { return IONMUX_VERSION; }

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"branching-ratio", "enhance", "protocol",
                                                 "bsm",             "optimize", "sweep"};
  return names;
}

std::vector<Table> execute(std::string_view command, const RunConfig& config) {
  if (command == "branching-ratio") return branching_ratio(config);
  if (command == "enhance") return enhance(config);
  if (command == "protocol") return protocol(config);
  if (command == "bsm") return bsm(config);
  if (command == "optimize") return optimize(config);
  if (command == "sweep") return sweep(config);
  throw ParameterError("unknown command '" + std::string(command) + "'");
}

std::string render_csv(const Table& table, std::string_view command, const RunConfig& config) {
  std::string out;
  out += "# tool: ionmux " + std::string(tool_version()) + "\n";
  out += "# command: " + std::string(command) + "\n";
  out += "# seed: " + std::to_string(config.integer("run.seed")) + "\n";
  out += "# config_hash: fnv1a64:" + hex64(config.hash()) + "\n";
  out += "# config:\n";
  const std::string text = config.serialize();
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl - pos);
    out += line.empty() ? "#\n" : "#   " + line + "\n";
    pos = nl + 1;
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out += (i ? "," : "") + csv_cell(table.columns[i]);
  }
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
    out += "\n";
  }
  return out;
}

std::string render_json(const Table& table, std::string_view command, const RunConfig& config) {
  json doc;
  doc["provenance"] = {{"tool", "ionmux"},
                       {"version", tool_version()},
                       {"command", command},
                       {"seed", config.integer("run.seed")},
                       {"config_hash", "fnv1a64:" + hex64(config.hash())},
                       {"config", config.serialize()}};
  doc["columns"] = table.columns;
  json rows = json::array();
  for (const auto& row : table.rows) {
    json r = json::array();
    for (const auto& cell : row) r.push_back(json_cell(cell));
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("", "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("", "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ConfigError("", "cannot move output into place at '" + path.string() + "'");
  }
}

std::vector<std::filesystem::path> run(std::string_view command, const RunConfig& config,
                                       const std::filesystem::path& out_dir, OutputFormat format) {
  const auto tables = execute(command, config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ConfigError("", "cannot create output directory '" + out_dir.string() + "'");
  std::vector<std::filesystem::path> written;
  for (const auto& t : tables) {
    const bool csv = format == OutputFormat::Csv;
    const auto path = out_dir / (t.name + (csv ? ".csv" : ".json"));
    write_atomic(path, csv ? render_csv(t, command, config) : render_json(t, command, config));
    written.push_back(path);
  }
  return written;
}

std::string error_record(const std::exception& e) {
  json err;
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) {
    err = {{"kind", to_string(ce->kind())}, {"key", ce->key()}, {"message", ce->what()}};
  } else if (const auto* ie = dynamic_cast<const Error*>(&e)) {
    err = {{"kind", to_string(ie->kind())}, {"message", ie->what()}};
  } else {
    err = {{"kind", "internal"}, {"message", e.what()}};
  }
  return json{{"error", err}}.dump();
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Time-bin multiplexed ion-photon entanglement rate simulator"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  std::string preset;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  std::optional<std::int64_t> seed;
  std::string format = "csv";
  std::string strategy_name;
  std::optional<int> pulses;
  bool print_config = false;

  const std::map<std::string, std::string> about = {
      {"branching-ratio", "effective branching ratio versus pulse count"},
      {"enhance", "timing-only enhancement M(N)"},
      {"protocol", "single-node rates, M' and link efficiency"},
      {"bsm", "two-node heralding and enhancement sweep"},
      {"optimize", "optimal pump placement"},
      {"sweep", "protocol rates over one config key"}};
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, about.count(name) ? about.at(name) : "");
    sub->add_option("--preset", preset, "scenario preset name");
    sub->add_option("--config", config_path, "config file")->check(CLI::ExistingFile);
    sub->add_option("--set", overrides, "override key=value (repeatable)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--print-config", print_config, "print the resolved config and exit");
    if (name == "branching-ratio") {
      sub->add_option("--strategy", strategy_name, "pump strategy");
      sub->add_option("--n", pulses, "number of excitation pulses");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    RunConfig config;
    if (!preset.empty()) config = load_preset(preset, config);
    if (!config_path.empty()) config = load_config(config_path, config);
    if (!strategy_name.empty()) config.set("strategy.name", strategy_name);
    if (pulses) config.set("strategy.pulses", std::to_string(*pulses));
    for (const auto& o : overrides) apply_override(config, o);
    if (seed) config.set("run.seed", std::to_string(*seed));
    if (print_config) {
      std::cout << config.serialize();
      return 0;
    }
    const auto files =
        run(command, config, out_dir, format == "json" ? OutputFormat::Json : OutputFormat::Csv);
    for (const auto& f : files) std::cout << f.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << error_record(e) << "\n";
    return 1;
  }
}

}  // namespace ionmux
