// resq: loss analysis for superconducting resonators with air bridges.
//
// Subcommands map onto the library modules: `conductivity` tabulates the
// thermal-quasiparticle response of one film, `fit` extracts quality factors
// from S21 traces, `sweep` turns loss-vs-temperature (or -power) curves into
// participation (or saturation) parameters, `predict` forward-models a
// device, `synth` fabricates test data, and `fields` integrates field-solver
// output. Exit codes: 0 success, 1 data/convergence failure, 2 usage error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "resq/constants.hpp"
#include "resq/errors.hpp"
#include "resq/field_participation.hpp"
#include "resq/io/config.hpp"
#include "resq/io/csv.hpp"
#include "resq/io/keyval.hpp"
#include "resq/io/report.hpp"
#include "resq/loss_models.hpp"
#include "resq/mattis_bardeen.hpp"
#include "resq/resonance_fit.hpp"
#include "resq/sweep_analysis.hpp"
#include "resq/units.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Context {
  resq::io::AnalysisConfig config;
  std::string config_text;  // raw text for the report digest, may be empty
};

// ---------------------------------------------------------------------------
// Output plumbing.

std::string json_scalar_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return resq::io::format_double(v.get<double>());
  return v.dump();
}

// CSV rendering of a report body: scalar fields become "# key = value"
// preamble lines, body["rows"] becomes the table. body["columns"], when
// present, fixes the column order (JSON objects iterate alphabetically).
std::string body_to_csv(const json& body) {
  std::string out;
  for (const auto& [key, value] : body.items()) {
    if (key == "rows" || key == "columns") continue;
    if (value.is_object() || value.is_array()) continue;
    out += "# " + key + " = " + json_scalar_to_string(value) + "\n";
  }
  std::vector<std::string> header;
  if (body.contains("columns")) {
    for (const auto& name : body["columns"]) header.push_back(name.get<std::string>());
  } else if (body.contains("rows") && !body["rows"].empty()) {
    for (const auto& [key, value] : body["rows"].front().items()) {
      (void)value;
      header.push_back(key);
    }
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ",";
    out += header[i];
  }
  out += "\n";
  if (body.contains("rows"))
    for (const auto& row : body["rows"]) {
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ",";
        if (row.contains(header[i])) out += json_scalar_to_string(row.at(header[i]));
      }
      out += "\n";
    }
  return out;
}

void emit_report(const Context& ctx, const resq::io::ReportBuilder& report,
                 const std::string& output) {
  const std::string text = ctx.config.format == "csv"
                               ? body_to_csv(report.build(false)["body"])
                               : report.build(true).dump(2) + "\n";
  if (output == "-") {
    std::fputs(text.c_str(), stdout);
  } else {
    resq::io::write_text_file(output, text);
  }
}

resq::io::ReportBuilder make_report(const Context& ctx, const std::string& tool) {
  resq::io::ReportBuilder report(tool, kVersion);
  if (!ctx.config_text.empty()) report.set_config_digest(ctx.config_text);
  return report;
}

fs::path out_path(const Context& ctx, const std::string& name) {
  fs::path dir(ctx.config.out_dir);
  if (!dir.empty() && dir != ".") fs::create_directories(dir);
  return dir / name;
}

int classify_error(const std::exception& e) {
  if (dynamic_cast<const resq::ConfigError*>(&e) ||
      dynamic_cast<const resq::ParseError*>(&e) ||
      dynamic_cast<const resq::InvalidArgumentError*>(&e) ||
      dynamic_cast<const CLI::ParseError*>(&e))
    return 2;
  return 1;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2 || !(hi > lo))
    throw resq::InvalidArgumentError("need at least 2 points and max > min");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + step * i;
  out.back() = hi;
  return out;
}

std::vector<double> logspace(double lo, double hi, int n) {
  if (!(lo > 0.0)) throw resq::InvalidArgumentError("log grid needs positive min");
  auto grid = linspace(std::log10(lo), std::log10(hi), n);
  for (auto& v : grid) v = std::pow(10.0, v);
  return grid;
}

// Grid specifications: "start:stop:step" (inclusive) or a comma-separated
// list of values; each element goes through `parse` for unit handling.
std::vector<double> parse_grid(const std::string& spec,
                               double (*parse)(std::string_view)) {
  std::vector<std::string> parts;
  const char sep = spec.find(':') != std::string::npos ? ':' : ',';
  std::string::size_type begin = 0;
  while (begin <= spec.size()) {
    const auto end = spec.find(sep, begin);
    parts.push_back(spec.substr(begin, end == std::string::npos ? end : end - begin));
    if (end == std::string::npos) break;
    begin = end + 1;
  }
  if (sep == ':') {
    if (parts.size() != 3)
      throw resq::InvalidArgumentError("range must be start:stop:step: " + spec);
    const double start = parse(parts[0]);
    const double stop = parse(parts[1]);
    const double step = parse(parts[2]);
    if (!(step > 0.0) || stop < start)
      throw resq::InvalidArgumentError("range needs stop >= start and step > 0: " + spec);
    const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = start + step * i;
    return grid;
  }
  std::vector<double> grid;
  for (const auto& part : parts)
    if (!part.empty()) grid.push_back(parse(part));
  if (grid.empty()) throw resq::InvalidArgumentError("empty grid specification");
  return grid;
}

// ---------------------------------------------------------------------------
// conductivity

struct ConductivityArgs {
  std::string material;
  std::string frequency;
  std::string temperatures;
  std::string output = "-";
};

int run_conductivity(const Context& ctx, const ConductivityArgs& args) {
  const auto& mat = ctx.config.material(args.material);
  const double f = resq::units::parse_frequency(args.frequency);
  const auto temps = parse_grid(args.temperatures, resq::units::parse_temperature);

  auto report = make_report(ctx, "conductivity");
  report.set_option("material", mat.name);
  report.set_option("frequency_hz", f);
  report.set_option("gap_model", resq::to_string(ctx.config.gap_model));
  json rows = json::array();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double t : temps) {
    json row;
    row["temperature_k"] = t;
    const auto ratio = resq::mb::conductivity_ratio(mat, t, f, ctx.config.gap_model);
    row["sigma1_ratio"] = ratio.s1;
    row["sigma2_ratio"] = ratio.s2;
    if (t < mat.tc) {
      row["lambda_m"] = resq::mb::penetration_depth(mat, t, f, ctx.config.gap_model);
      row["rs_ohm"] = resq::mb::surface_resistance(mat, t, f, ctx.config.gap_model);
      row["lk_h"] = resq::mb::kinetic_inductance(mat, t, f, ctx.config.gap_model);
    } else {
      row["lambda_m"] = nan;
      row["rs_ohm"] = nan;
      row["lk_h"] = nan;
    }
    rows.push_back(std::move(row));
  }
  report.body()["columns"] = {"temperature_k", "sigma1_ratio", "sigma2_ratio",
                              "lambda_m",      "rs_ohm",       "lk_h"};
  report.body()["rows"] = std::move(rows);
  emit_report(ctx, report, args.output);
  return 0;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::vector<std::string> traces;
  bool overlay = false;
  std::string output = "-";
};

json fit_one_trace(const Context& ctx, const std::string& path, std::uint64_t seed,
                   bool overlay) {
  json row;
  row["file"] = fs::path(path).filename().string();
  try {
    auto file = resq::io::read_trace(path);
    // The config attenuation applies unless the trace records its own chain.
    if (!std::isfinite(file.trace.line_attenuation_db))
      file.trace.line_attenuation_db = ctx.config.attenuation_db;
    resq::FitOptions options;
    options.max_iterations = ctx.config.fit.max_iterations;
    options.tolerance = ctx.config.fit.tolerance;
    options.bootstrap = ctx.config.fit.bootstrap;
    options.n_bootstrap = ctx.config.fit.n_bootstrap;
    options.seed = seed;
    const auto fit = resq::fit_s21(file.trace, options);
    if (!file.trace.label.empty()) row["label"] = file.trace.label;
    if (std::isfinite(file.trace.temperature)) row["temperature_k"] = file.trace.temperature;
    row["f_r_hz"] = fit.params.f_r;
    row["q_l"] = fit.params.q_l;
    row["q_c_mag"] = fit.params.q_c_mag;
    row["phi_rad"] = fit.params.phi;
    row["q_i"] = fit.q_i;
    row["q_i_std"] = fit.q_i_std;
    if (fit.q_i_std_bootstrap) row["q_i_std_bootstrap"] = *fit.q_i_std_bootstrap;
    row["f_r_std_hz"] = fit.param_std.f_r;
    row["q_l_std"] = fit.param_std.q_l;
    row["q_c_mag_std"] = fit.param_std.q_c_mag;
    row["rms_residual"] = fit.rms_residual;
    row["iterations"] = fit.iterations;
    if (std::isfinite(fit.photon_number)) {
      row["power_dbm"] = file.trace.applied_power_dbm;
      row["photon_number"] = fit.photon_number;
    }
    if (overlay) {
      resq::io::Table table;
      table.header = {"freq_hz", "data_re", "data_im", "model_re", "model_im"};
      for (std::size_t i = 0; i < file.trace.frequency.size(); ++i) {
        const auto m = resq::evaluate_s21(fit.params, file.trace.frequency[i]);
        table.rows.push_back({resq::io::format_double(file.trace.frequency[i]),
                              resq::io::format_double(file.trace.s21[i].real()),
                              resq::io::format_double(file.trace.s21[i].imag()),
                              resq::io::format_double(m.real()),
                              resq::io::format_double(m.imag())});
      }
      const auto stem = fs::path(path).stem().string();
      resq::io::write_table(out_path(ctx, stem + ".overlay.csv"), table);
    }
  } catch (const resq::Error& e) {
    row["error"] = e.what();
  }
  return row;
}

int run_fit(const Context& ctx, const FitArgs& args) {
  auto report = make_report(ctx, "fit");
  report.set_option("attenuation_db", ctx.config.attenuation_db);

  std::vector<std::future<json>> futures;
  futures.reserve(args.traces.size());
  for (std::size_t i = 0; i < args.traces.size(); ++i) {
    const std::string path = args.traces[i];
    const std::uint64_t seed = ctx.config.seed + i;
    futures.push_back(std::async(std::launch::async, [&ctx, path, seed, &args] {
      return fit_one_trace(ctx, path, seed, args.overlay);
    }));
  }
  json rows = json::array();
  int successes = 0;
  for (auto& future : futures) {
    json row = future.get();
    if (!row.contains("error")) {
      ++successes;
    } else {
      std::fprintf(stderr, "resq fit: %s: %s\n", row["file"].get<std::string>().c_str(),
                   row["error"].get<std::string>().c_str());
    }
    rows.push_back(std::move(row));
  }
  for (const auto& path : args.traces) report.add_input(path);
  report.body()["rows"] = std::move(rows);
  report.body()["n_traces"] = args.traces.size();
  report.body()["n_success"] = successes;
  emit_report(ctx, report, args.output);
  return successes > 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  std::vector<std::string> sweeps;
  std::string trace_material;
  std::string bridge_material;
  std::string baseline;
  bool emit_delta = false;
  bool emit_model = false;
  bool shared_q_other = false;
  std::string output = "-";
};

json participation_row(const resq::LossSweep& sweep, const resq::ParticipationFit& fit,
                       const std::string& file) {
  json row;
  row["file"] = file;
  row["label"] = sweep.label;
  row["n_bridges"] = sweep.n_bridges;
  row["kind"] = "participation";
  row["p"] = fit.p;
  row["p_std"] = fit.p_std;
  row["q_other_inv"] = fit.q_other_inv;
  row["q_other_std"] = fit.q_other_std;
  row["rms_residual"] = fit.rms_residual;
  row["n_points_used"] = fit.n_points_used;
  return row;
}

void emit_sweep_model(const Context& ctx, const resq::LossSweep& sweep,
                      const resq::ParticipationFit& fit,
                      const resq::SuperconductorParams& trace,
                      const resq::SuperconductorParams& bridge, const std::string& stem) {
  resq::io::Table table;
  table.meta["p"] = resq::io::format_double(fit.p);
  table.meta["q_other_inv"] = resq::io::format_double(fit.q_other_inv);
  table.header = {"x", "qi_inv_model"};
  resq::CompositeLossModel model{fit.p, fit.q_other_inv};
  const double t_max = std::min(trace.tc, bridge.tc);
  for (double t : sweep.x) {
    if (t >= t_max) continue;
    const double y =
        resq::composite_loss(model, t, sweep.frequency, trace, bridge, ctx.config.gap_model);
    table.rows.push_back({resq::io::format_double(t), resq::io::format_double(y)});
  }
  resq::io::write_table(out_path(ctx, stem + ".model.csv"), table);
}

int run_sweep(const Context& ctx, const SweepArgs& args) {
  if (args.emit_delta && args.baseline.empty())
    throw resq::InvalidArgumentError("--emit-delta requires --baseline");
  auto report = make_report(ctx, "sweep");
  std::optional<resq::LossSweep> baseline;
  if (!args.baseline.empty()) {
    baseline = resq::io::read_sweep(args.baseline);
    report.add_input(args.baseline);
    report.set_option("baseline", fs::path(args.baseline).filename().string());
  }

  resq::ParticipationFitOptions options;
  options.gap_model = ctx.config.gap_model;
  options.t_min = ctx.config.sweep_t_min;
  options.use_sigma_weights = ctx.config.fit.use_sigma_weights;

  struct Loaded {
    std::string file;
    std::string stem;
    resq::LossSweep sweep;
  };
  std::vector<Loaded> temp_sweeps;
  json rows = json::array();
  int successes = 0;
  int failures = 0;

  for (const auto& path : args.sweeps) {
    report.add_input(path);
    const std::string file = fs::path(path).filename().string();
    const std::string stem = fs::path(path).stem().string();
    try {
      resq::LossSweep sweep = resq::io::read_sweep(path);
      if (sweep.axis == resq::SweepAxis::photon_number) {
        resq::PowerFitOptions popt;
        popt.max_iterations = ctx.config.fit.max_iterations;
        popt.tolerance = ctx.config.fit.tolerance;
        popt.use_sigma_weights = ctx.config.fit.use_sigma_weights;
        const auto fit = resq::fit_power_sweep(sweep, popt);
        json row;
        row["file"] = file;
        row["label"] = sweep.label;
        row["kind"] = "power";
        row["q_tls0_inv"] = fit.model.q_tls0_inv;
        row["q_tls0_std"] = fit.model_std.q_tls0_inv;
        row["n_c"] = fit.model.n_c;
        row["n_c_std"] = fit.model_std.n_c;
        row["beta"] = fit.model.beta;
        row["beta_std"] = fit.model_std.beta;
        row["q_const_inv"] = fit.model.q_const_inv;
        row["q_const_std"] = fit.model_std.q_const_inv;
        row["rms_residual"] = fit.rms_residual;
        rows.push_back(std::move(row));
        ++successes;
        continue;
      }
      if (baseline) {
        sweep = resq::delta_qi(sweep, *baseline);
        if (args.emit_delta)
          resq::io::write_sweep(out_path(ctx, stem + ".delta.csv"), sweep);
      }
      temp_sweeps.push_back({file, stem, std::move(sweep)});
    } catch (const resq::Error& e) {
      json row;
      row["file"] = file;
      row["error"] = e.what();
      rows.push_back(std::move(row));
      std::fprintf(stderr, "resq sweep: %s: %s\n", file.c_str(), e.what());
      ++failures;
    }
  }

  if (!temp_sweeps.empty()) {
    if (args.trace_material.empty() || args.bridge_material.empty())
      throw resq::InvalidArgumentError(
          "temperature sweeps need --trace-material and --bridge-material");
    const auto& trace = ctx.config.material(args.trace_material);
    const auto& bridge = ctx.config.material(args.bridge_material);
    if (args.shared_q_other || ctx.config.shared_q_other) {
      std::vector<resq::LossSweep> sweeps;
      sweeps.reserve(temp_sweeps.size());
      for (auto& item : temp_sweeps) sweeps.push_back(item.sweep);
      const auto shared = resq::fit_participation_shared(sweeps, trace, bridge, options);
      report.body()["shared_q_other_inv"] = shared.q_other_inv;
      report.body()["shared_q_other_std"] = shared.q_other_std;
      for (std::size_t i = 0; i < temp_sweeps.size(); ++i) {
        rows.push_back(
            participation_row(temp_sweeps[i].sweep, shared.fits[i], temp_sweeps[i].file));
        if (args.emit_model)
          emit_sweep_model(ctx, temp_sweeps[i].sweep, shared.fits[i], trace, bridge,
                           temp_sweeps[i].stem);
        ++successes;
      }
    } else {
      for (const auto& item : temp_sweeps) {
        try {
          const auto fit = resq::fit_participation(item.sweep, trace, bridge, options);
          rows.push_back(participation_row(item.sweep, fit, item.file));
          if (args.emit_model)
            emit_sweep_model(ctx, item.sweep, fit, trace, bridge, item.stem);
          ++successes;
        } catch (const resq::Error& e) {
          json row;
          row["file"] = item.file;
          row["error"] = e.what();
          rows.push_back(std::move(row));
          std::fprintf(stderr, "resq sweep: %s: %s\n", item.file.c_str(), e.what());
          ++failures;
        }
      }
    }
  }

  report.body()["rows"] = std::move(rows);
  emit_report(ctx, report, args.output);
  return successes > 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// predict

struct PredictArgs {
  std::string trace_material;
  std::string bridge_material;
  std::vector<std::string> p_values;
  std::string temperatures = "0.02:1.1:0.045";
  std::string frequency;
  std::string q_other_inv = "0";
  std::string l_g = "16pH";
  std::string output = "-";
};

int run_predict(const Context& ctx, const PredictArgs& args) {
  const auto& trace = ctx.config.material(args.trace_material);
  const auto& bridge = ctx.config.material(args.bridge_material);
  const double f = resq::units::parse_frequency(args.frequency);
  const double q_other = resq::units::parse_double(args.q_other_inv);
  const double l_g = resq::units::parse_inductance(args.l_g);
  std::vector<double> ps;
  for (const auto& p : args.p_values) {
    const double value = resq::units::parse_double(p);
    if (!(value >= 0.0 && value <= 1.0))
      throw resq::InvalidArgumentError("participation must lie in [0, 1]: " + p);
    ps.push_back(value);
  }
  if (ps.empty()) ps.push_back(0.0);
  const auto temps = parse_grid(args.temperatures, resq::units::parse_temperature);

  const auto geometry = resq::ResonatorGeometry::from_reference(
      f, l_g, trace, bridge, 0.010, ctx.config.gap_model);

  auto report = make_report(ctx, "predict");
  report.set_option("frequency_hz", f);
  report.set_option("l_g_h", l_g);
  report.set_option("q_other_inv", q_other);
  json rows = json::array();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  int out_of_range = 0;
  for (double p : ps) {
    resq::CompositeLossModel model{p, q_other};
    for (double t : temps) {
      json row;
      row["p"] = p;
      row["temperature_k"] = t;
      try {
        const double loss = resq::composite_loss(model, t, f, trace, bridge,
                                                 ctx.config.gap_model);
        row["qi_inv"] = loss;
        row["q_i"] = loss > 0.0 ? 1.0 / loss : nan;
        row["df_over_f"] =
            resq::fractional_frequency_shift(geometry, p, t, ctx.config.gap_model);
      } catch (const resq::DomainError&) {
        row["qi_inv"] = nan;
        row["q_i"] = nan;
        row["df_over_f"] = nan;
        ++out_of_range;
      }
      rows.push_back(std::move(row));
    }
  }
  if (out_of_range > 0)
    std::fprintf(stderr,
                 "resq predict: %d point(s) at or above a critical temperature; "
                 "emitted nan\n",
                 out_of_range);
  report.body()["columns"] = {"p", "temperature_k", "qi_inv", "q_i", "df_over_f"};
  report.body()["rows"] = std::move(rows);
  emit_report(ctx, report, args.output);
  return 0;
}

// ---------------------------------------------------------------------------
// synth

struct SynthTraceArgs {
  std::string out;
  std::string f_r = "6GHz";
  double q_l = 2e5;
  double q_c = 3e5;
  double phi = 0.2;
  double s_x = 1.0;
  double s_y = 0.0;
  double linewidths = 20.0;
  int n_points = 401;
  double noise = 0.0;
  std::string power_dbm;
  std::string temperature;
  std::string label;
};

int run_synth_trace(const Context& ctx, const SynthTraceArgs& args) {
  resq::DcmParams params;
  params.s_x = args.s_x;
  params.s_y = args.s_y;
  params.f_r = resq::units::parse_frequency(args.f_r);
  params.q_l = args.q_l;
  params.q_c_mag = args.q_c;
  params.phi = args.phi;
  const double span = args.linewidths * params.f_r / params.q_l;
  auto trace = resq::synthesize_trace(params, args.n_points, span, args.noise,
                                      ctx.config.seed);
  if (!args.power_dbm.empty()) {
    trace.applied_power_dbm = resq::units::parse_double(args.power_dbm);
    trace.line_attenuation_db = ctx.config.attenuation_db;
  }
  if (!args.temperature.empty())
    trace.temperature = resq::units::parse_temperature(args.temperature);
  trace.label = args.label;
  std::map<std::string, std::string> meta;
  meta["true_f_r_hz"] = resq::io::format_double(params.f_r);
  meta["true_q_l"] = resq::io::format_double(params.q_l);
  meta["true_q_c_mag"] = resq::io::format_double(params.q_c_mag);
  meta["true_phi"] = resq::io::format_double(params.phi);
  meta["noise_sigma"] = resq::io::format_double(args.noise);
  meta["seed"] = std::to_string(ctx.config.seed);
  resq::io::write_trace(args.out, trace, meta);
  return 0;
}

struct SynthTempSweepArgs {
  std::string out;
  double p = 0.0;
  double q_other_inv = 0.0;
  std::string trace_material = "ta";
  std::string bridge_material = "al";
  std::string frequency = "6GHz";
  std::string t_min = "0.1", t_max = "1.1";
  int n_points = 30;
  double noise_rel = 0.0;
  int n_bridges = 0;
  std::string label;
};

int run_synth_temp_sweep(const Context& ctx, const SynthTempSweepArgs& args) {
  const auto& trace = ctx.config.material(args.trace_material);
  const auto& bridge = ctx.config.material(args.bridge_material);
  const double f = resq::units::parse_frequency(args.frequency);
  const auto temps = linspace(resq::units::parse_temperature(args.t_min),
                              resq::units::parse_temperature(args.t_max), args.n_points);
  resq::CompositeLossModel model{args.p, args.q_other_inv};
  auto sweep = resq::synthesize_temperature_sweep(model, trace, bridge, temps, f,
                                                  args.noise_rel, ctx.config.seed,
                                                  ctx.config.gap_model);
  sweep.n_bridges = args.n_bridges;
  if (!args.label.empty()) sweep.label = args.label;
  std::map<std::string, std::string> meta;
  meta["true_p"] = resq::io::format_double(args.p);
  meta["true_q_other_inv"] = resq::io::format_double(args.q_other_inv);
  meta["seed"] = std::to_string(ctx.config.seed);
  resq::io::write_sweep(args.out, sweep, meta);
  return 0;
}

struct SynthPowerSweepArgs {
  std::string out;
  double q_tls0_inv = 2e-6;
  double n_c = 10.0;
  double beta = 1.0;
  double q_const_inv = 5e-7;
  double n_min = 0.1;
  double n_max = 1e6;
  int n_points = 25;
  double noise_rel = 0.0;
  std::string label;
};

int run_synth_power_sweep(const Context& ctx, const SynthPowerSweepArgs& args) {
  resq::PowerLossModel model;
  model.q_tls0_inv = args.q_tls0_inv;
  model.n_c = args.n_c;
  model.beta = args.beta;
  model.q_const_inv = args.q_const_inv;
  auto sweep = resq::synthesize_power_sweep(model, logspace(args.n_min, args.n_max,
                                                            args.n_points),
                                            args.noise_rel, ctx.config.seed);
  if (!args.label.empty()) sweep.label = args.label;
  std::map<std::string, std::string> meta;
  meta["true_q_tls0_inv"] = resq::io::format_double(args.q_tls0_inv);
  meta["true_n_c"] = resq::io::format_double(args.n_c);
  meta["true_beta"] = resq::io::format_double(args.beta);
  meta["true_q_const_inv"] = resq::io::format_double(args.q_const_inv);
  meta["seed"] = std::to_string(ctx.config.seed);
  resq::io::write_sweep(args.out, sweep, meta);
  return 0;
}

struct SynthFieldsArgs {
  std::string out;
  double p = 0.1;
  int n_samples = 200;
  std::string frequency = "6GHz";
};

int run_synth_fields(const Context& ctx, const SynthFieldsArgs& args) {
  if (!(args.p > 0.0 && args.p < 1.0))
    throw resq::InvalidArgumentError("synth fields: p must be in (0, 1)");
  if (args.n_samples < 10)
    throw resq::InvalidArgumentError("synth fields: need at least 10 samples");
  std::mt19937_64 rng(ctx.config.seed);
  std::uniform_real_distribution<double> uni(0.1, 1.0);
  resq::FieldSampleSet set;
  set.f_r = resq::units::parse_frequency(args.frequency);
  const int n_chip = args.n_samples * 6 / 10;
  const int n_bridge = args.n_samples * 3 / 10;
  const int n_volume = std::max(args.n_samples - n_chip - n_bridge, 1);
  double chip_sum = 0.0;
  for (int i = 0; i < n_chip; ++i) {
    resq::SurfaceSample s{resq::FieldRegion::chip, uni(rng), uni(rng)};
    chip_sum += s.h_mag_sq * s.area_weight;
    set.surface_samples.push_back(s);
  }
  std::vector<resq::SurfaceSample> bridge;
  double bridge_sum = 0.0;
  for (int i = 0; i < n_bridge; ++i) {
    resq::SurfaceSample s{resq::FieldRegion::bridge, uni(rng), uni(rng)};
    bridge_sum += s.h_mag_sq * s.area_weight;
    bridge.push_back(s);
  }
  // Rescale the bridge samples so the target participation is exact.
  const double scale = args.p / (1.0 - args.p) * chip_sum / bridge_sum;
  for (auto& s : bridge) {
    s.h_mag_sq *= scale;
    set.surface_samples.push_back(s);
  }
  for (int i = 0; i < n_volume; ++i)
    set.volume_samples.push_back({uni(rng), uni(rng)});
  resq::io::write_field_samples(args.out, set);
  return 0;
}

// ---------------------------------------------------------------------------
// fields

struct FieldsArgs {
  std::string file;
  std::string material;
  std::string temperature;
  std::string frequency;
  std::string output = "-";
};

int run_fields(const Context& ctx, const FieldsArgs& args) {
  auto set = resq::io::read_field_samples(args.file);
  if (!args.frequency.empty()) set.f_r = resq::units::parse_frequency(args.frequency);
  const auto part = resq::participation_from_fields(set);

  auto report = make_report(ctx, "fields");
  report.add_input(args.file);
  auto& body = report.body();
  body["p"] = part.p;
  body["surface_integral_chip"] = part.surface_integral_chip;
  body["surface_integral_bridge"] = part.surface_integral_bridge;
  if (!set.volume_samples.empty()) {
    body["volume_integral"] = part.volume_integral;
    body["f_r_hz"] = set.f_r;
  }

  if (!args.material.empty()) {
    if (args.temperature.empty())
      throw resq::InvalidArgumentError("--material needs --temperature");
    const auto& mat = ctx.config.material(args.material);
    const double t = resq::units::parse_temperature(args.temperature);
    if (!(std::isfinite(set.f_r) && set.f_r > 0.0))
      throw resq::InvalidArgumentError(
          "surface resistance needs f_r (file metadata or --frequency)");
    const double r_s = resq::mb::surface_resistance(mat, t, set.f_r, ctx.config.gap_model);
    body["surface_resistance_ohm"] = r_s;
    body["dissipated_power_w"] = resq::dissipated_power(r_s, set);
    if (!set.volume_samples.empty())
      body["q_s_inv"] = resq::limiting_q_inv(mat, t, set, ctx.config.gap_model);
  }
  emit_report(ctx, report, args.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Microwave loss analysis for superconducting resonators"};
  app.set_version_flag("--version", std::string("resq ") + kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir, format, gap_model;
  double attenuation_db = -1.0;
  std::uint64_t seed = 0;
  bool seed_given = false, no_cache = false;
  app.add_option("--config", config_path, "Configuration file")
      ->envname("RESQ_CONFIG");
  app.add_option("--out-dir", out_dir, "Directory for auxiliary outputs");
  app.add_option("--format", format, "Report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--attenuation-db", attenuation_db, "Input line attenuation in dB");
  app.add_option("--gap-model", gap_model,
                 "Gap temperature dependence: interpolation, self_consistent, constant");
  app.add_option("--seed", seed, "Seed for synthesis and bootstrap")
      ->each([&seed_given](const std::string&) { seed_given = true; });
  app.add_flag("--no-cache", no_cache, "Disable the conductivity cache");

  ConductivityArgs cond;
  auto* cond_cmd = app.add_subcommand("conductivity", "Tabulate film response against T");
  cond_cmd->add_option("--material", cond.material, "Film material")->required();
  cond_cmd->add_option("--f,--frequency", cond.frequency, "Readout frequency")->required();
  cond_cmd
      ->add_option("--t,--temperatures", cond.temperatures,
                   "Temperatures: start:stop:step or comma list")
      ->required();
  cond_cmd->add_option("-o,--output", cond.output, "Output file or - for stdout");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit S21 traces");
  fit_cmd->add_option("traces", fit.traces, "Trace CSV files")->required();
  fit_cmd->add_flag("--overlay", fit.overlay, "Write data+model overlay CSVs");
  fit_cmd->add_option("-o,--output", fit.output, "Output file or - for stdout");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Fit loss sweeps");
  sweep_cmd->add_option("sweeps", sweep.sweeps, "Sweep CSV files")->required();
  sweep_cmd->add_option("--trace-material", sweep.trace_material, "Trace film");
  sweep_cmd->add_option("--bridge-material", sweep.bridge_material, "Bridge film");
  sweep_cmd->add_option("--baseline", sweep.baseline,
                        "Baseline sweep to subtract before fitting");
  sweep_cmd->add_flag("--emit-delta", sweep.emit_delta, "Write baseline-subtracted sweeps");
  sweep_cmd->add_flag("--emit-model", sweep.emit_model, "Write fitted model curves");
  sweep_cmd->add_flag("--shared-qother", sweep.shared_q_other,
                      "Share the constant loss across sweeps");
  sweep_cmd->add_option("-o,--output", sweep.output, "Output file or - for stdout");

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Forward-model loss and shift");
  predict_cmd->add_option("--trace-material", predict.trace_material, "Trace film")
      ->required();
  predict_cmd->add_option("--bridge-material", predict.bridge_material, "Bridge film")
      ->required();
  predict_cmd->add_option("--p", predict.p_values, "Participation values")->delimiter(',');
  predict_cmd->add_option("--t,--temperatures", predict.temperatures,
                          "Temperatures: start:stop:step or comma list");
  predict_cmd->add_option("--f,--frequency", predict.frequency, "Resonance frequency")
      ->required();
  predict_cmd->add_option("--q-other-inv", predict.q_other_inv, "Constant loss");
  predict_cmd->add_option("--lg", predict.l_g, "Geometric inductance");
  predict_cmd->add_option("-o,--output", predict.output, "Output file or - for stdout");

  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic data");
  synth_cmd->require_subcommand(1);

  SynthTraceArgs strace;
  auto* strace_cmd = synth_cmd->add_subcommand("trace", "Synthetic S21 trace");
  strace_cmd->add_option("--out", strace.out, "Output CSV")->required();
  strace_cmd->add_option("--fr", strace.f_r, "Resonance frequency");
  strace_cmd->add_option("--ql", strace.q_l, "Loaded Q");
  strace_cmd->add_option("--qc", strace.q_c, "Coupling Q magnitude");
  strace_cmd->add_option("--phi", strace.phi, "Rotation in radians");
  strace_cmd->add_option("--sx", strace.s_x, "Baseline real part");
  strace_cmd->add_option("--sy", strace.s_y, "Baseline imaginary part");
  strace_cmd->add_option("--linewidths", strace.linewidths, "Span in units of f_r/q_l");
  strace_cmd->add_option("--n-points", strace.n_points, "Points in the trace");
  strace_cmd->add_option("--noise", strace.noise, "Relative complex noise RMS");
  strace_cmd->add_option("--power-dbm", strace.power_dbm, "Drive power metadata");
  strace_cmd->add_option("--temperature", strace.temperature, "Temperature metadata");
  strace_cmd->add_option("--label", strace.label, "Trace label metadata");

  SynthTempSweepArgs stemp;
  auto* stemp_cmd = synth_cmd->add_subcommand("temp-sweep", "Synthetic loss-vs-T sweep");
  stemp_cmd->add_option("--out", stemp.out, "Output CSV")->required();
  stemp_cmd->add_option("--p", stemp.p, "Bridge participation");
  stemp_cmd->add_option("--q-other-inv", stemp.q_other_inv, "Constant loss");
  stemp_cmd->add_option("--trace-material", stemp.trace_material, "Trace film");
  stemp_cmd->add_option("--bridge-material", stemp.bridge_material, "Bridge film");
  stemp_cmd->add_option("--frequency", stemp.frequency, "Resonance frequency");
  stemp_cmd->add_option("--t-min", stemp.t_min, "Grid start");
  stemp_cmd->add_option("--t-max", stemp.t_max, "Grid end");
  stemp_cmd->add_option("--n-points", stemp.n_points, "Grid size");
  stemp_cmd->add_option("--noise-rel", stemp.noise_rel, "Relative noise");
  stemp_cmd->add_option("--n-bridges", stemp.n_bridges, "Bridge count metadata");
  stemp_cmd->add_option("--label", stemp.label, "Sweep label");

  SynthPowerSweepArgs spower;
  auto* spower_cmd = synth_cmd->add_subcommand("power-sweep", "Synthetic loss-vs-n sweep");
  spower_cmd->add_option("--out", spower.out, "Output CSV")->required();
  spower_cmd->add_option("--q-tls0-inv", spower.q_tls0_inv, "Low-power TLS loss");
  spower_cmd->add_option("--n-c", spower.n_c, "Critical photon number");
  spower_cmd->add_option("--beta", spower.beta, "Saturation exponent");
  spower_cmd->add_option("--q-const-inv", spower.q_const_inv, "Constant loss");
  spower_cmd->add_option("--n-min", spower.n_min, "Lowest photon number");
  spower_cmd->add_option("--n-max", spower.n_max, "Highest photon number");
  spower_cmd->add_option("--n-points", spower.n_points, "Grid size");
  spower_cmd->add_option("--noise-rel", spower.noise_rel, "Relative noise");
  spower_cmd->add_option("--label", spower.label, "Sweep label");

  SynthFieldsArgs sfields;
  auto* sfields_cmd = synth_cmd->add_subcommand("fields", "Synthetic field samples");
  sfields_cmd->add_option("--out", sfields.out, "Output CSV")->required();
  sfields_cmd->add_option("--p", sfields.p, "Target bridge participation");
  sfields_cmd->add_option("--n-samples", sfields.n_samples, "Total sample count");
  sfields_cmd->add_option("--f,--frequency", sfields.frequency, "Resonance frequency");

  FieldsArgs fields;
  auto* fields_cmd = app.add_subcommand("fields", "Participation from field samples");
  fields_cmd->add_option("file", fields.file, "Field sample CSV")->required();
  fields_cmd->add_option("--material", fields.material, "Bridge material for R_s");
  fields_cmd->add_option("--temperature", fields.temperature, "Film temperature");
  fields_cmd->add_option("--f,--frequency", fields.frequency, "Override f_r metadata");
  fields_cmd->add_option("-o,--output", fields.output, "Output file or - for stdout");

  // Let global flags (--format, --seed, ...) appear after the subcommand too.
  for (auto* sub : app.get_subcommands({})) {
    sub->fallthrough();
    for (auto* nested : sub->get_subcommands({})) nested->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    Context ctx;
    if (!config_path.empty()) {
      ctx.config_text = resq::io::read_text_file(config_path);
      ctx.config = resq::io::AnalysisConfig::from_text(ctx.config_text, config_path);
    } else {
      ctx.config = resq::io::AnalysisConfig::defaults();
    }
    if (!out_dir.empty()) ctx.config.out_dir = out_dir;
    if (!format.empty()) ctx.config.format = format;
    if (attenuation_db >= 0.0) ctx.config.attenuation_db = attenuation_db;
    if (!gap_model.empty()) ctx.config.gap_model = resq::parse_gap_model(gap_model);
    if (seed_given) ctx.config.seed = seed;
    if (no_cache) ctx.config.cache = false;
    resq::mb::set_cache_enabled(ctx.config.cache);

    if (app.got_subcommand(cond_cmd)) return run_conductivity(ctx, cond);
    if (app.got_subcommand(fit_cmd)) return run_fit(ctx, fit);
    if (app.got_subcommand(sweep_cmd)) return run_sweep(ctx, sweep);
    if (app.got_subcommand(predict_cmd)) return run_predict(ctx, predict);
    if (app.got_subcommand(synth_cmd)) {
      if (synth_cmd->got_subcommand(strace_cmd)) return run_synth_trace(ctx, strace);
      if (synth_cmd->got_subcommand(stemp_cmd)) return run_synth_temp_sweep(ctx, stemp);
      if (synth_cmd->got_subcommand(spower_cmd)) return run_synth_power_sweep(ctx, spower);
      if (synth_cmd->got_subcommand(sfields_cmd)) return run_synth_fields(ctx, sfields);
    }
    if (app.got_subcommand(fields_cmd)) return run_fields(ctx, fields);
    std::fprintf(stderr, "resq: no subcommand\n");
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "resq: error: %s\n", e.what());
    return classify_error(e);
  }
}
