#include "mrspec/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrspec/aliasing.hpp"
#include "mrspec/bench.hpp"
#include "mrspec/blm.hpp"
#include "mrspec/errors.hpp"
#include "mrspec/io.hpp"
#include "mrspec/kernels.hpp"
#include "mrspec/likelihood.hpp"
#include "mrspec/process.hpp"
#include "mrspec/svg.hpp"
#include "mrspec/uncertainty.hpp"

namespace mrspec::cli {

namespace fs = std::filesystem;
using io::InputError;
using io::json;

namespace {

struct Context {
  json config;
  fs::path base_dir;  // relative paths in the config resolve against this
  fs::path out_dir;
  std::ostream& out;
};

fs::path resolve(const Context& ctx, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : ctx.base_dir / path;
}

std::uint64_t seed_of(const json& c) { return io::field_or<std::uint64_t>(c, "seed", 0); }

// A config names either a SARMA "model" or a "logspectrum" {"coefficients": [...]}.
Spectrum spectrum_from(const json& c) {
  if (c.contains("model")) return make_spectrum(io::model_from_json(c.at("model")));
  if (c.contains("logspectrum"))
    return make_spectrum(LogSpectrum(io::required_field<std::vector<double>>(c.at("logspectrum"), "coefficients")));
  throw InputError("config needs a 'model' or 'logspectrum' field");
}

void write_csv(const Context& ctx, const std::string& name, const std::string& content) {
  io::write_text(ctx.out_dir / name, content);
}

svg::Panel band_panel(const SpectrumSummary& s, const std::string& title) {
  svg::Panel p;
  p.title = title;
  p.x_label = "frequency";
  p.y_label = "log spectrum";
  p.bands.push_back({s.omegas, s.lo90, s.hi90, "#1f77b4", 0.15});
  p.bands.push_back({s.omegas, s.lo50, s.hi50, "#1f77b4", 0.3});
  p.lines.push_back({"adjusted mean", s.omegas, s.mean, "#000000", false});
  return p;
}

std::string summary_csv(const SpectrumSummary& s) {
  return io::table_csv({"omega", "mean", "lo50", "hi50", "lo90", "hi90"},
                       {s.omegas, s.mean, s.lo50, s.hi50, s.lo90, s.hi90});
}

// ---------------------------------------------------------------- commands

void cmd_simulate(Context& ctx) {
  const auto& c = ctx.config;
  const int n = io::required_field<int>(c, "n");
  const auto f = spectrum_from(c);
  SampledSeries series = simulate(f, n, seed_of(c));
  const int stride = io::field_or<int>(c, "stride", 1);
  const int offset = io::field_or<int>(c, "offset", 0);
  if (stride != 1 || offset != 0) series = subsample(series, stride, offset);
  io::write_series(ctx.out_dir / "series.csv", series);
  ctx.out << "wrote " << series.size() << " observations to " << (ctx.out_dir / "series.csv").string() << '\n';
}

void cmd_spectrum(Context& ctx) {
  const auto& c = ctx.config;
  const int delta = io::field_or<int>(c, "delta", 1);
  const auto grid = standard_grid(io::field_or<std::size_t>(c, "n_omega", 128));
  const auto f = spectrum_from(c);
  const auto values = fold(f, delta, grid);
  std::vector<double> logs;
  for (double v : values) logs.push_back(std::log(v));
  write_csv(ctx, "spectrum.csv", io::table_csv({"nu", "f", "log_f"}, {grid, values, logs}));
  svg::Panel p;
  p.title = delta == 1 ? "spectral density" : "folded spectral density, delta=" + std::to_string(delta);
  p.x_label = "frequency (cycles per observation)";
  p.y_label = "log f";
  p.lines.push_back({"log f", grid, logs, "", false});
  io::write_text(ctx.out_dir / "spectrum.svg", svg::render(p));
}

ExperimentDesign design_from(const json& c) {
  ExperimentDesign d;
  d.n_low = io::field_or<int>(c, "n_low", d.n_low);
  d.n_high = io::field_or<int>(c, "n_high", d.n_high);
  d.delta_low = io::field_or<int>(c, "delta_low", d.delta_low);
  d.replicates = io::field_or<int>(c, "replicates", d.replicates);
  d.omega_true = io::field_or<double>(c, "omega_true", d.omega_true);
  d.modulus = io::field_or<double>(c, "modulus", d.modulus);
  d.seed = seed_of(c);
  if (c.contains("grid"))
    d.grid = io::field_or<std::vector<double>>(c, "grid", {});
  else
    d.grid = default_omega_grid(io::field_or<int>(c, "grid_size", 201));
  return d;
}

void cmd_loglik_surface(Context& ctx) {
  const auto& c = ctx.config;
  const ExperimentDesign base = design_from(c);
  // Optional sweeps produce one labelled curve per value.
  std::vector<std::pair<std::string, ExperimentDesign>> runs;
  if (c.contains("n_high_sweep")) {
    for (int v : io::field_or<std::vector<int>>(c, "n_high_sweep", {})) {
      ExperimentDesign d = base;
      d.n_high = v;
      runs.emplace_back("N_high=" + std::to_string(v), d);
    }
  } else if (c.contains("n_low_sweep")) {
    for (int v : io::field_or<std::vector<int>>(c, "n_low_sweep", {})) {
      ExperimentDesign d = base;
      d.n_low = v;
      runs.emplace_back("N_low=" + std::to_string(v), d);
    }
  } else {
    runs.emplace_back("surface", base);
  }
  if (runs.empty()) throw InputError("sweep list is empty");

  std::vector<std::string> header{"omega"};
  std::vector<std::vector<double>> columns{base.grid};
  std::vector<std::vector<double>> errors{base.grid};
  svg::Panel p;
  p.title = "Monte Carlo average log-likelihood surfaces (max-aligned)";
  p.x_label = "omega0";
  p.y_label = "log-likelihood";
  p.marker_x = base.omega_true;
  for (const auto& [label, d] : runs) {
    const auto s = mc_average_surface(d);
    header.push_back(runs.size() == 1 ? "loglik" : label);
    columns.push_back(s.loglik);
    errors.push_back(s.stderr_aligned);
    p.lines.push_back({label, s.omegas, s.loglik, "", false});
  }
  write_csv(ctx, "surface.csv", io::table_csv(header, columns));
  auto err_header = header;
  if (runs.size() == 1) err_header[1] = "stderr";
  write_csv(ctx, "surface_stderr.csv", io::table_csv(err_header, errors));
  io::write_text(ctx.out_dir / "surface.svg", svg::render(p));
}

PriorSpec prior_of(const json& c) { return io::prior_from_json(c.contains("prior") ? c.at("prior") : json()); }

void write_belief(const Context& ctx, const std::string& stem, const BeliefState& state,
                  std::span<const double> grid) {
  io::write_text(ctx.out_dir / (stem + ".json"), io::to_json(state).dump(2) + "\n");
  write_csv(ctx, stem + "_summary.csv", summary_csv(spectrum_summary(state, grid)));
}

void cmd_estimate(Context& ctx) {
  const auto& c = ctx.config;
  if (!c.contains("series") || !c.at("series").is_array() || c.at("series").empty())
    throw InputError("missing required field 'series' (non-empty array)");
  std::vector<PeriodogramData> data;
  std::size_t k = 0;
  for (const auto& entry : c.at("series")) {
    const auto csv = io::required_field<std::string>(entry, "csv");
    const auto sidecar = io::field_or<std::string>(entry, "sidecar", "");
    const auto id = io::field_or<std::string>(entry, "id", "series" + std::to_string(++k));
    const auto series = io::read_series(resolve(ctx, csv), sidecar.empty() ? fs::path{} : resolve(ctx, sidecar));
    data.push_back(log_periodogram(series, id));
  }
  const auto grid = standard_grid(io::field_or<std::size_t>(c, "n_omega", 128));
  std::vector<DataLayout> layouts;
  for (const auto& d : data) layouts.push_back(d.layout);
  const BayesLinearEstimator est(prior_belief(prior_of(c)), layouts, io::field_or<int>(c, "mc_samples", 2000),
                                 seed_of(c));
  const auto result = est.adjust_sequentially(data);
  if (data.size() > 1)
    for (std::size_t s = 0; s < result.stages.size(); ++s)
      write_belief(ctx, "stage_" + std::to_string(s + 1), result.stages[s], grid);
  io::write_text(ctx.out_dir / "belief.json", io::to_json(result.final_state).dump(2) + "\n");
  const auto summary = spectrum_summary(result.final_state, grid);
  write_csv(ctx, "summary.csv", summary_csv(summary));
  io::write_text(ctx.out_dir / "bands.svg",
                 svg::render(band_panel(summary, "adjusted log-spectrum with 50% and 90% intervals")));
}

std::vector<std::pair<int, int>> pairs_of(const json& c, const char* name) {
  std::vector<std::pair<int, int>> out;
  for (const auto& v : io::field_or<std::vector<std::vector<int>>>(c, name, {})) {
    if (v.size() != 2) throw InputError(std::string("field '") + name + "' must hold [delta, N] pairs");
    out.emplace_back(v[0], v[1]);
  }
  return out;
}

void cmd_bench(Context& ctx) {
  const auto& c = ctx.config;
  std::vector<std::pair<int, int>> rows = pairs_of(c, "d1");
  std::vector<std::pair<int, int>> cols = pairs_of(c, "d2");
  if (rows.empty() && cols.empty()) {
    const auto deltas = io::field_or<std::vector<int>>(c, "deltas", {1, 2, 3, 4, 5, 6});
    const auto ns = io::field_or<std::vector<int>>(c, "Ns", {16, 32, 64, 128});
    for (int d : deltas)
      for (int n : ns) rows.emplace_back(d, n);
    cols = rows;
  }
  if (rows.empty() || cols.empty()) throw InputError("bench needs non-empty 'd1' and 'd2' lists");
  BenchDesign base;
  base.replicates = io::field_or<int>(c, "replicates", 100);
  base.n_omega = io::field_or<std::size_t>(c, "n_omega", 128);
  base.mc_samples = io::field_or<int>(c, "mc_samples", 2000);
  base.estimator = io::field_or<std::string>(c, "estimator", "blm");
  base.prior = prior_of(c);
  base.seed = seed_of(c);
  const auto table = table_sweep(rows, cols, base);
  write_csv(ctx, "table.csv", table_csv(table, false));
  write_csv(ctx, "table_stderr.csv", table_csv(table, true));
}

void cmd_compare_interp(Context& ctx) {
  const auto& c = ctx.config;
  InterpolationScenario sc;
  sc.omega_peak = io::field_or<double>(c, "omega_peak", sc.omega_peak);
  sc.modulus = io::field_or<double>(c, "modulus", sc.modulus);
  sc.length = io::field_or<int>(c, "length", sc.length);
  sc.history_fraction = io::field_or<double>(c, "history_fraction", sc.history_fraction);
  sc.history_stride = io::field_or<int>(c, "history_stride", sc.history_stride);
  sc.mc_samples = io::field_or<int>(c, "mc_samples", sc.mc_samples);
  sc.n_omega = io::field_or<std::size_t>(c, "n_omega", sc.n_omega);
  sc.prior = prior_of(c);
  sc.seed = seed_of(c);
  const auto r = compare_interpolation(sc);
  write_csv(ctx, "overlay.csv",
            io::table_csv({"omega", "truth", "blm_raw", "blm_interp", "ar_fit", "smoothed_pgram"},
                          {r.omegas, r.truth, r.blm_raw, r.blm_interpolated, r.ar_fit, r.smoothed_periodogram}));
  std::vector<double> t(r.interpolated.size()), truth_path, observed(r.interpolated.size(), std::nan(""));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(r.interpolated.base_index(i));
  truth_path.assign(r.full_path.begin(), r.full_path.begin() + static_cast<long>(t.size()));
  for (const auto& o : r.observed) observed[static_cast<std::size_t>(o.index - r.interpolated.offset)] = o.value;
  write_csv(ctx, "series.csv", io::table_csv({"index", "observed", "interpolated", "truth"},
                                             {t, observed, r.interpolated.values, truth_path}));

  svg::Panel p;
  p.title = "log-spectrum estimates: raw vs interpolated data";
  p.x_label = "frequency";
  p.y_label = "log f";
  p.lines = {{"truth", r.omegas, r.truth, "#000000", false},
             {"BLM raw", r.omegas, r.blm_raw, "#1f77b4", false},
             {"BLM interpolated", r.omegas, r.blm_interpolated, "#d62728", false},
             {"AR fit", r.omegas, r.ar_fit, "#2ca02c", true},
             {"smoothed periodogram", r.omegas, r.smoothed_periodogram, "#9467bd", true}};
  p.marker_x = sc.omega_peak;
  io::write_text(ctx.out_dir / "overlay.svg", svg::render(p));
  ctx.out << "power below 0.25: truth " << power_fraction_below(r.truth, r.omegas, 0.25) << ", AR fit "
          << power_fraction_below(r.ar_fit, r.omegas, 0.25) << ", smoothed periodogram "
          << power_fraction_below(r.smoothed_periodogram, r.omegas, 0.25) << '\n';
}

void cmd_pc_fan(Context& ctx) {
  const auto& c = ctx.config;
  const auto state = io::belief_from_json(io::read_json(resolve(ctx, io::required_field<std::string>(c, "belief"))));
  const auto grid = standard_grid(io::field_or<std::size_t>(c, "n_omega", 128));
  const auto count = std::min<std::size_t>(io::field_or<std::size_t>(c, "components", 9), state.size());
  std::string csv = "component,omega,q1,q2,q3,q4,q5,q6,q7,q8,q9\n";
  std::vector<svg::Panel> panels;
  for (std::size_t k = 0; k < count; ++k) {
    const auto fan = pc_fan(state, k, grid);
    svg::Panel p;
    p.title = "principal direction " + std::to_string(k + 1);
    p.legend = false;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      csv += std::to_string(k + 1) + "," + io::format_number(grid[g]);
      for (const auto& curve : fan.curves) csv += "," + io::format_number(curve[g]);
      csv += '\n';
    }
    for (std::size_t i = 0; i < fan.curves.size(); ++i)
      p.lines.push_back({"", grid, fan.curves[i], i == 4 ? "#000000" : "#1f77b4", i != 4});
    panels.push_back(std::move(p));
  }
  write_csv(ctx, "pc_fan.csv", csv);
  const auto summary = spectrum_summary(state, grid, true);
  svg::Panel head = band_panel(summary, "exponentiated adjusted mean with 50% and 90% intervals");
  head.y_label = "spectrum";
  io::write_text(ctx.out_dir / "pc_fan.svg", svg::render_stack(head, panels, 3, 3));
}

void cmd_quadrature(Context& ctx) {
  const auto& c = ctx.config;
  const auto g = sparse_grid(io::field_or<int>(c, "dim", 4), io::field_or<int>(c, "level", 3));
  std::vector<std::string> header{"w"};
  std::vector<std::vector<double>> cols{g.weights};
  for (int k = 0; k < g.dimension; ++k) {
    header.push_back("x" + std::to_string(k + 1));
    std::vector<double> col;
    for (const auto& node : g.nodes) col.push_back(node[static_cast<std::size_t>(k)]);
    cols.push_back(std::move(col));
  }
  write_csv(ctx, "grid.csv", io::table_csv(header, cols));
  ctx.out << g.nodes.size() << " nodes (d=" << g.dimension << ", level=" << g.level << ")\n";
}

void cmd_kolmogorov(Context& ctx) {
  const auto& c = ctx.config;
  const int quad = io::field_or<int>(c, "quad_points", 4096);
  const double v = kolmogorov_variance(spectrum_from(c), quad);
  write_csv(ctx, "kolmogorov.csv", io::table_csv({"quad_points", "prediction_variance"}, {{double(quad)}, {v}}));
  ctx.out << io::format_number(v) << '\n';
}

void cmd_diff_grid(Context& ctx) {
  const auto& c = ctx.config;
  const auto paths = io::required_field<std::vector<std::string>>(c, "beliefs");
  if (paths.empty()) throw InputError("field 'beliefs' must list at least one belief JSON");
  std::vector<BeliefState> states;
  for (const auto& p : paths) states.push_back(io::belief_from_json(io::read_json(resolve(ctx, p))));
  auto labels = io::field_or<std::vector<std::string>>(c, "labels", {});
  for (std::size_t i = labels.size(); i < states.size(); ++i) labels.push_back("belief" + std::to_string(i + 1));
  const auto grid = standard_grid(io::field_or<std::size_t>(c, "n_omega", 128));
  const auto curves = difference_grid(states, grid);
  const std::size_t n = states.size();
  std::vector<std::string> header{"omega"};
  std::vector<std::vector<double>> cols{grid};
  std::vector<svg::Panel> panels(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      header.push_back("g" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
      cols.push_back(curves[i][j]);
      if (j < i) continue;
      auto& p = panels[i * n + j];
      p.title = i == j ? labels[i] : labels[i] + " - " + labels[j];
      p.legend = false;
      p.lines.push_back({"", grid, curves[i][j], i == j ? "#000000" : "#d62728", false});
    }
  write_csv(ctx, "diff_grid.csv", io::table_csv(header, cols));
  io::write_text(ctx.out_dir / "diff_grid.svg",
                 svg::render_grid(panels, static_cast<int>(n), static_cast<int>(n), "log-spectra and differences"));
}

void write_manifest(const Context& ctx, const std::string& command) {
  json manifest{{"tool", "mrspec"},
                {"version", kVersion},
                {"command", command},
                {"config", ctx.config},
                {"kernel_isa", std::string(kernels::isa_name(kernels::active_isa()))}};
  io::write_text(ctx.out_dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral inference for time series observed at mixed sampling rates", "mrspec"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  const std::map<std::string, std::function<void(Context&)>> commands{
      {"simulate", cmd_simulate},        {"spectrum", cmd_spectrum},     {"loglik-surface", cmd_loglik_surface},
      {"estimate", cmd_estimate},        {"bench", cmd_bench},           {"compare-interp", cmd_compare_interp},
      {"pc-fan", cmd_pc_fan},            {"quadrature", cmd_quadrature}, {"kolmogorov", cmd_kolmogorov},
      {"diff-grid", cmd_diff_grid}};
  const std::map<std::string, std::string> help{
      {"simulate", "simulate a Gaussian path from a model or log-spectrum"},
      {"spectrum", "evaluate a (folded) spectral density"},
      {"loglik-surface", "Monte Carlo average likelihood surfaces over the AR(2) peak frequency"},
      {"estimate", "Bayes linear log-spectrum estimate from one or more series"},
      {"bench", "discrepancy benchmark table over (delta, N) designs"},
      {"compare-interp", "compare estimates from raw and spline-interpolated data"},
      {"pc-fan", "principal-direction fans of an adjusted belief"},
      {"quadrature", "export a sparse Gauss-Hermite grid"},
      {"kolmogorov", "one-step prediction variance of a spectrum"},
      {"diff-grid", "grid of mean log-spectra and their differences"}};

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::optional<int> delta;
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out_dir, "output directory");
    if (name == "spectrum") sub->add_option("--delta", delta, "fold the spectrum for stride delta");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }

  const auto* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  try {
    Context ctx{json::object(), fs::current_path(), fs::path(out_dir), out};
    if (!config_path.empty()) {
      ctx.config = io::read_json(config_path);
      if (!ctx.config.is_object()) throw InputError("config must be a JSON object");
      ctx.base_dir = fs::absolute(config_path).parent_path();
    }
    if (seed) ctx.config["seed"] = *seed;
    if (delta) ctx.config["delta"] = *delta;
    commands.at(name)(ctx);
    write_manifest(ctx, name);
    return kSuccess;
  } catch (const InputError& e) {
    err << "mrspec " << name << ": input error: " << e.what() << '\n';
    return kInputError;
  } catch (const ModelError& e) {
    err << "mrspec " << name << ": model error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const NumericalError& e) {
    err << "mrspec " << name << ": numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::invalid_argument& e) {
    err << "mrspec " << name << ": invalid input: " << e.what() << '\n';
    return kInputError;
  } catch (const std::domain_error& e) {
    err << "mrspec " << name << ": invalid input: " << e.what() << '\n';
    return kInputError;
  } catch (const json::exception& e) {
    err << "mrspec " << name << ": config error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "mrspec " << name << ": failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace mrspec::cli
