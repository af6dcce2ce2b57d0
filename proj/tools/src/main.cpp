#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cli_support.hpp"
#include "specmix/inference.hpp"
#include "specmix/panel_io.hpp"
#include "specmix/parallel.hpp"
#include "specmix/serialization.hpp"
#include "specmix/spectral.hpp"

namespace fs = std::filesystem;
using namespace specmix;
using namespace specmix::cli;

namespace {

struct Globals {
  std::optional<unsigned> threads;
  std::string config;
  std::string plot_data;
};

void emit_plot(const Globals& g, const PlotData& plot) {
  if (g.plot_data.empty()) return;
  ensure_directory(fs::path(g.plot_data).parent_path());
  write_file(g.plot_data, plot.csv());
}

std::string meta_json(const json& config) { return config.dump(); }

// simulate

struct SimulateArgs {
  ScenarioOptions scenario;
  std::string out = ".";
  std::string format = "csv";
  bool coefficients = false;
};

int run_simulate(const SimulateArgs& a, const Globals& g) {
  ScenarioConfig cfg = a.scenario.apply(ScenarioConfig{});
  const ScenarioTruth truth = scenario_truth(cfg);
  const SimulatedPanel panel = generate_panel(cfg, truth, cfg.seed);

  const json config = scenario_json(cfg);
  const std::string hash = config_hash(meta_json(config));
  const ArtifactMeta meta{meta_json(config), hash, cfg.seed};
  const fs::path dir(a.out);
  ensure_directory(dir);

  json files = json::object();
  const auto put = [&](const std::string& name, const std::string& contents) {
    write_file(dir / name, contents);
    files[name] = hex64(fnv1a64(contents));
  };
  const Matrix& X = panel.series.values();
  const std::string ext = a.format == "bin" ? ".bin" : ".csv";
  const auto encode = [&](const Matrix& m, PanelDomain domain) {
    if (a.format == "bin") return panel_to_binary(m);
    const std::vector<double> axis = axis_values(domain, m.cols());
    return panel_to_csv(m, axis);
  };
  put("panel" + ext, encode(X, PanelDomain::Time));
  const CoefficientPanel Y = coefficient_panel(panel.series, cfg.basis);
  if (a.coefficients) put("coefficients" + ext, encode(Y.values(), PanelDomain::Coefficient));
  put("truth.json", truth_to_json(truth, panel.U, meta));

  json manifest;
  manifest["config"] = config;
  manifest["config_hash"] = hash;
  manifest["seed"] = cfg.seed;
  manifest["files"] = files;
  manifest["panel_domain"] = "time";
  manifest["max_imaginary_residue"] = panel.max_imaginary_residue;
  manifest["arma_sign_convention"] = kArmaSignConvention;
  manifest["innovation_convention"] = kInnovationConvention;
  manifest["basis_normalization"] = kWaveletNormalization;
  write_json(dir / "manifest.json", manifest);

  if (!g.plot_data.empty()) {
    PlotData plot;
    plot.add("h_f", truth.h_f);
    plot.add("h_f_model", truth.h_f_model);
    const LogPeriodogramPanel P = log_periodogram(panel.series);
    plot.add("mean_log_periodogram", P.values().colwise().mean().transpose());
    for (Index s = 0; s < P.replicates(); ++s)
      plot.add("replicate_" + std::to_string(s + 1), P.row(s).transpose());
    emit_plot(g, plot);
  }
  std::cout << "simulate: S=" << cfg.S << " T=" << cfg.T << " scenario=" << to_string(cfg.correlation)
            << " seed=" << cfg.seed << " |K_h|=" << truth.K_h.size() << " |K_u|=" << truth.K_u.size()
            << " config_hash=" << hash << " -> " << dir.string() << '\n';
  return kExitOk;
}

// fit

struct FitArgs {
  std::string panel;
  std::string input = "series";
  FitOptions fit;
  int vanishing_moments = 6;
  std::string out = "model.json";
};

std::string source_hash(const fs::path& panel, std::uint64_t* seed = nullptr) {
  const auto prov = sibling_manifest(panel);
  if (!prov) return {};
  if (seed) *seed = prov->seed;
  return prov->config_hash;
}

int run_fit(const FitArgs& a, const Globals& g) {
  const WaveletBasisSpec basis{WaveletFamily::DaubechiesExtremalPhase, a.vanishing_moments};
  const CoefficientPanel Y = load_coefficients(a.panel, a.input, basis);
  const FitConfig cfg = a.fit.build();
  const ModelFit fit = a.fit.weights == "ols" ? fit_ols(Y, cfg) : fit_iterative_gls(Y, cfg);

  std::uint64_t seed = 0;
  const std::string source = source_hash(a.panel, &seed);
  json config = a.fit.to_json();
  config["input"] = a.input;
  config["vanishing_moments"] = a.vanishing_moments;
  config["source_config_hash"] = source.empty() ? json(nullptr) : json(source);
  const std::string text = model_fit_to_json(fit, ArtifactMeta{meta_json(config), {}, seed});
  ensure_directory(fs::path(a.out).parent_path());
  write_file(a.out, text + "\n");

  if (!g.plot_data.empty()) {
    PlotData plot;
    plot.add("h_f_hat", idwt(fit.h_hat, basis));
    emit_plot(g, plot);
  }
  std::cout << "fit: converged=" << (fit.converged ? "true" : "false") << " iterations=" << fit.iterations
            << " weights=" << (fit.weights_mode == WeightsMode::GLS ? "GLS" : "OLS") << " |K_h|=" << fit.K_h.size()
            << " |K_u|=" << fit.re_cov.K_u.size() << " -> " << a.out << '\n';
  return kExitOk;
}

// Model plus the hash of the data it was fitted on.
struct LoadedModel {
  ModelFit fit;
  std::string source_hash;
  int vanishing_moments = 6;
};

LoadedModel load_model(const std::string& path) {
  ArtifactMeta meta;
  LoadedModel m;
  m.fit = model_fit_from_json(read_file(path), &meta);
  const json config = parse_json(meta.config_json, path);
  if (config.contains("source_config_hash") && config["source_config_hash"].is_string())
    m.source_hash = config["source_config_hash"].get<std::string>();
  m.vanishing_moments = config.value("vanishing_moments", 6);
  return m;
}

void check_dimensions(const CoefficientPanel& Y, const ModelFit& fit) {
  require(Y.replicates() == fit.replicates() && Y.length() == fit.length(), ErrorKind::DimensionMismatch,
          "model is " + std::to_string(fit.replicates()) + " x " + std::to_string(fit.length()) + " but panel is " +
              std::to_string(Y.replicates()) + " x " + std::to_string(Y.length()));
}

// predict

struct PredictArgs {
  std::string panel;
  std::string model;
  std::string input = "series";
  bool exponentiate = false;
  std::string out = "curves.csv";
};

int run_predict(const PredictArgs& a, const Globals& g) {
  const LoadedModel m = load_model(a.model);
  const WaveletBasisSpec basis{WaveletFamily::DaubechiesExtremalPhase, m.vanishing_moments};
  const CoefficientPanel Y = load_coefficients(a.panel, a.input, basis);
  check_dimensions(Y, m.fit);
  warn_on_mismatch("panel", m.source_hash, source_hash(a.panel));

  const CoefficientPanel U = predict_random_effects(Y, m.fit);
  const Matrix curves = predict_replicate_spectra(m.fit, U, a.exponentiate, basis);
  const Vector freq = fourier_frequencies(curves.cols());
  ensure_directory(fs::path(a.out).parent_path());
  write_file(a.out, panel_to_csv(curves, as_span(freq)));

  if (!g.plot_data.empty()) {
    PlotData plot;
    Vector mean = idwt(m.fit.h_hat, basis);
    if (a.exponentiate) mean = mean.array().exp().matrix();
    plot.add("population_mean", mean);
    for (Index s = 0; s < curves.rows(); ++s) plot.add("replicate_" + std::to_string(s + 1), curves.row(s).transpose());
    emit_plot(g, plot);
  }
  std::cout << "predict: " << curves.rows() << " curves x " << curves.cols() << " frequencies -> " << a.out << '\n';
  return kExitOk;
}

// confidence

struct ConfidenceArgs {
  std::string panel;
  std::string model;
  std::string input = "series";
  std::string truth;
  std::string method = "known-v";
  std::string domain = "coefficient";
  double alpha = 0.05;
  int B = 1000;
  std::uint64_t seed = 1;
  FitOptions selection;
  std::string out = "region.json";
};

RegionMethod parse_region_method(const std::string& name) {
  if (name == "known-v") return RegionMethod::AsymptoticKnownV;
  if (name == "plugin") return RegionMethod::AsymptoticPlugin;
  if (name == "bootstrap") return RegionMethod::Bootstrap;
  return region_method_from_string(name);
}

int run_confidence(const ConfidenceArgs& a, const Globals& g) {
  require(a.alpha > 0.0 && a.alpha < 1.0, ErrorKind::InvalidArgument, "--alpha must lie in (0, 1)");
  const RegionMethod method = parse_region_method(a.method);
  const LoadedModel m = load_model(a.model);
  const WaveletBasisSpec basis{WaveletFamily::DaubechiesExtremalPhase, m.vanishing_moments};
  const CoefficientPanel Y = load_coefficients(a.panel, a.input, basis);
  check_dimensions(Y, m.fit);
  const std::string panel_hash = source_hash(a.panel);
  warn_on_mismatch("panel", m.source_hash, panel_hash);

  std::optional<ScenarioTruth> truth;
  std::optional<CovarianceModel> known;
  if (!a.truth.empty()) {
    const std::string text = read_file(a.truth);
    truth = truth_from_json(text);
    require(truth->h.size() == Y.length() && truth->G_S.size() == Y.replicates(), ErrorKind::DimensionMismatch,
            "truth record does not match the panel");
    const json tj = parse_json(text, a.truth);
    warn_on_mismatch("truth", panel_hash, tj.value("config_hash", std::string()));
    known = truth->covariance();
  }
  const ThresholdConfig cfg = a.selection.build().threshold;
  ConfidenceRegion region;
  if (method == RegionMethod::Bootstrap) {
    require(a.B >= 100, ErrorKind::InvalidArgument, "--B must be at least 100");
    const CovarianceModel V = known ? *known : m.fit.covariance();
    region = bootstrap_region(m.fit.h_hat, V, m.fit.weights, cfg, a.B, a.alpha, a.seed);
  } else {
    region = confidence_region(Y, m.fit, cfg, a.alpha, method, a.seed, known ? &*known : nullptr);
  }
  const bool covers = truth && region.contains(truth->h);
  const ConfidenceRegion reported = a.domain == "frequency" ? region.in_frequency_domain(basis) : region;

  json config = a.selection.to_json();
  config["method"] = to_string(method);
  config["alpha"] = a.alpha;
  config["domain"] = a.domain;
  config["bootstrap_draws"] = a.B;
  config["known_v_source"] = method == RegionMethod::AsymptoticPlugin ? "fitted" : (known ? "truth" : "fitted");
  config["source_config_hash"] = m.source_hash.empty() ? json(nullptr) : json(m.source_hash);
  ensure_directory(fs::path(a.out).parent_path());
  write_file(a.out, region_to_json(reported, ArtifactMeta{meta_json(config), {}, a.seed}) + "\n");

  if (!g.plot_data.empty()) {
    PlotData plot;
    plot.add("center", idwt(region.center, basis));
    if (truth) plot.add("h_f", truth->h_f);
    emit_plot(g, plot);
  }
  std::cout << "confidence: method=" << to_string(method) << " level=" << format_double(1.0 - a.alpha)
            << " radius=" << format_double(reported.radius) << " domain=" << a.domain;
  if (truth) std::cout << " contains_truth=" << (covers ? "true" : "false");
  std::cout << " -> " << a.out << '\n';
  return kExitOk;
}

// benchmark and coverage

struct HarnessArgs {
  std::string preset;
  ScenarioOptions scenario;
  std::optional<int> M;
  std::string panel_model = "time-series";
  std::vector<std::string> methods;
  std::optional<double> alpha;
  int B = 1000;
  bool per_rep = false;
  std::string out = ".";
};

MethodSpec parse_method(const std::string& token) {
  const std::size_t colon = token.find(':');
  const std::string name = token.substr(0, colon);
  MethodSpec spec;
  if (colon != std::string::npos) {
    try {
      spec.q = std::stod(token.substr(colon + 1));
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidArgument, "bad method level in '" + token + "'");
    }
  }
  for (MethodKind k : {MethodKind::OLS, MethodKind::OLSPerReplicate, MethodKind::NonAdaptive, MethodKind::Adaptive,
                       MethodKind::Oracle}) {
    if (to_string(k) == name) {
      spec.kind = k;
      return spec;
    }
  }
  fail(ErrorKind::InvalidArgument, "unknown method '" + name + "'");
}

Preset resolve_preset(const HarnessArgs& a, PresetKind kind) {
  Preset p;
  if (!a.preset.empty()) {
    const auto found = find_preset(a.preset);
    require(found.has_value(), ErrorKind::InvalidArgument, "unknown preset '" + a.preset + "'");
    p = *found;
    require(p.kind == kind, ErrorKind::InvalidArgument,
            "preset '" + a.preset + "' belongs to the " + (kind == PresetKind::Benchmark ? "coverage" : "benchmark") +
                " command");
  } else {
    p.kind = kind;
    p.M = kind == PresetKind::Benchmark ? 100 : 200;
    p.methods = table1_methods();
    p.regions = {RegionMethod::AsymptoticKnownV, RegionMethod::AsymptoticPlugin, RegionMethod::Bootstrap};
  }
  p.scenario = a.scenario.apply(p.scenario);
  if (a.M) p.M = *a.M;
  if (a.alpha) p.alpha = *a.alpha;
  require(p.M >= 2, ErrorKind::InvalidArgument, "--M must be at least 2");
  return p;
}

PanelModel parse_panel_model(const std::string& name) {
  return name == "gaussian-sequence" ? PanelModel::GaussianSequence : PanelModel::TimeSeries;
}

json harness_json(const Preset& p, const HarnessArgs& a) {
  json j;
  j["preset"] = a.preset.empty() ? json(nullptr) : json(a.preset);
  j["scenario"] = scenario_json(p.scenario);
  j["M"] = p.M;
  j["panel_model"] = a.panel_model;
  return j;
}

int run_benchmark_cmd(const HarnessArgs& a, const Globals&) {
  Preset p = resolve_preset(a, PresetKind::Benchmark);
  if (!a.methods.empty()) {
    p.methods.clear();
    for (const std::string& m : a.methods) p.methods.push_back(parse_method(m));
  }
  BenchmarkOptions opts;
  opts.panel_model = parse_panel_model(a.panel_model);
  const BenchmarkResult result = run_benchmark(p.scenario, p.methods, p.M, opts);

  json config = harness_json(p, a);
  json labels = json::array();
  for (const MethodSpec& m : p.methods) labels.push_back(m.label());
  config["methods"] = labels;
  const fs::path dir(a.out);
  ensure_directory(dir);
  write_file(dir / "benchmark.csv", benchmark_to_csv(result));
  write_file(dir / "benchmark.json",
             benchmark_to_json(result, ArtifactMeta{meta_json(config), {}, p.scenario.seed}, a.per_rep) + "\n");

  std::cout << std::left << std::setw(22) << "method" << std::setw(24) << "ASE(h^f) (se)" << std::setw(24)
            << "ASE(G_T) (se)" << "ASE(G_S) (se)\n";
  const auto cell = [](const MetricSummary& s) {
    std::ostringstream c;
    c << std::setprecision(4) << s.mean << " (" << std::setprecision(2) << s.se << ")";
    return c.str();
  };
  for (const MethodResult& r : result.methods) {
    std::cout << std::setw(22) << r.method.label() << std::setw(24) << cell(r.h());
    if (r.method.estimates_covariance())
      std::cout << std::setw(24) << cell(r.GT()) << cell(r.GS());
    std::cout << '\n';
  }
  std::cout << "benchmark: M=" << p.M << " seconds=" << std::setprecision(3) << result.seconds << " -> "
            << (dir / "benchmark.csv").string() << '\n';
  return kExitOk;
}

int run_coverage_cmd(const HarnessArgs& a, const Globals&) {
  Preset p = resolve_preset(a, PresetKind::Coverage);
  if (!a.methods.empty()) {
    p.regions.clear();
    for (const std::string& m : a.methods) p.regions.push_back(parse_region_method(m));
  }
  require(p.alpha > 0.0 && p.alpha < 1.0, ErrorKind::InvalidArgument, "--alpha must lie in (0, 1)");
  require(a.B >= 100, ErrorKind::InvalidArgument, "--B must be at least 100");
  CoverageOptions opts;
  opts.panel_model = parse_panel_model(a.panel_model);
  opts.bootstrap_draws = a.B;
  std::vector<CoverageResult> results;
  for (RegionMethod m : p.regions) results.push_back(run_coverage(p.scenario, m, p.alpha, p.M, opts));

  json config = harness_json(p, a);
  config["alpha"] = p.alpha;
  config["bootstrap_draws"] = a.B;
  json names = json::array();
  for (RegionMethod m : p.regions) names.push_back(to_string(m));
  config["regions"] = names;
  const fs::path dir(a.out);
  ensure_directory(dir);
  write_file(dir / "coverage.csv", coverage_to_csv(results));
  write_file(dir / "coverage.json",
             coverage_to_json(results, ArtifactMeta{meta_json(config), {}, p.scenario.seed}, a.per_rep) + "\n");
  for (const CoverageResult& r : results)
    std::cout << std::left << std::setw(22) << to_string(r.method) << " coverage=" << format_double(r.coverage())
              << " se=" << std::setprecision(3) << r.se() << " seconds=" << r.seconds << '\n';
  std::cout << "coverage: M=" << p.M << " alpha=" << format_double(p.alpha) << " -> "
            << (dir / "coverage.csv").string() << '\n';
  return kExitOk;
}

void add_harness_options(CLI::App& sub, HarnessArgs& a, bool coverage) {
  sub.add_option("--preset", a.preset, coverage ? "table2-{block,contour}-S{64,128}-T{512,1024}-a{05,10}"
                                                : "table1-{block,contour}-S{32,64,128}-T{512,1024}");
  a.scenario.add_to(sub);
  sub.add_option("--M", a.M, "Monte-Carlo repetitions (preset default: full scale)");
  sub.add_option("--panel-model", a.panel_model, "time-series or gaussian-sequence")
      ->check(CLI::IsMember({"time-series", "gaussian-sequence"}))
      ->capture_default_str();
  sub.add_flag("--per-rep", a.per_rep, "Include per-repetition values in the JSON output");
  sub.add_option("--out", a.out, "Output directory")->capture_default_str();
  if (coverage) {
    sub.add_option("--regions", a.methods, "known-v, plugin, bootstrap (default: all)");
    sub.add_option("--alpha", a.alpha, "Miscoverage level (preset default)");
    sub.add_option("--B", a.B, "Bootstrap draws")->capture_default_str();
  } else {
    sub.add_option("--methods", a.methods,
                   "ols, ols-per-replicate, non-adaptive, adaptive:q, oracle:q (default: the standard method set)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional mixed-effects spectral analysis of replicated time series"};
  app.name("specmix");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--threads", g.threads, "Worker cap (falls back to SPECMIX_THREADS)")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "JSON object of option values; command-line flags take precedence");
  app.add_option("--emit-plot-data", g.plot_data, "Write series,frequency,value CSV for plotting");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a replicated panel, truth record and manifest");
  sim.scenario.add_to(*simulate);
  simulate->add_option("--out", sim.out, "Output directory")->capture_default_str();
  simulate->add_option("--format", sim.format, "csv or bin")->check(CLI::IsMember({"csv", "bin"}))->capture_default_str();
  simulate->add_flag("--coefficients", sim.coefficients, "Also write the wavelet coefficient panel");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit the mixed-effects model to a panel");
  fit->add_option("--panel", fa.panel, "Panel file (CSV or SPXP1 binary)")->required();
  fit->add_option("--input", fa.input, "series or coefficients")->check(input_kind_check)->capture_default_str();
  fa.fit.add_to(*fit, true);
  fit->add_option("--vanishing-moments", fa.vanishing_moments, "Daubechies extremal-phase order N")
      ->capture_default_str();
  fit->add_option("--out", fa.out, "Model JSON")->capture_default_str();

  PredictArgs pa;
  auto* predict = app.add_subcommand("predict", "Predict replicate-specific log-spectra from a fitted model");
  predict->add_option("--panel", pa.panel, "Panel file")->required();
  predict->add_option("--model", pa.model, "Model JSON")->required();
  predict->add_option("--input", pa.input, "series or coefficients")->check(input_kind_check)->capture_default_str();
  predict->add_flag("--exponentiate", pa.exponentiate, "Write spectra instead of log-spectra");
  predict->add_option("--out", pa.out, "Curves CSV")->capture_default_str();

  ConfidenceArgs ca;
  auto* confidence = app.add_subcommand("confidence", "Confidence region for the population-mean log-spectrum");
  confidence->add_option("--panel", ca.panel, "Panel file")->required();
  confidence->add_option("--model", ca.model, "Model JSON")->required();
  confidence->add_option("--input", ca.input, "series or coefficients")->check(input_kind_check)->capture_default_str();
  confidence->add_option("--truth", ca.truth, "Truth JSON supplying the known covariance");
  confidence->add_option("--method", ca.method, "known-v, plugin or bootstrap")
      ->check(CLI::IsMember({"known-v", "plugin", "bootstrap"}))
      ->capture_default_str();
  confidence->add_option("--domain", ca.domain, "coefficient or frequency")
      ->check(CLI::IsMember({"coefficient", "frequency"}))
      ->capture_default_str();
  confidence->add_option("--alpha", ca.alpha, "Miscoverage level")->capture_default_str();
  confidence->add_option("--B", ca.B, "Bootstrap draws")->capture_default_str();
  confidence->add_option("--seed", ca.seed, "Seed of the sample split or bootstrap")->capture_default_str();
  ca.selection.add_to(*confidence, false);
  confidence->add_option("--out", ca.out, "Region JSON")->capture_default_str();

  HarnessArgs ba;
  auto* benchmark = app.add_subcommand("benchmark", "Average squared errors of the estimators over simulated panels");
  add_harness_options(*benchmark, ba, false);

  HarnessArgs va;
  auto* coverage = app.add_subcommand("coverage", "Empirical coverage of confidence regions over simulated panels");
  add_harness_options(*coverage, va, true);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(app, std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  } catch (const Error& e) {
    std::cerr << "specmix: error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }

  try {
    if (g.threads) set_max_threads(*g.threads);
    if (simulate->parsed()) return run_simulate(sim, g);
    if (fit->parsed()) return run_fit(fa, g);
    if (predict->parsed()) return run_predict(pa, g);
    if (confidence->parsed()) return run_confidence(ca, g);
    if (benchmark->parsed()) return run_benchmark_cmd(ba, g);
    if (coverage->parsed()) return run_coverage_cmd(va, g);
  } catch (const Error& e) {
    std::cerr << "specmix: error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "specmix: IoError: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "specmix: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
