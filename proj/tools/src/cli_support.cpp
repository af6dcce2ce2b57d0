#include "cli_support.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

#include "specmix/panel_io.hpp"
#include "specmix/spectral.hpp"

namespace specmix::cli {
namespace {

std::string option_name(const std::string& key) {
  std::string name = key;
  std::replace(name.begin(), name.end(), '_', '-');
  return "--" + name;
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& name) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == name || a.rfind(name + "=", 0) == 0;
  });
}

std::string scalar_token(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  fail(ErrorKind::InvalidArgument, "config key '" + key + "' must be a number, string, boolean or array");
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::IoError:
      return kExitIo;
    case ErrorKind::ZeroPowerBin:
    case ErrorKind::UnstableModel:
    case ErrorKind::DegenerateVariance:
    case ErrorKind::DomainError:
    case ErrorKind::SingularCovariance:
    case ErrorKind::EmptyRandomEffectSet:
    case ErrorKind::NonPSDCovariance:
    case ErrorKind::NonPSDScenario:
      return kExitNumeric;
    case ErrorKind::NonDyadicLength:
    case ErrorKind::LengthBelowFilterSupport:
    case ErrorKind::IndexOutOfRange:
    case ErrorKind::InvalidSparsity:
    case ErrorKind::SizeTooSmall:
    case ErrorKind::InvalidArgument:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::ParseError:
      return kExitConfig;
  }
  return kExitConfig;
}

std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!path) return args;

  std::size_t sub_pos = args.size();
  const CLI::App* sub = nullptr;
  for (std::size_t i = 0; i < args.size() && !sub; ++i) {
    for (const CLI::App* candidate : app.get_subcommands([](const CLI::App*) { return true; })) {
      if (candidate->get_name() == args[i]) {
        sub = candidate;
        sub_pos = i;
        break;
      }
    }
  }

  const json cfg = read_json(*path);
  require(cfg.is_object(), ErrorKind::InvalidArgument, "config file must hold a JSON object");
  std::vector<std::string> global_tokens;
  std::vector<std::string> sub_tokens;
  for (const auto& [key, value] : cfg.items()) {
    const std::string name = option_name(key);
    std::vector<std::string>* target = nullptr;
    const CLI::Option* opt = nullptr;
    if (sub && (opt = sub->get_option_no_throw(name))) {
      target = &sub_tokens;
    } else if ((opt = app.get_option_no_throw(name))) {
      target = &global_tokens;
    }
    require(opt != nullptr && name != "--config" && name != "--help", ErrorKind::InvalidArgument,
            "unknown config key '" + key + "'" + (sub ? " for '" + sub->get_name() + "'" : std::string()));
    if (given_on_command_line(args, name)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) target->push_back(name);
    } else if (value.is_array()) {
      target->push_back(name);
      for (const json& v : value) target->push_back(scalar_token(v, key));
    } else {
      target->push_back(name);
      target->push_back(scalar_token(value, key));
    }
  }

  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i == sub_pos) {
      out.insert(out.end(), global_tokens.begin(), global_tokens.end());
      out.push_back(args[i]);
      out.insert(out.end(), sub_tokens.begin(), sub_tokens.end());
    } else {
      out.push_back(args[i]);
    }
  }
  if (sub_pos == args.size()) out.insert(out.end(), global_tokens.begin(), global_tokens.end());
  return out;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ParseError, what + ": " + e.what());
  }
}

json read_json(const std::filesystem::path& path) { return parse_json(read_file(path), path.string()); }

void write_json(const std::filesystem::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

void ensure_directory(const std::filesystem::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorKind::IoError, "cannot create directory " + dir.string() + ": " + ec.message());
}

std::optional<Provenance> sibling_manifest(const std::filesystem::path& file) {
  const std::filesystem::path manifest = file.parent_path() / "manifest.json";
  std::error_code ec;
  if (!std::filesystem::exists(manifest, ec)) return std::nullopt;
  const json j = read_json(manifest);
  if (!j.contains("files") || !j["files"].contains(file.filename().string())) return std::nullopt;
  return Provenance{j.value("config_hash", std::string()), j.value("seed", std::uint64_t{0})};
}

void warn_on_mismatch(const std::string& what, const std::string& expected, const std::string& actual) {
  if (expected.empty() || actual.empty() || expected == actual) return;
  std::cerr << "specmix: warning: " << what << " config hash " << actual << " does not match " << expected << '\n';
}

void ScenarioOptions::add_to(CLI::App& app) {
  app.add_option("--scenario", scenario, "Between-replicate correlation: block, contour or identity")
      ->check(CLI::IsMember({"block", "contour", "identity"}));
  app.add_option("--S", S, "Number of replicates");
  app.add_option("--T", T, "Number of Fourier frequencies (series length 2T)");
  app.add_option("--C", C, "Random-effect variance magnitude");
  app.add_option("--J-max", J_max, "Random effects live on scales below J-max");
  app.add_option("--vanishing-moments", vanishing_moments, "Daubechies extremal-phase order N");
  app.add_option("--sigma-e2", sigma_e2, "Log-periodogram noise variance");
  app.add_option("--sparsify-tol", sparsify_tol, "Mean-curve coefficients below this are zeroed (default 1/T)");
  app.add_option("--ma-floor", ma_floor, "Modulus floor of the MA polynomial");
  app.add_option("--innovation-variance", innovation_variance, "ARMA innovation variance");
  ar_opt = app.add_option("--ar", ar, "AR coefficients phi_1..phi_p")->expected(0, -1);
  ma_opt = app.add_option("--ma", ma, "MA coefficients theta_1..theta_q")->expected(0, -1);
  app.add_option("--seed", seed, "Root seed");
}

ScenarioConfig ScenarioOptions::apply(ScenarioConfig base) const {
  if (scenario) {
    base.correlation = *scenario == "block"     ? CorrelationKind::BlockDiagonal
                       : *scenario == "contour" ? CorrelationKind::Contour
                                                : CorrelationKind::Identity;
  }
  if (S) base.S = *S;
  if (T) base.T = *T;
  if (C) base.C = *C;
  if (J_max) base.J_max = *J_max;
  if (vanishing_moments) base.basis.vanishing_moments = *vanishing_moments;
  if (sigma_e2) base.sigma_e2 = *sigma_e2;
  if (sparsify_tol) base.sparsify_tol = *sparsify_tol;
  if (ma_floor) base.ma_modulus_floor = *ma_floor;
  if (seed) base.seed = *seed;
  if (ar_opt->count() || ma_opt->count() || innovation_variance) {
    ArmaModel model = std::holds_alternative<ArmaModel>(base.mean_model) ? std::get<ArmaModel>(base.mean_model)
                                                                          : benchmark_arma_model();
    if (ar_opt->count()) model.ar = ar;
    if (ma_opt->count()) model.ma = ma;
    if (innovation_variance) model.innovation_variance = *innovation_variance;
    base.mean_model = model;
  }
  base.validate();
  return base;
}

json scenario_json(const ScenarioConfig& cfg) {
  json j;
  j["scenario"] = to_string(cfg.correlation);
  j["S"] = cfg.S;
  j["T"] = cfg.T;
  j["C"] = cfg.C;
  j["J_max"] = cfg.J_max;
  j["vanishing_moments"] = cfg.basis.vanishing_moments;
  j["sigma_e2"] = cfg.sigma_e2;
  j["sparsify_tol"] = cfg.sparsify_tol ? json(*cfg.sparsify_tol) : json(nullptr);
  j["ma_floor"] = cfg.ma_modulus_floor;
  if (const auto* m = std::get_if<ArmaModel>(&cfg.mean_model)) {
    j["mean_model"] = {{"ar", m->ar}, {"ma", m->ma}, {"innovation_variance", m->innovation_variance}};
  } else {
    const Vector& v = std::get<Vector>(cfg.mean_model);
    j["mean_model"] = {{"explicit", std::vector<double>(v.data(), v.data() + v.size())}};
  }
  return j;
}

void FitOptions::add_to(CLI::App& app, bool with_iteration) {
  app.add_option("--selection", selection, "Fixed-effects selection: fdr or universal")
      ->check(CLI::IsMember({"fdr", "universal"}))
      ->capture_default_str();
  app.add_option("--q", q, "FDR level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  app.add_option("--k-h", k_h, "Sparsity k_h of the universal threshold");
  app.add_option("--sigma-e2", sigma_e2, "Log-periodogram noise variance");
  app.add_option("--scale-cutoff-alpha", cutoff_alpha, "Keep scales with 2^j <= C T^(1 - alpha)");
  app.add_option("--scale-cutoff-C", cutoff_C, "Constant C of the scale cutoff")->capture_default_str();
  if (!with_iteration) return;
  app.add_option("--delta", delta, "Denominator floor of the correlation estimate")->capture_default_str();
  app.add_option("--tolerance", tolerance, "Relative-change stopping tolerance")->capture_default_str();
  app.add_option("--max-iterations", max_iterations, "Iteration cap")->capture_default_str();
  app.add_option("--weights", weights, "gls (iterative) or ols (single step)")
      ->check(CLI::IsMember({"gls", "ols"}))
      ->capture_default_str();
}

FitConfig FitOptions::build() const {
  FitConfig cfg;
  if (sigma_e2) cfg.threshold.sigma_e2 = *sigma_e2;
  if (selection == "universal") {
    require(k_h.has_value(), ErrorKind::InvalidArgument, "--selection universal needs --k-h");
    cfg.threshold.rule = UniversalSelection{*k_h};
  } else {
    require(q > 0.0 && q <= 1.0, ErrorKind::InvalidArgument, "--q must lie in (0, 1]");
    cfg.threshold.rule = FdrSelection{q};
  }
  if (cutoff_alpha) cfg.threshold.scale_cutoff = ScaleCutoff{*cutoff_alpha, cutoff_C};
  require(delta > 0.0, ErrorKind::InvalidArgument, "--delta must be positive");
  require(tolerance > 0.0, ErrorKind::InvalidArgument, "--tolerance must be positive");
  require(max_iterations >= 1, ErrorKind::InvalidArgument, "--max-iterations must be at least 1");
  cfg.delta = delta;
  cfg.tolerance = tolerance;
  cfg.max_iterations = max_iterations;
  return cfg;
}

json FitOptions::to_json() const {
  json j{{"selection", selection}, {"delta", delta},     {"tolerance", tolerance},
         {"max_iterations", max_iterations}, {"weights", weights}};
  if (selection == "universal")
    j["k_h"] = k_h ? json(*k_h) : json(nullptr);
  else
    j["q"] = q;
  j["sigma_e2"] = sigma_e2.value_or(kLogChiSquareVariance);
  if (cutoff_alpha) j["scale_cutoff"] = {{"alpha", *cutoff_alpha}, {"C", cutoff_C}};
  return j;
}

std::string input_kind_check(const std::string& value) {
  return value == "series" || value == "coefficients" ? std::string() : "must be series or coefficients";
}

CoefficientPanel load_coefficients(const std::filesystem::path& path, const std::string& input,
                                   const WaveletBasisSpec& basis) {
  Matrix values = load_panel(path);
  if (input == "coefficients") return CoefficientPanel(std::move(values));
  return coefficient_panel(TimeSeriesPanel(std::move(values)), basis);
}

void PlotData::add(const std::string& series, const Vector& values, bool ordinal) {
  const Vector freq = fourier_frequencies(values.size());
  std::ostringstream out;
  for (Index l = 0; l < values.size(); ++l)
    out << series << ',' << (ordinal ? format_double(static_cast<double>(l + 1)) : format_double(freq[l])) << ','
        << format_double(values[l]) << '\n';
  body_ += out.str();
}

std::string PlotData::csv() const { return "series,frequency,value\n" + body_; }

}  // namespace specmix::cli
