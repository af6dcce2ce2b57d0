#include "specmix/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "specmix/panel_io.hpp"

namespace specmix {
namespace {

using nlohmann::json;

json vec_to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vec_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

json set_to_json(const SelectedSet& s) {
  std::vector<Index> one_based;
  for (Index i : s.indices()) one_based.push_back(i + 1);
  return json{{"indices", one_based}, {"threshold", s.threshold_used()}};
}

double number_or_inf(const json& j) { return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>(); }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

SelectedSet set_from_json(const json& j) {
  std::vector<Index> zero_based;
  for (Index k : j.at("indices").get<std::vector<Index>>()) zero_based.push_back(k - 1);
  return SelectedSet(std::move(zero_based), number_or_inf(j.at("threshold")));
}

json matrix_to_json(const Matrix& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}

Matrix matrix_from_json(const json& j) {
  const Index r = j.at("rows").get<Index>();
  const Index c = j.at("cols").get<Index>();
  const auto flat = j.at("data").get<std::vector<double>>();
  require(static_cast<Index>(flat.size()) == r * c, ErrorKind::ParseError, "matrix data has the wrong size");
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index k = 0; k < c; ++k) m(i, k) = flat[static_cast<std::size_t>(i * c + k)];
  return m;
}

json parse(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
  }
}

void attach(json& j, const ArtifactMeta& meta) {
  j["config"] = parse(meta.config_json);
  j["config_hash"] = meta.config_hash.empty() ? config_hash(meta.config_json) : meta.config_hash;
  j["seed"] = meta.seed;
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, std::string("malformed document: ") + e.what());
  }
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string canonical_json(std::string_view json_text) { return parse(json_text).dump(); }

std::string config_hash(std::string_view json_text) { return hex64(fnv1a64(canonical_json(json_text))); }

std::string to_string(RegionDomain domain) {
  return domain == RegionDomain::Coefficient ? "coefficient" : "frequency";
}

RegionMethod region_method_from_string(std::string_view name) {
  for (RegionMethod m : {RegionMethod::AsymptoticKnownV, RegionMethod::AsymptoticPlugin, RegionMethod::Bootstrap})
    if (to_string(m) == name) return m;
  fail(ErrorKind::InvalidArgument, "unknown region method '" + std::string(name) + "'");
}

std::string model_fit_to_json(const ModelFit& fit, const ArtifactMeta& meta) {
  json j;
  j["h_hat"] = vec_to_json(fit.h_hat);
  j["K_h"] = set_to_json(fit.K_h);
  j["sigma_u2"] = vec_to_json(fit.re_cov.sigma_u2);
  j["K_u"] = set_to_json(fit.re_cov.K_u);
  j["G_S"] = matrix_to_json(fit.re_cov.G_S.entries());
  j["G_S_min_eigenvalue"] = fit.re_cov.G_S.min_eigenvalue();
  j["G_raw"] = matrix_to_json(fit.G_raw);
  j["weights"] = matrix_to_json(fit.weights);
  j["weights_mode"] = fit.weights_mode == WeightsMode::GLS ? "GLS" : "OLS";
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["delta"] = fit.delta;
  j["sigma_e2"] = fit.sigma_e2;
  j["basis_normalization"] = kWaveletNormalization;
  attach(j, meta);
  return j.dump(2);
}

ModelFit model_fit_from_json(std::string_view text, ArtifactMeta* meta) {
  const json j = parse(text);
  return guarded([&] {
    ModelFit fit;
    fit.h_hat = vec_from_json(j.at("h_hat"));
    fit.K_h = set_from_json(j.at("K_h"));
    fit.re_cov.sigma_u2 = vec_from_json(j.at("sigma_u2"));
    fit.re_cov.K_u = set_from_json(j.at("K_u"));
    fit.re_cov.G_S = CorrelationMatrix(matrix_from_json(j.at("G_S")));
    fit.G_raw = matrix_from_json(j.at("G_raw"));
    fit.weights = matrix_from_json(j.at("weights"));
    fit.weights_mode = j.at("weights_mode").get<std::string>() == "GLS" ? WeightsMode::GLS : WeightsMode::OLS;
    fit.iterations = j.at("iterations").get<int>();
    fit.converged = j.at("converged").get<bool>();
    fit.delta = j.at("delta").get<double>();
    fit.sigma_e2 = j.at("sigma_e2").get<double>();
    require(fit.re_cov.sigma_u2.size() == fit.h_hat.size() && fit.weights.cols() == fit.h_hat.size() &&
                fit.weights.rows() == fit.re_cov.G_S.size(),
            ErrorKind::DimensionMismatch, "model fields have inconsistent dimensions");
    if (meta) {
      meta->config_json = j.value("config", json::object()).dump();
      meta->config_hash = j.value("config_hash", std::string());
      meta->seed = j.value("seed", std::uint64_t{0});
    }
    return fit;
  });
}

std::string region_to_json(const ConfidenceRegion& region, const ArtifactMeta& meta) {
  json j;
  j["center"] = vec_to_json(region.center);
  j["radius"] = finite_or_null(region.radius);
  j["level"] = region.level;
  j["domain"] = to_string(region.domain);
  j["method"] = to_string(region.method);
  j["radius_construction"] = region.method == RegionMethod::Bootstrap ? "bootstrap_quantile"
                                                                      : std::string(kRadiusConstruction);
  j["diagnostics"] = {{"A", region.A}, {"c", region.c}, {"R_hat", region.risk}, {"z", region.z}};
  if (region.weighted_variance.size() > 0) j["weighted_variance"] = vec_to_json(region.weighted_variance);
  attach(j, meta);
  j["seed"] = region.seed;
  return j.dump(2);
}

ConfidenceRegion region_from_json(std::string_view text) {
  const json j = parse(text);
  return guarded([&] {
    ConfidenceRegion r;
    r.center = vec_from_json(j.at("center"));
    r.radius = number_or_inf(j.at("radius"));
    r.level = j.at("level").get<double>();
    r.domain = j.at("domain").get<std::string>() == "frequency" ? RegionDomain::Frequency : RegionDomain::Coefficient;
    r.method = region_method_from_string(j.at("method").get<std::string>());
    const json& d = j.at("diagnostics");
    r.A = d.at("A").get<double>();
    r.c = d.at("c").get<double>();
    r.risk = d.at("R_hat").get<double>();
    r.z = d.at("z").get<double>();
    r.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("weighted_variance")) {
      r.weighted_variance = vec_from_json(j.at("weighted_variance"));
      require(r.weighted_variance.size() == r.center.size(), ErrorKind::DimensionMismatch,
              "weighted_variance and center differ in length");
    }
    return r;
  });
}

std::string truth_to_json(const ScenarioTruth& truth, const Matrix& U, const ArtifactMeta& meta) {
  json j;
  j["h"] = vec_to_json(truth.h);
  j["h_f"] = vec_to_json(truth.h_f);
  j["h_f_model"] = vec_to_json(truth.h_f_model);
  j["K_h"] = set_to_json(truth.K_h);
  j["K_u"] = set_to_json(truth.K_u);
  j["sigma_u2"] = vec_to_json(truth.sigma_u2);
  j["G_S"] = matrix_to_json(truth.G_S.entries());
  j["U"] = matrix_to_json(U);
  j["sigma_e2"] = truth.sigma_e2;
  j["arma_sign_convention"] = kArmaSignConvention;
  j["innovation_convention"] = kInnovationConvention;
  j["basis_normalization"] = kWaveletNormalization;
  attach(j, meta);
  return j.dump(2);
}

ScenarioTruth truth_from_json(std::string_view text) {
  const json j = parse(text);
  return guarded([&] {
    ScenarioTruth t;
    t.h = vec_from_json(j.at("h"));
    t.h_f = vec_from_json(j.at("h_f"));
    t.h_f_model = vec_from_json(j.at("h_f_model"));
    t.K_h = set_from_json(j.at("K_h"));
    t.K_u = set_from_json(j.at("K_u"));
    t.sigma_u2 = vec_from_json(j.at("sigma_u2"));
    t.G_S = CorrelationMatrix(matrix_from_json(j.at("G_S")));
    t.sigma_e2 = j.value("sigma_e2", kLogChiSquareVariance);
    require(t.sigma_u2.size() == t.h.size() && t.h_f.size() == t.h.size(), ErrorKind::DimensionMismatch,
            "truth fields have inconsistent dimensions");
    return t;
  });
}

std::string benchmark_to_csv(const BenchmarkResult& result) {
  std::ostringstream out;
  out << "method,metric,mean,se,M\n";
  for (const MethodResult& m : result.methods) {
    const auto row = [&](const char* metric, const MetricSummary& s) {
      out << '"' << m.method.label() << "\"," << metric << ',' << format_double(s.mean) << ','
          << format_double(s.se) << ',' << result.M << '\n';
    };
    row("ase_h_f", m.h());
    if (m.method.estimates_covariance()) {
      row("ase_G_T", m.GT());
      row("ase_G_S", m.GS());
    }
  }
  return out.str();
}

std::string benchmark_to_json(const BenchmarkResult& result, const ArtifactMeta& meta, bool per_rep) {
  json j;
  j["M"] = result.M;
  j["seconds"] = result.seconds;
  json methods = json::array();
  for (const MethodResult& m : result.methods) {
    json e;
    e["label"] = m.method.label();
    e["kind"] = to_string(m.method.kind);
    e["q"] = m.method.q;
    e["ase_h_f"] = {{"mean", m.h().mean}, {"se", m.h().se}};
    if (m.method.estimates_covariance()) {
      e["ase_G_T"] = {{"mean", m.GT().mean}, {"se", m.GT().se}};
      e["ase_G_S"] = {{"mean", m.GS().mean}, {"se", m.GS().se}};
    }
    if (per_rep) {
      e["per_rep"] = {{"ase_h_f", m.ase_h}, {"ase_G_T", m.ase_GT}, {"ase_G_S", m.ase_GS}, {"iterations", m.iterations}};
    }
    methods.push_back(std::move(e));
  }
  j["methods"] = std::move(methods);
  attach(j, meta);
  return j.dump(2);
}

std::string coverage_to_csv(const std::vector<CoverageResult>& results) {
  std::ostringstream out;
  out << "method,alpha,coverage,se,M,mean_radius\n";
  for (const CoverageResult& r : results) {
    double total = 0.0;
    for (double v : r.radius) total += v;
    out << to_string(r.method) << ',' << format_double(r.alpha) << ',' << format_double(r.coverage()) << ','
        << format_double(r.se()) << ',' << r.M << ','
        << format_double(r.radius.empty() ? 0.0 : total / static_cast<double>(r.radius.size())) << '\n';
  }
  return out.str();
}

std::string coverage_to_json(const std::vector<CoverageResult>& results, const ArtifactMeta& meta, bool per_rep) {
  json j;
  json arr = json::array();
  for (const CoverageResult& r : results) {
    json e{{"method", to_string(r.method)}, {"alpha", r.alpha},   {"coverage", r.coverage()},
           {"se", r.se()},                  {"M", r.M},           {"seconds", r.seconds},
           {"radius_construction", r.method == RegionMethod::Bootstrap ? "bootstrap_quantile"
                                                                       : std::string(kRadiusConstruction)}};
    if (per_rep) {
      json radii = json::array();
      for (double v : r.radius) radii.push_back(finite_or_null(v));
      std::vector<bool> covered(r.covered.begin(), r.covered.end());
      e["per_rep"] = {{"radius", radii}, {"error", r.error}, {"covered", covered}};
    }
    arr.push_back(std::move(e));
  }
  j["regions"] = std::move(arr);
  attach(j, meta);
  return j.dump(2);
}

}  // namespace specmix
