#include "specmix/simulation.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#include "fft.hpp"
#include "specmix/panel_io.hpp"
#include "specmix/parallel.hpp"
#include "specmix/random.hpp"

namespace specmix {
namespace {

constexpr std::uint64_t kRandomEffectStream = 0;
constexpr std::uint64_t kSplitStream = 0x5b117ULL;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Matrix correlation_for(const ScenarioConfig& cfg) {
  switch (cfg.correlation) {
    case CorrelationKind::Identity:
      return Matrix::Identity(cfg.S, cfg.S);
    case CorrelationKind::BlockDiagonal:
      return block_diag_correlation(cfg.S).entries();
    case CorrelationKind::Contour:
      return contour_correlation(cfg.S).entries();
    case CorrelationKind::Explicit:
      return cfg.explicit_correlation;
  }
  return Matrix::Identity(cfg.S, cfg.S);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(S >= 1, ErrorKind::InvalidArgument, "S must be at least 1");
  require(is_power_of_two(T), ErrorKind::NonDyadicLength, "T must be a power of two");
  require(T >= 2 * basis.vanishing_moments, ErrorKind::LengthBelowFilterSupport,
          "T is shorter than the wavelet filter support");
  int log2T = 0;
  while ((Index{1} << log2T) < T) ++log2T;
  require(J_max >= 0 && J_max <= log2T, ErrorKind::InvalidArgument, "J_max must lie in [0, log2 T]");
  require(C >= 0.0, ErrorKind::InvalidArgument, "C must be nonnegative");
  require(sigma_e2 > 0.0, ErrorKind::InvalidArgument, "sigma_e2 must be positive");
  require(!sparsify_tol || *sparsify_tol >= 0.0, ErrorKind::InvalidArgument, "sparsify tolerance must be nonnegative");
  if (const auto* v = std::get_if<Vector>(&mean_model))
    require(v->size() == T, ErrorKind::DimensionMismatch, "explicit mean curve must have length T");
  if (correlation == CorrelationKind::BlockDiagonal)
    require(S % 2 == 0, ErrorKind::InvalidArgument, "block-diagonal correlation needs an even S");
  if (correlation == CorrelationKind::Contour)
    require(S >= 16 && is_power_of_two(S), ErrorKind::SizeTooSmall,
            "contour correlation needs a dyadic S >= 16, got " + std::to_string(S));
  if (correlation == CorrelationKind::Explicit)
    require(explicit_correlation.rows() == S && explicit_correlation.cols() == S, ErrorKind::DimensionMismatch,
            "explicit correlation must be S x S");
}

CovarianceModel ScenarioTruth::covariance() const {
  return CovarianceModel(sigma_u2, G_S.entries(), sigma_e2 / static_cast<double>(h.size()));
}

Vector truth_variance_components(double C, int J_max, const SelectedSet& K_h, Index T) {
  require(C >= 0.0, ErrorKind::InvalidArgument, "C must be nonnegative");
  Vector out = Vector::Zero(T);
  for (Index i : K_h.indices()) {
    const Index k = i + 1;
    if (k == 1) {
      out[i] = C;
      continue;
    }
    const int j = scale_of_index(k, T);
    if (j < J_max) out[i] = C * std::ldexp(1.0, -j - 2);
  }
  return out;
}

CorrelationMatrix block_diag_correlation(Index S, double rho) {
  require(S >= 2 && S % 2 == 0, ErrorKind::InvalidArgument, "block-diagonal correlation needs an even S");
  Matrix G = Matrix::Identity(S, S);
  const Index half = S / 2;
  G.topLeftCorner(half, half).setConstant(rho);
  G.diagonal().setOnes();
  return CorrelationMatrix(std::move(G));
}

CorrelationMatrix contour_correlation(Index S) {
  require(S >= 16 && is_power_of_two(S), ErrorKind::SizeTooSmall,
          "contour correlation needs a dyadic S >= 16, got " + std::to_string(S));
  const auto level = [S](Index m) {
    return std::max(0.0, 1.0 - static_cast<double>(m * m) / static_cast<double>(S));
  };
  Matrix G(S, S);
  for (Index a = 0; a < S; ++a)
    for (Index b = 0; b < S; ++b)
      G(a, b) = a == b ? 1.0 : level(std::max({a / 8 + 1, b / 8 + 1, Index{2}}));
  return CorrelationMatrix(std::move(G));
}

ScenarioTruth scenario_truth(const ScenarioConfig& cfg) {
  cfg.validate();
  ScenarioTruth truth;
  if (const auto* arma = std::get_if<ArmaModel>(&cfg.mean_model))
    truth.h_f_model = arma_log_spectrum(*arma, cfg.T, cfg.ma_modulus_floor);
  else
    truth.h_f_model = std::get<Vector>(cfg.mean_model);
  const double tol = cfg.sparsify_tol.value_or(1.0 / static_cast<double>(cfg.T));
  SparseCoefficients sparse = sparsify(dwt(truth.h_f_model, cfg.basis), tol);
  truth.h = std::move(sparse.values);
  truth.K_h = std::move(sparse.support);
  truth.h_f = idwt(truth.h, cfg.basis);
  truth.sigma_u2 = truth_variance_components(cfg.C, cfg.J_max, truth.K_h, cfg.T);
  std::vector<Index> ku;
  for (Index k = 0; k < cfg.T; ++k)
    if (truth.sigma_u2[k] > 0.0) ku.push_back(k);
  truth.K_u = SelectedSet(std::move(ku), 0.0);
  truth.G_S = CorrelationMatrix(correlation_for(cfg));
  truth.sigma_e2 = cfg.sigma_e2;
  return truth;
}

SimulatedPanel generate_panel(const ScenarioConfig& cfg, const ScenarioTruth& truth, std::uint64_t seed) {
  const Index S = cfg.S;
  const Index T = cfg.T;
  const Index N = 2 * T;
  require(truth.h.size() == T && truth.G_S.size() == S, ErrorKind::DimensionMismatch,
          "truth does not match the scenario");

  Matrix jittered = truth.G_S.entries();
  jittered.diagonal().array() += 1e-12;
  Eigen::LLT<Matrix> llt(jittered);
  require(llt.info() == Eigen::Success, ErrorKind::NonPSDScenario, "between-replicate correlation is not PSD");
  const Matrix L = llt.matrixL();

  SimulatedPanel out;
  out.U = Matrix::Zero(S, T);
  Rng urng(derive_seed(seed, kRandomEffectStream));
  Vector z(S);
  for (Index k = 0; k < T; ++k) {
    if (truth.sigma_u2[k] <= 0.0) continue;
    for (Index s = 0; s < S; ++s) z[s] = urng.normal();
    out.U.col(k) = std::sqrt(truth.sigma_u2[k]) * (L * z);
  }

  Matrix X(S, N);
  std::vector<double> residue(static_cast<std::size_t>(S), 0.0);
  const double norm = 1.0 / std::sqrt(static_cast<double>(N));
  parallel_for(static_cast<std::size_t>(S), [&](std::size_t si) {
    const auto s = static_cast<Index>(si);
    const Vector Uf = idwt(out.U.row(s).transpose(), cfg.basis);
    const Vector amp = ((truth.h_f + Uf) * 0.5).array().exp();
    Rng rng(derive_seed(seed, si + 1));
    std::vector<std::complex<double>> c(static_cast<std::size_t>(N)), x(static_cast<std::size_t>(N));
    for (Index l = 0; l <= T; ++l) {
      // A(1/2) is taken equal to A(0): the log-spectrum grid is periodic.
      const double a = amp[l == T ? 0 : l];
      std::complex<double> xi;
      if (l == 0 || l == T) {
        xi = rng.normal();
      } else {
        const double re = rng.normal();
        const double im = rng.normal();
        xi = std::complex<double>(re, im) * std::sqrt(0.5);
      }
      c[static_cast<std::size_t>(l)] = a * xi;
    }
    for (Index l = 1; l < T; ++l) c[static_cast<std::size_t>(N - l)] = std::conj(c[static_cast<std::size_t>(l)]);
    detail::fft_inverse(c, x);
    double worst = 0.0;
    for (Index i = 0; i < N; ++i) {
      const std::complex<double> v = x[static_cast<std::size_t>((i + 1) % N)] * norm;
      X(s, i) = v.real();
      worst = std::max(worst, std::abs(v.imag()));
    }
    residue[si] = worst;
  });
  out.max_imaginary_residue = *std::max_element(residue.begin(), residue.end());
  require(out.max_imaginary_residue <= 1e-8, ErrorKind::DomainError, "synthesized series is not real");
  out.series = TimeSeriesPanel(std::move(X));
  return out;
}

SimulatedPanel generate_panel(const ScenarioConfig& cfg) {
  return generate_panel(cfg, scenario_truth(cfg), cfg.seed);
}

CoefficientPanel coefficient_panel(const TimeSeriesPanel& series, const WaveletBasisSpec& basis) {
  return to_coefficients(log_periodogram(series), basis);
}

CoefficientPanel gaussian_sequence_panel(const ScenarioTruth& truth, std::uint64_t seed) {
  const CovarianceModel V = truth.covariance();
  Matrix Y = draw_gaussian_panel(V, seed);
  Y.rowwise() += truth.h.transpose();
  return CoefficientPanel(std::move(Y));
}

std::string MethodSpec::label() const {
  switch (kind) {
    case MethodKind::OLS:
      return "OLS";
    case MethodKind::OLSPerReplicate:
      return "OLS (per-replicate)";
    case MethodKind::NonAdaptive:
      return "Non-adaptive";
    case MethodKind::Adaptive:
      return "Adapt. (q=" + format_double(q) + ")";
    case MethodKind::Oracle:
      return "Oracle (q=" + format_double(q) + ")";
  }
  return "unknown";
}

std::vector<MethodSpec> table1_methods() {
  return {{MethodKind::OLS, 0.001},
          {MethodKind::NonAdaptive, 0.001},
          {MethodKind::Adaptive, 0.1},
          {MethodKind::Adaptive, 0.001},
          {MethodKind::Oracle, 0.001}};
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

MethodEstimate apply_method(const MethodSpec& method, const CoefficientPanel& Y, const ScenarioTruth& truth,
                            const FitConfig& base) {
  const Index S = Y.replicates();
  const Index T = Y.length();
  FitConfig cfg = base;
  MethodEstimate est;
  switch (method.kind) {
    case MethodKind::OLSPerReplicate: {
      const double scale = std::sqrt(static_cast<double>(T) / cfg.threshold.sigma_e2);
      const std::vector<bool> allowed = scale_cutoff_mask(T, cfg.threshold.scale_cutoff);
      est.h_hat = Vector::Zero(T);
      for (Index s = 0; s < S; ++s) {
        const Vector row = Y.row(s).transpose();
        const SelectedSet sel = fdr_select(scale * row, 1.0, method.q);
        for (Index k : sel.indices())
          if (allowed[static_cast<std::size_t>(k)]) est.h_hat[k] += row[k];
      }
      est.h_hat /= static_cast<double>(S);
      return est;
    }
    case MethodKind::OLS: {
      cfg.threshold.rule = FdrSelection{method.q};
      est.h_hat = fit_ols(Y, cfg).h_hat;
      return est;
    }
    case MethodKind::NonAdaptive:
    case MethodKind::Adaptive:
    case MethodKind::Oracle: {
      if (method.kind == MethodKind::NonAdaptive)
        cfg.threshold.rule = UniversalSelection{std::clamp<Index>(static_cast<Index>(truth.K_h.size()), 1, T - 1)};
      else
        cfg.threshold.rule = FdrSelection{method.q};
      const ModelFit fit = method.kind == MethodKind::Oracle
                               ? fit_with_weights(Y, truth.covariance().gls_weight_matrix(), cfg)
                               : fit_iterative_gls(Y, cfg);
      est.h_hat = fit.h_hat;
      est.sigma_u2 = fit.re_cov.sigma_u2;
      est.G_S = fit.re_cov.G_S.entries();
      est.iterations = fit.iterations;
      return est;
    }
  }
  return est;
}

BenchmarkResult run_benchmark(const ScenarioConfig& cfg, const std::vector<MethodSpec>& methods, int M,
                              const BenchmarkOptions& opts) {
  require(M >= 1, ErrorKind::InvalidArgument, "M must be positive");
  const auto start = std::chrono::steady_clock::now();
  const ScenarioTruth truth = scenario_truth(cfg);
  FitConfig fit_cfg = opts.fit;
  fit_cfg.threshold.sigma_e2 = cfg.sigma_e2;
  const std::size_t nm = methods.size();
  std::vector<MethodEstimate> per_rep(static_cast<std::size_t>(M) * nm);
  parallel_for(static_cast<std::size_t>(M), [&](std::size_t rep) {
    const std::uint64_t seed = derive_seed(cfg.seed, rep);
    const CoefficientPanel Y = opts.panel_model == PanelModel::TimeSeries
                                   ? coefficient_panel(generate_panel(cfg, truth, seed).series, cfg.basis)
                                   : gaussian_sequence_panel(truth, seed);
    for (std::size_t m = 0; m < nm; ++m) per_rep[rep * nm + m] = apply_method(methods[m], Y, truth, fit_cfg);
  });
  BenchmarkResult result;
  result.M = M;
  const double T = static_cast<double>(cfg.T);
  const double S2 = static_cast<double>(cfg.S * cfg.S);
  for (std::size_t m = 0; m < nm; ++m) {
    MethodResult r;
    r.method = methods[m];
    for (int rep = 0; rep < M; ++rep) {
      const MethodEstimate& e = per_rep[static_cast<std::size_t>(rep) * nm + m];
      r.ase_h.push_back((idwt(e.h_hat, cfg.basis) - truth.h_f).squaredNorm() / T);
      if (methods[m].estimates_covariance()) {
        r.ase_GT.push_back((e.sigma_u2 - truth.sigma_u2).squaredNorm() / T);
        r.ase_GS.push_back((e.G_S - truth.G_S.entries()).squaredNorm() / S2);
        r.iterations.push_back(e.iterations);
      }
    }
    result.methods.push_back(std::move(r));
  }
  result.seconds = seconds_since(start);
  return result;
}

double CoverageResult::coverage() const {
  if (covered.empty()) return 0.0;
  const auto hit = std::count(covered.begin(), covered.end(), std::uint8_t{1});
  return static_cast<double>(hit) / static_cast<double>(covered.size());
}

double CoverageResult::se() const {
  if (covered.empty()) return 0.0;
  const double p = coverage();
  return std::sqrt(p * (1.0 - p) / static_cast<double>(covered.size()));
}

CoverageResult run_coverage(const ScenarioConfig& cfg, RegionMethod method, double alpha, int M,
                            const CoverageOptions& opts) {
  require(M >= 1, ErrorKind::InvalidArgument, "M must be positive");
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  const auto start = std::chrono::steady_clock::now();
  const ScenarioTruth truth = scenario_truth(cfg);
  const CovarianceModel V = truth.covariance();
  const Matrix W_true = V.gls_weight_matrix();
  FitConfig fit_cfg = opts.fit;
  fit_cfg.threshold.sigma_e2 = cfg.sigma_e2;
  CoverageResult out;
  out.method = method;
  out.alpha = alpha;
  out.M = M;
  out.radius.assign(static_cast<std::size_t>(M), 0.0);
  out.error.assign(static_cast<std::size_t>(M), 0.0);
  out.covered.assign(static_cast<std::size_t>(M), 0);
  parallel_for(static_cast<std::size_t>(M), [&](std::size_t rep) {
    const std::uint64_t seed = derive_seed(cfg.seed, rep);
    const CoefficientPanel Y = opts.panel_model == PanelModel::TimeSeries
                                   ? coefficient_panel(generate_panel(cfg, truth, seed).series, cfg.basis)
                                   : gaussian_sequence_panel(truth, seed);
    const std::uint64_t region_seed = derive_seed(seed, kSplitStream);
    ConfidenceRegion region;
    switch (method) {
      case RegionMethod::AsymptoticKnownV:
        region = asymptotic_region(Y, V, W_true, fit_cfg.threshold, alpha, region_seed);
        break;
      case RegionMethod::AsymptoticPlugin: {
        const ModelFit fit = fit_iterative_gls(Y, fit_cfg);
        const CovarianceModel V_hat = fit.covariance();
        region = asymptotic_region(Y, V_hat, ols_weight_matrix(cfg.S, cfg.T), fit_cfg.threshold, alpha, region_seed);
        break;
      }
      case RegionMethod::Bootstrap: {
        const Vector center = estimate_fixed_effects(Y, W_true, select_fixed_set(Y, fit_cfg.threshold));
        region = bootstrap_region(center, V, W_true, fit_cfg.threshold, opts.bootstrap_draws, alpha, region_seed);
        break;
      }
    }
    out.radius[rep] = opts.infinite_radius ? std::numeric_limits<double>::infinity() : region.radius;
    out.error[rep] = (truth.h - region.center).norm();
    out.covered[rep] = opts.infinite_radius || region.contains(truth.h) ? 1 : 0;
  });
  out.seconds = seconds_since(start);
  return out;
}

std::string to_string(CorrelationKind kind) {
  switch (kind) {
    case CorrelationKind::Identity:
      return "identity";
    case CorrelationKind::BlockDiagonal:
      return "block";
    case CorrelationKind::Contour:
      return "contour";
    case CorrelationKind::Explicit:
      return "explicit";
  }
  return "unknown";
}

std::string to_string(MethodKind kind) {
  switch (kind) {
    case MethodKind::OLS:
      return "ols";
    case MethodKind::OLSPerReplicate:
      return "ols-per-replicate";
    case MethodKind::NonAdaptive:
      return "non-adaptive";
    case MethodKind::Adaptive:
      return "adaptive";
    case MethodKind::Oracle:
      return "oracle";
  }
  return "unknown";
}

std::string to_string(RegionMethod method) {
  switch (method) {
    case RegionMethod::AsymptoticKnownV:
      return "asymptotic-known-v";
    case RegionMethod::AsymptoticPlugin:
      return "asymptotic-plugin";
    case RegionMethod::Bootstrap:
      return "bootstrap";
  }
  return "unknown";
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const char* kind : {"block", "contour"}) {
    for (int S : {32, 64, 128})
      for (int T : {512, 1024})
        out.push_back("table1-" + std::string(kind) + "-S" + std::to_string(S) + "-T" + std::to_string(T));
    for (int S : {64, 128})
      for (int T : {512, 1024})
        for (const char* a : {"05", "10"})
          out.push_back("table2-" + std::string(kind) + "-S" + std::to_string(S) + "-T" + std::to_string(T) + "-a" + a);
  }
  return out;
}

std::optional<Preset> find_preset(std::string_view name) {
  for (const std::string& candidate : preset_names()) {
    if (candidate != name) continue;
    Preset p;
    p.name = candidate;
    const bool table1 = candidate.rfind("table1-", 0) == 0;
    p.kind = table1 ? PresetKind::Benchmark : PresetKind::Coverage;
    p.scenario.correlation =
        candidate.find("-contour-") != std::string::npos ? CorrelationKind::Contour : CorrelationKind::BlockDiagonal;
    const auto number_after = [&](char tag) {
      const std::size_t pos = candidate.find(std::string("-") + tag);
      return std::stoi(candidate.substr(pos + 2));
    };
    p.scenario.S = number_after('S');
    p.scenario.T = number_after('T');
    if (table1) {
      p.M = 1000;
      p.methods = table1_methods();
    } else {
      p.M = 5000;
      p.alpha = number_after('a') / 100.0;
      p.regions = {RegionMethod::AsymptoticKnownV, RegionMethod::AsymptoticPlugin, RegionMethod::Bootstrap};
    }
    return p;
  }
  return std::nullopt;
}

}  // namespace specmix
