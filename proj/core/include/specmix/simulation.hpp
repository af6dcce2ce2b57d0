#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "specmix/correlation.hpp"
#include "specmix/inference.hpp"
#include "specmix/mixed_model.hpp"
#include "specmix/spectral.hpp"
#include "specmix/wavelet.hpp"

namespace specmix {

enum class CorrelationKind { Identity, BlockDiagonal, Contour, Explicit };

inline constexpr std::string_view kInnovationConvention =
    "xi_l: Re, Im iid N(0, 1/2) for 0 < l < T; real N(0, 1) at l = 0 and l = T; xi_{-l} = conj(xi_l)";

struct ScenarioConfig {
  Index S = 32;
  Index T = 512;
  std::variant<ArmaModel, Vector> mean_model = benchmark_arma_model();
  double ma_modulus_floor = kMaModulusFloor;
  double C = 0.5;
  int J_max = 4;
  CorrelationKind correlation = CorrelationKind::BlockDiagonal;
  Matrix explicit_correlation;
  WaveletBasisSpec basis;
  // Coefficients of the mean curve below this magnitude are zeroed; 1/T
  // when unset.
  std::optional<double> sparsify_tol;
  double sigma_e2 = kLogChiSquareVariance;
  std::uint64_t seed = 1;

  void validate() const;
};

struct ScenarioTruth {
  Vector h_f_model;  // log-spectrum before sparsification
  Vector h;          // sparse coefficient sequence
  Vector h_f;        // idwt(h): the target population-mean log-spectrum
  SelectedSet K_h;
  SelectedSet K_u;
  Vector sigma_u2;
  CorrelationMatrix G_S;
  double sigma_e2 = kLogChiSquareVariance;

  CovarianceModel covariance() const;
};

Vector truth_variance_components(double C, int J_max, const SelectedSet& K_h, Index T);

CorrelationMatrix block_diag_correlation(Index S, double rho = 0.9);
CorrelationMatrix contour_correlation(Index S);

ScenarioTruth scenario_truth(const ScenarioConfig& cfg);

struct SimulatedPanel {
  TimeSeriesPanel series;
  Matrix U;  // S x T random-effect coefficients
  double max_imaginary_residue = 0.0;
};

// Replicated series by the discrete Cramer representation.
SimulatedPanel generate_panel(const ScenarioConfig& cfg, const ScenarioTruth& truth, std::uint64_t seed);
SimulatedPanel generate_panel(const ScenarioConfig& cfg);

// Wavelet coefficients of the bias-corrected log-periodograms of a panel.
CoefficientPanel coefficient_panel(const TimeSeriesPanel& series, const WaveletBasisSpec& basis = {});

enum class PanelModel {
  TimeSeries,        // full generator, log-periodogram, dwt
  GaussianSequence,  // Y = h + U + N(0, sigma_e2 / T)
};

// Wavelet-domain panel drawn directly from the Gaussian sequence model.
CoefficientPanel gaussian_sequence_panel(const ScenarioTruth& truth, std::uint64_t seed);

// OLS thresholds the replicate mean; OLSPerReplicate smooths each replicate
// by FDR and averages the smoothed curves.
enum class MethodKind { OLS, OLSPerReplicate, NonAdaptive, Adaptive, Oracle };

struct MethodSpec {
  MethodKind kind = MethodKind::Adaptive;
  double q = 0.001;

  std::string label() const;
  bool estimates_covariance() const noexcept { return kind != MethodKind::OLS && kind != MethodKind::OLSPerReplicate; }
};

std::vector<MethodSpec> table1_methods();

struct MetricSummary {
  double mean = 0.0;
  double se = 0.0;
};

MetricSummary summarize(const std::vector<double>& values);

struct MethodResult {
  MethodSpec method;
  std::vector<double> ase_h;
  std::vector<double> ase_GT;
  std::vector<double> ase_GS;
  std::vector<int> iterations;

  MetricSummary h() const { return summarize(ase_h); }
  MetricSummary GT() const { return summarize(ase_GT); }
  MetricSummary GS() const { return summarize(ase_GS); }
};

struct BenchmarkOptions {
  PanelModel panel_model = PanelModel::TimeSeries;
  FitConfig fit;
};

struct BenchmarkResult {
  std::vector<MethodResult> methods;
  int M = 0;
  double seconds = 0.0;
};

struct MethodEstimate {
  Vector h_hat;
  Vector sigma_u2;
  Matrix G_S;
  int iterations = 0;
};

// One method applied to one panel.
MethodEstimate apply_method(const MethodSpec& method, const CoefficientPanel& Y, const ScenarioTruth& truth,
                            const FitConfig& base);

BenchmarkResult run_benchmark(const ScenarioConfig& cfg, const std::vector<MethodSpec>& methods, int M,
                              const BenchmarkOptions& opts = {});

struct CoverageOptions {
  PanelModel panel_model = PanelModel::TimeSeries;
  FitConfig fit;
  int bootstrap_draws = 1000;
  // Replaces every radius by +infinity.
  bool infinite_radius = false;
};

struct CoverageResult {
  RegionMethod method = RegionMethod::AsymptoticKnownV;
  double alpha = 0.05;
  int M = 0;
  std::vector<double> radius;
  std::vector<double> error;  // ||h - center||
  std::vector<std::uint8_t> covered;
  double seconds = 0.0;

  double coverage() const;
  double se() const;
};

CoverageResult run_coverage(const ScenarioConfig& cfg, RegionMethod method, double alpha, int M,
                            const CoverageOptions& opts = {});

enum class PresetKind { Benchmark, Coverage };

struct Preset {
  std::string name;
  PresetKind kind = PresetKind::Benchmark;
  ScenarioConfig scenario;
  int M = 100;
  double alpha = 0.05;
  std::vector<MethodSpec> methods;
  std::vector<RegionMethod> regions;
};

// table1-{block,contour}-S{32,64,128}-T{512,1024} and
// table2-{block,contour}-S{64,128}-T{512,1024}-a{05,10}.
std::optional<Preset> find_preset(std::string_view name);
std::vector<std::string> preset_names();

std::string to_string(CorrelationKind kind);
std::string to_string(MethodKind kind);
std::string to_string(RegionMethod method);

}  // namespace specmix
