#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "specmix/correlation.hpp"
#include "specmix/mixed_model.hpp"
#include "specmix/panel_io.hpp"
#include "specmix/random.hpp"
#include "specmix/serialization.hpp"
#include "specmix/simulation.hpp"
#include "specmix/wavelet.hpp"

using namespace specmix;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double x, double centre, double tol) { return std::abs(x - centre) <= tol; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome wavelet_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  double round_trip = 0.0, energy = 0.0;
  Rng rng(20260101);
  for (Index T : {16, 512, 1024}) {
    Vector v(T);
    for (Index i = 0; i < T; ++i) v[i] = rng.normal();
    const Vector c = dwt(v);
    round_trip = std::max(round_trip, (idwt(c) - v).cwiseAbs().maxCoeff());
    energy = std::max(energy, std::abs(c.norm() * std::sqrt(static_cast<double>(T)) - v.norm()));
  }
  const double sec = seconds_since(t0);
  return {round_trip <= 1e-10 && energy <= 1e-10 && sec < 1.0,
          fmt("round trip %.2e, energy %.2e, %.3f s", round_trip, energy, sec)};
}

Outcome oracle_mse() {
  const auto t0 = std::chrono::steady_clock::now();
  const Index S = 8;
  const double se2 = 0.5;
  const int draws = 100000;
  int ok = 0, points = 0;
  double worst = 0.0;
  for (double h : {0.0, 0.3}) {
    for (double lambda : {0.1, 0.4}) {
      for (auto [su2, rho] : {std::pair{0.0, 0.0}, std::pair{0.5, 0.5}, std::pair{1.0, 0.9}}) {
        const Matrix G = block_diag_correlation(S, rho).entries();
        const Matrix V = su2 * G + se2 * Matrix::Identity(S, S);
        const Vector w = gls_weights(V);
        const Matrix L = V.llt().matrixL();
        Rng rng(derive_seed(777, static_cast<std::uint64_t>(points)));
        double sum = 0.0, sum2 = 0.0;
        Vector z(S);
        for (int d = 0; d < draws; ++d) {
          for (Index i = 0; i < S; ++i) z[i] = rng.normal();
          const Vector xi = Vector::Constant(S, h) + L * z;
          const double est = std::abs(xi.mean()) >= lambda ? w.dot(xi) : 0.0;
          const double e = (est - h) * (est - h);
          sum += e;
          sum2 += e * e;
        }
        const double mean = sum / draws;
        const double sd = std::sqrt(std::max(0.0, sum2 / draws - mean * mean));
        const double se = sd / std::sqrt(static_cast<double>(draws));
        const double exact = closed_form_mse(h, lambda, V, w);
        const double z_score = std::abs(mean - exact) / se;
        worst = std::max(worst, z_score);
        ok += z_score <= 3.0;
        ++points;
      }
    }
  }
  const double sec = seconds_since(t0);
  return {ok == points && sec < 120.0, fmt("%d/%d points within 3 se (worst %.2f se), %.1f s", ok, points, worst, sec)};
}

Outcome table1_reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioConfig cfg;
  cfg.S = 32;
  cfg.T = 512;
  cfg.correlation = CorrelationKind::BlockDiagonal;
  const BenchmarkResult r = run_benchmark(cfg, table1_methods(), 100);
  double ols = 0, nonadaptive = 0, oracle = 0, adaptive = 0;
  for (const MethodResult& m : r.methods) {
    if (m.method.kind == MethodKind::OLS) ols = m.h().mean;
    if (m.method.kind == MethodKind::NonAdaptive) nonadaptive = m.h().mean;
    if (m.method.kind == MethodKind::Adaptive) adaptive = m.h().mean;
    if (m.method.kind == MethodKind::Oracle) oracle = m.h().mean;
  }
  const bool b_ols = within(ols, 0.274, 0.045);
  const bool b_non = within(nonadaptive, 0.215, 0.04);
  const bool b_orc = within(oracle, 0.118, 0.02);
  const bool order = oracle < nonadaptive && nonadaptive < ols && oracle < adaptive && adaptive < ols;
  const double sec = seconds_since(t0);
  return {b_ols && b_non && b_orc && order && sec <= 900.0,
          fmt("OLS %.4f [%s], non-adaptive %.4f [%s], oracle %.4f [%s], adaptive %.4f, ordering [%s], %.0f s", ols,
              b_ols ? "ok" : "out", nonadaptive, b_non ? "ok" : "out", oracle, b_orc ? "ok" : "out", adaptive,
              order ? "ok" : "violated", sec)};
}

Outcome table2_coverage() {
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioConfig cfg;
  cfg.S = 64;
  cfg.T = 512;
  cfg.correlation = CorrelationKind::BlockDiagonal;
  const CoverageResult known = run_coverage(cfg, RegionMethod::AsymptoticKnownV, 0.05, 200);
  const CoverageResult plugin = run_coverage(cfg, RegionMethod::AsymptoticPlugin, 0.05, 200);
  const bool b_known = within(known.coverage(), 0.951, 0.04) && known.coverage() >= 0.90;
  const bool b_plugin = within(plugin.coverage(), 0.967, 0.04);
  const double sec = seconds_since(t0);
  return {b_known && b_plugin && sec <= 1500.0,
          fmt("known-V %.3f [%s], plug-in %.3f [%s], %.0f s", known.coverage(), b_known ? "ok" : "out",
              plugin.coverage(), b_plugin ? "ok" : "out", sec)};
}

Outcome set_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioConfig cfg;
  cfg.S = 128;
  cfg.T = 512;
  const ThresholdConfig threshold;
  const auto recovery = [&](const ScenarioConfig& c, bool null) {
    const ScenarioTruth truth = scenario_truth(c);
    int hits = 0;
    for (int rep = 0; rep < 100; ++rep) {
      const CoefficientPanel Y = gaussian_sequence_panel(truth, derive_seed(c.seed, static_cast<std::uint64_t>(rep)));
      const VarianceComponents vc = estimate_variance_components(Y, truth.h, SelectedSet::all(c.T), threshold);
      hits += null ? vc.K_u.empty() : vc.K_u == truth.K_u;
    }
    return hits / 100.0;
  };
  const double p = recovery(cfg, false);
  ScenarioConfig null_cfg = cfg;
  null_cfg.C = 0.0;
  const double p_null = recovery(null_cfg, true);
  return {p >= 0.8 && p_null >= 0.95,
          fmt("P(exact) %.2f, null P(empty) %.2f, %.1f s", p, p_null, seconds_since(t0))};
}

Outcome correlation_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioConfig cfg;
  cfg.S = 64;
  cfg.T = 1024;
  cfg.correlation = CorrelationKind::BlockDiagonal;
  const ScenarioTruth truth = scenario_truth(cfg);
  const Index half = cfg.S / 2;
  double in_block = 0.0, off_block = 0.0;
  const int draws = 100;
  for (int rep = 0; rep < draws; ++rep) {
    const CoefficientPanel Y = gaussian_sequence_panel(truth, derive_seed(cfg.seed, static_cast<std::uint64_t>(rep)));
    const Matrix G = fit_iterative_gls(Y, FitConfig{}).re_cov.G_S.entries();
    double a = 0.0, b = 0.0;
    for (Index i = 0; i < cfg.S; ++i) {
      for (Index j = 0; j < cfg.S; ++j) {
        if (i == j) continue;
        if (i < half && j < half) a += G(i, j);
        if ((i < half) != (j < half)) b += G(i, j);
      }
    }
    in_block += a / static_cast<double>(half * (half - 1));
    off_block += b / static_cast<double>(2 * half * half);
  }
  in_block /= draws;
  off_block /= draws;
  const bool b_in = in_block >= 0.8 && in_block <= 1.0;
  const bool b_off = within(off_block, 0.0, 0.15);
  return {b_in && b_off, fmt("in-block mean %.3f [%s], off-block mean %.3f [%s], %.1f s", in_block,
                             b_in ? "ok" : "out", off_block, b_off ? "ok" : "out", seconds_since(t0))};
}

Outcome nearest_correlation_projection() {
  Rng rng(4242);
  int ok = 0;
  double worst_eig = 1.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 3 + trial % 10;
    Matrix M = Matrix::Identity(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < i; ++j) M(i, j) = M(j, i) = 2.0 * rng.uniform() - 1.0;
    if (Eigen::SelfAdjointEigenSolver<Matrix>(M).eigenvalues().minCoeff() >= 0.0) M(0, n - 1) = M(n - 1, 0) = -1.0;
    const Matrix X = nearest_correlation(M).matrix.entries();
    const double eig = Eigen::SelfAdjointEigenSolver<Matrix>(X).eigenvalues().minCoeff();
    worst_eig = std::min(worst_eig, eig);
    const bool symmetric = (X - X.transpose()).cwiseAbs().maxCoeff() == 0.0;
    const bool unit = (X.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-12;
    const bool closer = (X - M).norm() <= (eigenvalue_clipping(M) - M).norm();
    ok += symmetric && unit && eig >= -1e-8 && closer;
  }
  return {ok == 100, fmt("%d/100 inputs valid and no farther than clipping (min eigenvalue %.2e)", ok, worst_eig)};
}

Outcome blup_shrinkage() {
  int fits = 0, violations = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    ScenarioConfig cfg;
    cfg.S = 8 + 8 * (rep % 3);
    cfg.T = 128 << (rep % 2);
    cfg.correlation = rep % 2 == 0 ? CorrelationKind::BlockDiagonal : CorrelationKind::Identity;
    cfg.C = 0.25 + 0.25 * (rep % 4);
    cfg.seed = derive_seed(99, static_cast<std::uint64_t>(rep));
    const ScenarioTruth truth = scenario_truth(cfg);
    const CoefficientPanel Y = gaussian_sequence_panel(truth, cfg.seed);
    const ModelFit fit = fit_iterative_gls(Y, FitConfig{});
    const Matrix U = predict_random_effects(Y, fit).values();
    for (Index k = 0; k < cfg.T; ++k) {
      const double lhs = U.col(k).norm();
      const double rhs = (Y.values().col(k).array() - fit.h_hat[k]).matrix().norm();
      if (lhs > rhs) {
        ++violations;
        worst = std::max(worst, lhs - rhs);
      }
    }
    ++fits;
  }
  return {violations == 0, fmt("%d fits, %d violating coefficients (worst excess %.2e)", fits, violations, worst)};
}

Outcome determinism() {
  const auto once = [] {
    ScenarioConfig cfg;
    cfg.S = 16;
    cfg.T = 256;
    cfg.seed = 31337;
    const SimulatedPanel p = generate_panel(cfg);
    const Matrix& X = p.series.values();
    std::string out = panel_to_binary(X);
    out += panel_to_csv(X, axis_values(PanelDomain::Time, X.cols()));
    out += benchmark_to_csv(run_benchmark(cfg, table1_methods(), 4));
    return out;
  };
  const std::string a = once(), b = once();
  return {a == b, fmt("%zu bytes compared, %s", a.size(), a == b ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "Run only these criteria (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"wavelet correctness", wavelet_correctness},
      {"oracle MSE", oracle_mse},
      {"benchmark reproduction", table1_reproduction},
      {"coverage", table2_coverage},
      {"set recovery", set_recovery},
      {"correlation recovery", correlation_recovery},
      {"nearest-correlation projection", nearest_correlation_projection},
      {"BLUP shrinkage", blup_shrinkage},
      {"determinism", determinism},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
