#include <cmath>
#include <filesystem>
#include <limits>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "specmix/panel_io.hpp"
#include "specmix/random.hpp"
#include "specmix/serialization.hpp"

using namespace specmix;

namespace {

Matrix awkward_values(Index rows, Index cols, Rng& rng) {
  Matrix M(rows, cols);
  for (Index i = 0; i < M.size(); ++i) M.data()[i] = rng.normal() * std::pow(10.0, static_cast<int>(i % 9) - 4);
  M(0, 0) = 0.1;
  M(0, 1) = 1.0 / 3.0;
  M(rows - 1, cols - 1) = -5e-300;
  return M;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

std::string message_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

ModelFit sample_fit(Rng& rng) {
  ModelFit fit;
  const Index S = 4, T = 16;
  fit.h_hat = oracle::random_vector(T, rng);
  fit.K_h = SelectedSet({0, 2, 5}, 0.123);
  fit.re_cov.sigma_u2 = Vector::Zero(T);
  fit.re_cov.sigma_u2[2] = 0.7;
  fit.re_cov.K_u = SelectedSet({2}, 0.5);
  Matrix G = Matrix::Identity(S, S);
  G(0, 1) = G(1, 0) = 0.3;
  fit.re_cov.G_S = CorrelationMatrix(G);
  fit.G_raw = G;
  fit.weights = ols_weight_matrix(S, T);
  fit.weights_mode = WeightsMode::GLS;
  fit.iterations = 7;
  fit.converged = false;
  return fit;
}

}  // namespace

TEST_SUITE("serialization") {
  TEST_CASE("CSV panels round trip exactly") {
    Rng rng(91);
    const Matrix M = awkward_values(5, 12, rng);
    const auto axis = axis_values(PanelDomain::Frequency, 12);
    const CsvPanel back = parse_panel_csv(panel_to_csv(M, axis));
    CHECK(back.values == M);
    CHECK(back.axis == axis);
    CHECK(axis[1] == 1.0 / 24.0);
    CHECK(axis_values(PanelDomain::Coefficient, 4) == std::vector<double>{1, 2, 3, 4});
    CHECK(axis_values(PanelDomain::Time, 3) == std::vector<double>{1, 2, 3});
  }

  TEST_CASE("shortest decimal formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    Rng rng(92);
    for (int i = 0; i < 1000; ++i) {
      const double v = rng.normal() * std::pow(10.0, i % 40 - 20);
      CHECK(std::stod(format_double(v)) == v);
    }
  }

  TEST_CASE("binary panels round trip bit-exactly") {
    Rng rng(93);
    const Matrix M = awkward_values(3, 33, rng);
    const std::string bytes = panel_to_binary(M);
    CHECK(bytes.substr(0, 5) == "SPXP1");
    CHECK(bytes.size() == 5 + 8 + 3 * 33 * 8);
    CHECK(parse_panel_binary(bytes) == M);
    CHECK(kind_of([&] { (void)parse_panel_binary(bytes.substr(0, bytes.size() - 1)); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { (void)parse_panel_binary("NOPE"); }) == ErrorKind::ParseError);
  }

  TEST_CASE("CSV errors name the row and column") {
    const std::string bad = "1,2,3\n0.5,abc,1\n";
    CHECK(kind_of([&] { (void)parse_panel_csv(bad); }) == ErrorKind::ParseError);
    const std::string msg = message_of([&] { (void)parse_panel_csv(bad); });
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
    const std::string ragged = "1,2,3\n1,2,3\n1,2\n";
    const std::string msg2 = message_of([&] { (void)parse_panel_csv(ragged); });
    CHECK(msg2.find("row 3") != std::string::npos);
    CHECK(kind_of([] { (void)parse_panel_csv(""); }) == ErrorKind::ParseError);
    CHECK(parse_panel_csv("1,2\r\n3,4\r\n").values(0, 1) == 4.0);
    CHECK(parse_panel_csv("\n1,2\n3,4\n").values.rows() == 1);
  }

  TEST_CASE("files and loader") {
    Rng rng(94);
    const Matrix M = awkward_values(2, 8, rng);
    const auto dir = std::filesystem::temp_directory_path() / "specmix_serialization_test";
    std::filesystem::create_directories(dir);
    write_file(dir / "p.bin", panel_to_binary(M));
    write_file(dir / "p.csv", panel_to_csv(M, axis_values(PanelDomain::Time, 8)));
    CHECK(load_panel(dir / "p.bin") == M);
    CHECK(load_panel(dir / "p.csv") == M);
    CHECK(kind_of([&] { (void)read_file(dir / "missing.csv"); }) == ErrorKind::IoError);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("model fits round trip") {
    Rng rng(95);
    const ModelFit fit = sample_fit(rng);
    ArtifactMeta meta{R"({"b":1,"a":[1,2]})", "", 42};
    const std::string text = model_fit_to_json(fit, meta);
    ArtifactMeta back_meta;
    const ModelFit back = model_fit_from_json(text, &back_meta);
    CHECK(back.h_hat == fit.h_hat);
    CHECK(back.K_h == fit.K_h);
    CHECK(back.K_h.threshold_used() == fit.K_h.threshold_used());
    CHECK(back.re_cov.sigma_u2 == fit.re_cov.sigma_u2);
    CHECK(back.re_cov.K_u == fit.re_cov.K_u);
    CHECK(back.re_cov.G_S.entries() == fit.re_cov.G_S.entries());
    CHECK(back.weights == fit.weights);
    CHECK(back.weights_mode == WeightsMode::GLS);
    CHECK(back.iterations == 7);
    CHECK(!back.converged);
    CHECK(back_meta.seed == 42);
    CHECK(back_meta.config_hash == config_hash(meta.config_json));
    // Indices are written one-based.
    const auto j = nlohmann::json::parse(text);
    CHECK(j.at("K_h").at("indices") == nlohmann::json::array({1, 3, 6}));
  }

  TEST_CASE("regions round trip") {
    ConfidenceRegion r;
    r.center = Vector::LinSpaced(8, -1.0, 1.0);
    r.radius = 0.3;
    r.level = 0.9;
    r.method = RegionMethod::AsymptoticPlugin;
    r.seed = 77;
    r.A = 1e-3;
    r.c = 2e-4;
    r.risk = -0.01;
    r.z = 1.2815515655446004;
    r.weighted_variance = Vector::Constant(8, 1e-4);
    const ConfidenceRegion back = region_from_json(region_to_json(r));
    CHECK(back.center == r.center);
    CHECK(back.radius == r.radius);
    CHECK(back.level == r.level);
    CHECK(back.method == r.method);
    CHECK(back.seed == 77);
    CHECK(back.risk == r.risk);
    CHECK(back.weighted_variance == r.weighted_variance);
    ConfidenceRegion inf = r;
    inf.radius = std::numeric_limits<double>::infinity();
    inf.weighted_variance.resize(0);
    CHECK(std::isinf(region_from_json(region_to_json(inf)).radius));
    CHECK(region_method_from_string("bootstrap") == RegionMethod::Bootstrap);
    CHECK(kind_of([] { (void)region_method_from_string("jackknife"); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("truth records round trip") {
    ScenarioConfig cfg;
    cfg.S = 16;
    cfg.T = 64;
    const ScenarioTruth truth = scenario_truth(cfg);
    const ScenarioTruth back = truth_from_json(truth_to_json(truth, Matrix::Zero(16, 64)));
    CHECK(back.h == truth.h);
    CHECK(back.h_f == truth.h_f);
    CHECK(back.K_h == truth.K_h);
    CHECK(back.K_u == truth.K_u);
    CHECK(back.sigma_u2 == truth.sigma_u2);
    CHECK(back.G_S.entries() == truth.G_S.entries());
    CHECK(back.sigma_e2 == truth.sigma_e2);
  }

  TEST_CASE("canonical hashing") {
    CHECK(canonical_json(R"({ "b": 1, "a": {"d": 2, "c": 3} })") == R"({"a":{"c":3,"d":2},"b":1})");
    CHECK(config_hash(R"({"b":1,"a":2})") == config_hash("{\n  \"a\": 2,\n  \"b\": 1\n}"));
    CHECK(config_hash(R"({"a":1})") != config_hash(R"({"a":2})"));
    CHECK(config_hash("{}").size() == 16);
    // Reference FNV-1a-64 values.
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(hex64(0xabcULL) == "0000000000000abc");
  }

  TEST_CASE("malformed documents") {
    CHECK(kind_of([] { (void)model_fit_from_json("{not json"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { (void)model_fit_from_json(R"({"h_hat": [1, 2]})"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { (void)region_from_json(R"({"center": "x"})"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { (void)truth_from_json("[]"); }) == ErrorKind::ParseError);
    Rng rng(96);
    ModelFit fit = sample_fit(rng);
    auto j = nlohmann::json::parse(model_fit_to_json(fit));
    j["h_hat"] = nlohmann::json::array({1.0, 2.0});
    CHECK(kind_of([&] { (void)model_fit_from_json(j.dump()); }) == ErrorKind::DimensionMismatch);
  }

  TEST_CASE("benchmark and coverage tables") {
    BenchmarkResult r;
    r.M = 2;
    MethodResult m;
    m.method = {MethodKind::OLS, 0.0};
    m.ase_h = {0.1, 0.3};
    r.methods.push_back(m);
    const std::string csv = benchmark_to_csv(r);
    CHECK(csv.find("OLS") != std::string::npos);
    CHECK(csv.find("0.2") != std::string::npos);
    const auto j = nlohmann::json::parse(benchmark_to_json(r, ArtifactMeta{}, true));
    CHECK(j.dump().find("0.3") != std::string::npos);

    CoverageResult c;
    c.M = 2;
    c.radius = {1.0, 2.0};
    c.error = {0.5, 2.5};
    c.covered = {1, 0};
    CHECK(c.coverage() == 0.5);
    const std::string ccsv = coverage_to_csv({c});
    CHECK(ccsv.find("0.5") != std::string::npos);
    const auto cj = nlohmann::json::parse(coverage_to_json({c}, ArtifactMeta{}, true));
    CHECK(cj.dump().find("2.5") != std::string::npos);
  }
}
