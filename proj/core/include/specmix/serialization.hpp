#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "specmix/inference.hpp"
#include "specmix/mixed_model.hpp"
#include "specmix/simulation.hpp"

namespace specmix {

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t value);

// Provenance attached to every artifact. config_json must be a JSON object.
struct ArtifactMeta {
  std::string config_json = "{}";
  std::string config_hash;
  std::uint64_t seed = 0;
};

// Re-serializes a JSON document with sorted keys and no whitespace.
std::string canonical_json(std::string_view json_text);
// FNV-1a-64 of the canonical form, as 16 hex digits.
std::string config_hash(std::string_view json_text);

std::string model_fit_to_json(const ModelFit& fit, const ArtifactMeta& meta = {});
ModelFit model_fit_from_json(std::string_view text, ArtifactMeta* meta = nullptr);

std::string region_to_json(const ConfidenceRegion& region, const ArtifactMeta& meta = {});
ConfidenceRegion region_from_json(std::string_view text);

std::string truth_to_json(const ScenarioTruth& truth, const Matrix& U, const ArtifactMeta& meta = {});
// Reads the truth fields back (U is not restored).
ScenarioTruth truth_from_json(std::string_view text);

// One row per method and metric.
std::string benchmark_to_csv(const BenchmarkResult& result);
std::string benchmark_to_json(const BenchmarkResult& result, const ArtifactMeta& meta, bool per_rep);

std::string coverage_to_csv(const std::vector<CoverageResult>& results);
std::string coverage_to_json(const std::vector<CoverageResult>& results, const ArtifactMeta& meta, bool per_rep);

std::string to_string(RegionDomain domain);
RegionMethod region_method_from_string(std::string_view name);

}  // namespace specmix
