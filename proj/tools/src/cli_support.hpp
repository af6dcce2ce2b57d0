#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "specmix/error.hpp"
#include "specmix/mixed_model.hpp"
#include "specmix/simulation.hpp"

namespace specmix::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitIo = 4;

int exit_code_for(ErrorKind kind) noexcept;

// Splices the keys of the JSON object named by --config into the argument
// list. Keys name long options ("J_max" -> --J-max) of the invoked
// subcommand or the top-level app; options given on the command line win.
// Unknown keys raise InvalidArgument. args excludes the program name.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args);

json parse_json(const std::string& text, const std::string& what);
json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);
void ensure_directory(const std::filesystem::path& dir);

// Config hash and seed of the manifest that lists `file`, if one sits next
// to it.
struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
};
std::optional<Provenance> sibling_manifest(const std::filesystem::path& file);

// Prints a warning when both hashes are known and differ.
void warn_on_mismatch(const std::string& what, const std::string& expected, const std::string& actual);

struct ScenarioOptions {
  std::optional<std::string> scenario;
  std::optional<Index> S;
  std::optional<Index> T;
  std::optional<double> C;
  std::optional<int> J_max;
  std::optional<int> vanishing_moments;
  std::optional<double> sigma_e2;
  std::optional<double> sparsify_tol;
  std::optional<double> ma_floor;
  std::optional<double> innovation_variance;
  std::vector<double> ar;
  std::vector<double> ma;
  std::optional<std::uint64_t> seed;
  CLI::Option* ar_opt = nullptr;
  CLI::Option* ma_opt = nullptr;

  void add_to(CLI::App& app);
  ScenarioConfig apply(ScenarioConfig base) const;
};

json scenario_json(const ScenarioConfig& cfg);

struct FitOptions {
  std::string selection = "fdr";
  double q = 0.001;
  std::optional<Index> k_h;
  double delta = 0.01;
  double tolerance = 1e-6;
  int max_iterations = 20;
  std::string weights = "gls";
  std::optional<double> sigma_e2;
  std::optional<double> cutoff_alpha;
  double cutoff_C = 1.0;

  void add_to(CLI::App& app, bool with_iteration);
  FitConfig build() const;
  json to_json() const;
};

std::string input_kind_check(const std::string& value);
CoefficientPanel load_coefficients(const std::filesystem::path& path, const std::string& input,
                                   const WaveletBasisSpec& basis = {});

// Long-form series,frequency,value rows.
class PlotData {
 public:
  void add(const std::string& series, const Vector& values, bool ordinal = false);
  std::string csv() const;

 private:
  std::string body_;
};

}  // namespace specmix::cli
