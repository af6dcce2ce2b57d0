#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "specmix/types.hpp"

namespace specmix {

// Binary layout: "SPXP1", u32 S, u32 T, then S*T little-endian f64 in
// row-major order.
inline constexpr std::string_view kBinaryPanelMagic = "SPXP1";

std::vector<double> axis_values(PanelDomain domain, Index columns);

// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

struct CsvPanel {
  std::vector<double> axis;
  Matrix values;
};

// Header row holds the axis values; each following row is one replicate.
std::string panel_to_csv(const Matrix& values, std::span<const double> axis);
CsvPanel parse_panel_csv(std::string_view text);

std::string panel_to_binary(const Matrix& values);
Matrix parse_panel_binary(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Detects the binary magic, otherwise parses CSV.
Matrix load_panel(const std::filesystem::path& path);

}  // namespace specmix
