#include "specmix/panel_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

namespace specmix {

SelectedSet::SelectedSet(std::vector<Index> indices, double threshold_used)
    : indices_(std::move(indices)), threshold_used_(threshold_used) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  require(indices_.empty() || indices_.front() >= 0, ErrorKind::IndexOutOfRange,
          "selected indices must be non-negative");
}

SelectedSet SelectedSet::from_mask(const std::vector<bool>& mask, double threshold_used) {
  std::vector<Index> idx;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) idx.push_back(static_cast<Index>(i));
  return SelectedSet(std::move(idx), threshold_used);
}

SelectedSet SelectedSet::all(Index T) {
  std::vector<Index> idx(static_cast<std::size_t>(T));
  for (Index i = 0; i < T; ++i) idx[static_cast<std::size_t>(i)] = i;
  return SelectedSet(std::move(idx), 0.0);
}

std::vector<bool> SelectedSet::mask(Index T) const {
  std::vector<bool> m(static_cast<std::size_t>(T), false);
  for (Index i : indices_) {
    require(i < T, ErrorKind::IndexOutOfRange, "selected index beyond panel length");
    m[static_cast<std::size_t>(i)] = true;
  }
  return m;
}

bool SelectedSet::is_subset_of(const SelectedSet& other) const {
  return std::includes(other.indices_.begin(), other.indices_.end(), indices_.begin(),
                       indices_.end());
}

SelectedSet SelectedSet::intersect(const SelectedSet& other) const {
  std::vector<Index> out;
  std::set_intersection(indices_.begin(), indices_.end(), other.indices_.begin(),
                        other.indices_.end(), std::back_inserter(out));
  return SelectedSet(std::move(out), threshold_used_);
}

std::vector<double> axis_values(PanelDomain domain, Index columns) {
  std::vector<double> axis(static_cast<std::size_t>(columns));
  for (Index c = 0; c < columns; ++c) {
    const auto i = static_cast<std::size_t>(c);
    switch (domain) {
      case PanelDomain::Time:
      case PanelDomain::Coefficient:
        axis[i] = static_cast<double>(c + 1);
        break;
      case PanelDomain::Frequency:
        axis[i] = static_cast<double>(c) / (2.0 * static_cast<double>(columns));
        break;
    }
  }
  return axis;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string panel_to_csv(const Matrix& values, std::span<const double> axis) {
  require(static_cast<Index>(axis.size()) == values.cols(), ErrorKind::DimensionMismatch,
          "axis length must equal the number of columns");
  std::string out;
  out.reserve(static_cast<std::size_t>(values.size()) * 20 + axis.size() * 12);
  for (std::size_t c = 0; c < axis.size(); ++c) {
    if (c) out += ',';
    out += format_double(axis[c]);
  }
  out += '\n';
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      if (c) out += ',';
      out += format_double(values(r, c));
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<double> parse_csv_line(std::string_view line, std::size_t row) {
  std::vector<double> cells;
  std::size_t col = 0;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = std::min(line.find(',', pos), line.size());
    std::string_view cell = line.substr(pos, end - pos);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
      cell.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
      fail(ErrorKind::ParseError, "row " + std::to_string(row + 1) + ", column " +
                                      std::to_string(col + 1) + ": cannot parse '" +
                                      std::string(cell) + "' as a number");
    }
    cells.push_back(v);
    ++col;
    if (end == line.size()) break;
    pos = end + 1;
  }
  return cells;
}

}  // namespace

CsvPanel parse_panel_csv(std::string_view text) {
  CsvPanel out;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      ++line_no;
      continue;
    }
    auto cells = parse_csv_line(line, line_no);
    if (out.axis.empty()) {
      out.axis = std::move(cells);
    } else {
      if (cells.size() != out.axis.size()) {
        fail(ErrorKind::ParseError, "row " + std::to_string(line_no + 1) + ": expected " +
                                        std::to_string(out.axis.size()) + " columns, found " +
                                        std::to_string(cells.size()));
      }
      rows.push_back(std::move(cells));
    }
    ++line_no;
  }
  require(!out.axis.empty(), ErrorKind::ParseError, "empty CSV panel");
  out.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(out.axis.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < out.axis.size(); ++c)
      out.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return out;
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::string& out, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

std::uint64_t get_le(std::string_view bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  return v;
}

}  // namespace

std::string panel_to_binary(const Matrix& values) {
  std::string out(kBinaryPanelMagic);
  put_u32(out, static_cast<std::uint32_t>(values.rows()));
  put_u32(out, static_cast<std::uint32_t>(values.cols()));
  for (Index r = 0; r < values.rows(); ++r)
    for (Index c = 0; c < values.cols(); ++c) put_f64(out, values(r, c));
  return out;
}

Matrix parse_panel_binary(std::string_view bytes) {
  const std::size_t header = kBinaryPanelMagic.size() + 8;
  require(bytes.size() >= header && bytes.substr(0, kBinaryPanelMagic.size()) == kBinaryPanelMagic,
          ErrorKind::ParseError, "missing SPXP1 magic");
  const auto rows = get_le(bytes, kBinaryPanelMagic.size(), 4);
  const auto cols = get_le(bytes, kBinaryPanelMagic.size() + 4, 4);
  require(bytes.size() == header + rows * cols * 8, ErrorKind::ParseError,
          "binary panel size does not match its S x T header");
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  std::size_t off = header;
  for (std::uint64_t r = 0; r < rows; ++r)
    for (std::uint64_t c = 0; c < cols; ++c, off += 8)
      m(static_cast<Index>(r), static_cast<Index>(c)) = std::bit_cast<double>(get_le(bytes, off, 8));
  return m;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::IoError, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  require(static_cast<bool>(out), ErrorKind::IoError, "short write to " + path.string());
}

Matrix load_panel(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.rfind(kBinaryPanelMagic, 0) == 0) return parse_panel_binary(bytes);
  return parse_panel_csv(bytes).values;
}

}  // namespace specmix
