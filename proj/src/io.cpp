#include "transop/io.hpp"

#include "transop/errors.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace transop {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp);
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "failed writing " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot rename " + tmp + " to " + path + ": " + ec.message());
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

CsvTable parse_csv(const std::string& text, bool has_header) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool need_header = has_header;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_cells(trim(line));
    if (need_header) {
      table.header = std::move(cells);
      need_header = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

double parse_double(const std::string& cell) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw Error(ErrorKind::Parse, "not a number: '" + cell + "'");
  }
  return value;
}

long long parse_int(const std::string& cell) {
  long long value = 0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw Error(ErrorKind::Parse, "not an integer: '" + cell + "'");
  }
  return value;
}

std::vector<Vector> parse_numeric_rows(const CsvTable& table) {
  std::vector<Vector> rows;
  rows.reserve(table.rows.size());
  std::size_t width = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    if (r == 0) width = cells.size();
    if (cells.size() != width) {
      throw Error(ErrorKind::Parse, "row " + std::to_string(r) + " has " +
                                        std::to_string(cells.size()) + " cells, expected " +
                                        std::to_string(width));
    }
    Vector v(static_cast<Eigen::Index>(width));
    for (std::size_t c = 0; c < width; ++c) v(static_cast<Eigen::Index>(c)) = parse_double(cells[c]);
    rows.push_back(std::move(v));
  }
  return rows;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Parse, "config line " + std::to_string(lineno) + " has no '='");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::Parse, "config line " + std::to_string(lineno) + " has no key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::string points_to_csv(const std::vector<LatentPoint>& points) {
  std::ostringstream os;
  if (points.empty()) return "";
  const Eigen::Index d = points.front().z.size();
  const bool labeled = points.front().label.has_value();
  for (Eigen::Index i = 0; i < d; ++i) os << (i ? "," : "") << "z" << i;
  if (labeled) os << ",label";
  os << "\n";
  for (const auto& p : points) {
    if (p.z.size() != d || p.label.has_value() != labeled) {
      throw Error(ErrorKind::DimensionMismatch, "points in a dataset must share dimension and labeling");
    }
    for (Eigen::Index i = 0; i < d; ++i) os << (i ? "," : "") << format_double(p.z(i));
    if (labeled) os << "," << *p.label;
    os << "\n";
  }
  return os.str();
}

std::vector<LatentPoint> points_from_csv(const std::string& text) {
  const CsvTable table = parse_csv(text, true);
  const bool labeled = !table.header.empty() && table.header.back() == "label";
  const std::size_t d = table.header.size() - (labeled ? 1 : 0);
  if (d == 0) throw Error(ErrorKind::Parse, "dataset has no coordinate columns");
  std::vector<LatentPoint> points;
  points.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    if (cells.size() != table.header.size()) {
      throw Error(ErrorKind::Parse, "dataset row " + std::to_string(r) + " has wrong width");
    }
    LatentPoint p;
    p.z.resize(static_cast<Eigen::Index>(d));
    for (std::size_t c = 0; c < d; ++c) p.z(static_cast<Eigen::Index>(c)) = parse_double(cells[c]);
    if (labeled) p.label = static_cast<int>(parse_int(cells[d]));
    points.push_back(std::move(p));
  }
  return points;
}

std::string pair_indices_to_csv(const std::vector<PointPair>& pairs) {
  std::ostringstream os;
  os << "anchor_index,neighbor_index\n";
  for (const auto& p : pairs) os << p.anchor_index << "," << p.neighbor_index << "\n";
  return os.str();
}

std::vector<std::pair<int, int>> pair_indices_from_csv(const std::string& text) {
  const CsvTable table = parse_csv(text, true);
  std::vector<std::pair<int, int>> out;
  for (const auto& row : table.rows) {
    if (row.size() != 2) throw Error(ErrorKind::Parse, "pair rows need two indices");
    out.emplace_back(static_cast<int>(parse_int(row[0])), static_cast<int>(parse_int(row[1])));
  }
  return out;
}

}  // namespace transop
