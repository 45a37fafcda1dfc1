#pragma once

#include "transop/numerics.hpp"
#include "transop/operators.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace transop {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

std::string read_file(const std::string& path);

/// Writes to `path + ".tmp"` and renames over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

struct CsvTable {
  std::vector<std::string> header;  // empty when the file had none
  std::vector<std::vector<std::string>> rows;
};

/// Comma-separated cells; blank lines are skipped. With `has_header` the first
/// non-blank line becomes the header.
CsvTable parse_csv(const std::string& text, bool has_header);

/// Rows of doubles; every row must have the same width.
std::vector<Vector> parse_numeric_rows(const CsvTable& table);

double parse_double(const std::string& cell);
long long parse_int(const std::string& cell);

/// Flat `key = value` config text, `#` starts a comment.
std::map<std::string, std::string> parse_key_values(const std::string& text);

// Dataset CSV: header "z0,...,z{d-1}[,label]", one point per row.

std::string points_to_csv(const std::vector<LatentPoint>& points);
std::vector<LatentPoint> points_from_csv(const std::string& text);

// Pair index CSV: header "anchor_index,neighbor_index".

std::string pair_indices_to_csv(const std::vector<PointPair>& pairs);
std::vector<std::pair<int, int>> pair_indices_from_csv(const std::string& text);

}  // namespace transop
