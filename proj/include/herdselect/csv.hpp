#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace herdselect::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// One-based source line of each row, for error messages.
  std::vector<std::size_t> line_numbers;
};

/// Splits a single record. Supports double-quoted fields with "" escapes;
/// surrounding whitespace of unquoted fields is trimmed.
std::vector<std::string> split_record(std::string_view line, char delimiter = ',');

/// Parses header + records; blank lines are skipped. Rows are NOT checked
/// for width here.
Table parse(std::string_view text, char delimiter = ',');

/// Strict double parse of a whole cell; false for blanks, trailing junk,
/// NaN and infinities.
bool parse_double(std::string_view cell, double& out);

std::string format_double(double value);

/// Quotes a field if it contains the delimiter, a quote or a newline.
std::string escape(std::string_view field, char delimiter = ',');

}  // namespace herdselect::csv
