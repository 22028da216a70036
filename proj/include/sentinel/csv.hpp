#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sentinel::csv {

using Row = std::vector<std::string>;

// Quotes a field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

// Parses RFC 4180-style CSV (quoted fields, doubled quotes). The first row is
// returned like any other row.
std::vector<Row> read(std::istream& in);

// Fixed six-decimal rendering used by every report; undefined values render
// as "NA" so they can never be mistaken for zero.
std::string format_metric(std::optional<double> value);

// Shortest text that parses back to the identical double.
std::string format_exact(double value);

std::optional<double> parse_metric(std::string_view text);

}  // namespace sentinel::csv
