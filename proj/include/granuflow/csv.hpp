#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace granuflow::csv {

using Row = std::vector<std::string>;

/// RFC-4180 reader: quoted fields, doubled quotes, CRLF or LF line ends.
std::vector<Row> read(std::istream& in);

void write_row(std::ostream& out, const Row& fields);

/// Shortest round-trip is not required; 17 significant digits always.
std::string format_double(double value);

double parse_double(std::string_view text);

/// Index of `name` in `header`, or throws Io.
std::size_t column(const Row& header, std::string_view name);

}  // namespace granuflow::csv
