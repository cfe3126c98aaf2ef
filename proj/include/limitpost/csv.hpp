#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace limitpost::csv {

struct NumericTable {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> lines;  // 1-based source line of each row
};

// Header must equal `columns` exactly; blank lines are skipped.
// Throws ParseError carrying the offending line number.
NumericTable read_numeric(std::istream& in, const std::vector<std::string>& columns);

// Shortest round-trip decimal ("%.17g").
std::string format(double v);

void write_row(std::ostream& out, const std::vector<double>& values);
void write_header(std::ostream& out, const std::vector<std::string>& columns);

std::string_view trim(std::string_view s);

}  // namespace limitpost::csv
