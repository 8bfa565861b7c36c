#include "spanforest/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace spanforest {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::invalid_argument("csv row width does not match the header");
  rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream& out) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(header_);
  for (const auto& row : rows_) line(row);
}

std::string CsvTable::str() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

}  // namespace spanforest
