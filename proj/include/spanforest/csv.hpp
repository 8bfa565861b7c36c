#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace spanforest {

/// Shortest round-trip decimal form with '.' as separator; "nan"/"inf" for
/// non-finite values.
std::string format_double(double value);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row);

  [[nodiscard]] const std::vector<std::string>& header() const { return header_; }
  [[nodiscard]] const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  void write(std::ostream& out) const;
  [[nodiscard]] std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace spanforest
