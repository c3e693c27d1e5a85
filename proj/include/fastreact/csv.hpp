#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace fastreact {

/// printf %.17g, enough digits to round-trip a double exactly.
std::string format_double(double value);

/// Minimal CSV emitter: fixed header, one add() per column, end_row()
/// validates the column count. Numeric cells use format_double.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  CsvWriter& add(double value);
  CsvWriter& add(long long value);
  void end_row();

 private:
  void put(const std::string& cell);

  std::ofstream out_;
  std::string path_;
  size_t n_columns_ = 0;
  size_t column_ = 0;
};

}  // namespace fastreact
