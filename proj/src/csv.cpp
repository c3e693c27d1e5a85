#include "fastreact/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace fastreact {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : out_(path), path_(path), n_columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot open output file: " + path);
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void CsvWriter::put(const std::string& cell) {
  if (column_ == n_columns_)
    throw std::logic_error("csv row in " + path_ + " has too many columns");
  if (column_) out_ << ',';
  out_ << cell;
  ++column_;
}

CsvWriter& CsvWriter::add(double value) {
  put(format_double(value));
  return *this;
}

CsvWriter& CsvWriter::add(long long value) {
  put(std::to_string(value));
  return *this;
}

void CsvWriter::end_row() {
  if (column_ != n_columns_)
    throw std::logic_error("csv row in " + path_ + " has too few columns");
  out_ << '\n';
  column_ = 0;
  if (!out_) throw std::runtime_error("write failed: " + path_);
}

}  // namespace fastreact
