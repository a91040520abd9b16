#pragma once

#include <span>
#include <string>
#include <vector>

namespace barostab {

/// CSV writer with a fixed header row and 17-significant-digit numeric
/// formatting (bit-exact reproducibility across reruns). Content goes to a
/// temporary file renamed into place on close().
class CsvWriter {
 public:
  CsvWriter(std::string path, const std::vector<std::string>& columns);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(std::span<const double> values);
  void close();

 private:
  std::string path_;
  std::string buffer_;
  std::size_t n_columns_;
  bool closed_ = false;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);

/// Atomic whole-file write (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& content);

std::string format_g17(double v);

}  // namespace barostab
