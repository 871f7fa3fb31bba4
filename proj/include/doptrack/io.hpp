#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace doptrack {

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

/// Comma-separated writer with a mandatory header row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& file, const std::vector<std::string>& header);

  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(const std::string& v);
  void end_row();

 private:
  void separator();

  std::ofstream out_;
  std::filesystem::path file_;
  bool row_started_ = false;
};

/// Numeric CSV body; throws IoError when the header differs from `expected`.
std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& file,
                                                  const std::vector<std::string>& expected);

void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace doptrack
