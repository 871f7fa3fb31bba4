#include "doptrack/io.hpp"

#include <array>
#include <charconv>
#include <sstream>

#include "doptrack/error.hpp"

namespace doptrack {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw IoError("cannot format number");
  return std::string(buf.data(), ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& file, const std::vector<std::string>& header)
    : out_(file), file_(file) {
  if (!out_) throw IoError("cannot open " + file.string() + " for writing");
  for (const auto& h : header) cell(h);
  end_row();
}

void CsvWriter::separator() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

CsvWriter& CsvWriter::cell(double v) {
  separator();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::cell(long long v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  separator();
  out_ << v;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_started_ = false;
  if (!out_) throw IoError("write failed on " + file_.string());
}

std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& file,
                                                  const std::vector<std::string>& expected) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(file.string() + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::string want;
  for (std::size_t i = 0; i < expected.size(); ++i) want += (i ? "," : "") + expected[i];
  if (line != want)
    throw IoError(file.string() + ": expected header '" + want + "', found '" + line + "'");

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(expected.size());
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(p, end, v);
      if (ec != std::errc{})
        throw IoError(file.string() + ":" + std::to_string(lineno) + ": bad number");
      row.push_back(v);
      if (ptr == end) break;
      if (*ptr != ',') throw IoError(file.string() + ":" + std::to_string(lineno) + ": bad separator");
      p = ptr + 1;
    }
    if (row.size() != expected.size())
      throw IoError(file.string() + ":" + std::to_string(lineno) + ": wrong column count");
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot open " + file.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed on " + file.string());
}

}  // namespace doptrack
