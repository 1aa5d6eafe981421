#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace resilab {

// Minimal strict CSV layer. No quoting or embedded separators: every format
// in this project is plain comma-delimited numeric/identifier data.

std::vector<std::string> split_csv_line(const std::string& line);

class CsvReader {
 public:
  // Opens `path` and checks that the header equals `expected_header` exactly.
  // Throws Error(Errc::io_error) / Error(Errc::missing_column).
  CsvReader(const std::string& path, const std::vector<std::string>& expected_header);

  // Reads the next data row. Returns false at EOF. Skips blank lines.
  bool next(std::vector<std::string>& fields);

  // 1-based line number of the row most recently returned by next().
  std::size_t line_number() const { return line_no_; }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void write_row(const std::vector<std::string>& fields);
  void close();

 private:
  std::string path_;
  std::ofstream out_;
};

// Full round-trip precision (%.17g) for CSV payload values.
std::string fmt_full(double x);
// Fixed formatting for human-facing tables.
std::string fmt_fixed(double x, int decimals);

// Parses a floating point field; returns nullopt on any trailing garbage.
std::optional<double> parse_double(const std::string& s);
std::optional<long long> parse_int(const std::string& s);

// Writes `content` to `path` atomically: temp file in the same directory,
// then rename over the target.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace resilab
