#include "resilab/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "resilab/errors.hpp"

namespace resilab {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

namespace {

std::string join_csv(const std::vector<std::string>& fields) {
  std::string s;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) s += ',';
    s += fields[i];
  }
  return s;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

CsvReader::CsvReader(const std::string& path, const std::vector<std::string>& expected_header)
    : path_(path), in_(path) {
  if (!in_) {
    throw Error(Errc::io_error, "cannot open '" + path + "' for reading");
  }
  std::string header;
  if (!std::getline(in_, header)) {
    throw Error(Errc::missing_column, path + ": empty file, expected header '" +
                                          join_csv(expected_header) + "'");
  }
  strip_cr(header);
  line_no_ = 1;
  auto fields = split_csv_line(header);
  if (fields != expected_header) {
    throw Error(Errc::missing_column, path + ": bad header '" + header + "', expected '" +
                                          join_csv(expected_header) + "'");
  }
}

bool CsvReader::next(std::vector<std::string>& fields) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    strip_cr(line);
    if (line.empty()) continue;
    fields = split_csv_line(line);
    return true;
  }
  return false;
}

CsvWriter::CsvWriter(const std::string& path) : path_(path), out_(path) {
  if (!out_) {
    throw Error(Errc::io_error, "cannot open '" + path + "' for writing");
  }
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
  out_ << join_csv(fields) << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) {
    throw Error(Errc::io_error, "write to '" + path_ + "' failed");
  }
}

std::string fmt_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt_fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
  // Avoid the "-0.00" cell: normalize negative zero after rounding.
  if (buf[0] == '-') {
    bool all_zero = true;
    for (const char* p = buf + 1; *p; ++p) {
      if (*p != '0' && *p != '.') { all_zero = false; break; }
    }
    if (all_zero) return buf + 1;
  }
  return buf;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
  return v;
}

std::optional<long long> parse_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
  return v;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot open '" + tmp + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (out.fail()) {
      std::remove(tmp.c_str());
      throw Error(Errc::io_error, "write to '" + tmp + "' failed");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Error(Errc::io_error, "rename '" + tmp + "' -> '" + path + "' failed: " +
                                    std::strerror(errno));
  }
}

}  // namespace resilab
