#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "resilab/csv.hpp"
#include "resilab/dates.hpp"
#include "resilab/errors.hpp"

using namespace resilab;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("date parse and format round-trip across four decades") {
  for (int y : {1990, 1999, 2000, 2019, 2020, 2024, 2030}) {
    for (unsigned m = 1; m <= 12; ++m) {
      const Date d(y, m, 15);
      const std::string s = d.to_string();
      CHECK(Date::parse(s) == d);
      CHECK(Date::parse(s).year() == y);
      CHECK(Date::parse(s).month() == m);
      CHECK(Date::parse(s).day() == 15u);
    }
  }
  CHECK(Date(1970, 1, 1).count() == 0);
  CHECK(Date(1970, 1, 2).count() == 1);
  CHECK(Date(2020, 2, 24).to_string() == "2020-02-24");
}

TEST_CASE("leap year handling") {
  CHECK_NOTHROW(Date(2020, 2, 29));
  CHECK_NOTHROW(Date(2000, 2, 29));
  CHECK_THROWS_AS(Date(2019, 2, 29), Error);
  CHECK_THROWS_AS(Date(2100, 2, 29), Error);
  CHECK(Date(2020, 2, 29) + 1 == Date(2020, 3, 1));
  CHECK(Date(2019, 2, 28) + 1 == Date(2019, 3, 1));
  CHECK(Date(2019, 12, 31) + 1 == Date(2020, 1, 1));
}

TEST_CASE("strict iso parsing rejects malformed input") {
  Date d;
  CHECK_FALSE(Date::try_parse("", d));
  CHECK_FALSE(Date::try_parse("2020-1-01", d));
  CHECK_FALSE(Date::try_parse("2020-01-1", d));
  CHECK_FALSE(Date::try_parse("20-01-01", d));
  CHECK_FALSE(Date::try_parse("20200101", d));
  CHECK_FALSE(Date::try_parse("2020/01/01", d));
  CHECK_FALSE(Date::try_parse("2020-13-01", d));
  CHECK_FALSE(Date::try_parse("2020-00-10", d));
  CHECK_FALSE(Date::try_parse("2020-02-30", d));
  CHECK_FALSE(Date::try_parse("2020-04-31", d));
  CHECK_FALSE(Date::try_parse("2020-01-01x", d));
  CHECK_FALSE(Date::try_parse(" 2020-01-01", d));
  CHECK_FALSE(Date::try_parse("2020-01-01 ", d));
  CHECK_FALSE(Date::try_parse("202a-01-01", d));
  CHECK(Date::try_parse("2020-01-01", d));
  CHECK(d == Date(2020, 1, 1));
  CHECK_THROWS_AS(Date::parse("garbage"), Error);
}

TEST_CASE("weekday anchors and weekend detection") {
  CHECK(Date(2020, 2, 24).weekday() == std::chrono::Monday);
  CHECK(Date(2020, 3, 20).weekday() == std::chrono::Friday);
  CHECK(Date(1970, 1, 1).weekday() == std::chrono::Thursday);
  CHECK(Date(2020, 2, 22).is_weekend());
  CHECK(Date(2020, 2, 23).is_weekend());
  CHECK_FALSE(Date(2020, 2, 24).is_weekend());
  int weekends = 0;
  for (Date d(2020, 1, 1); d <= Date(2020, 12, 31); ++d) {
    if (d.is_weekend()) ++weekends;
  }
  CHECK(weekends == 104);
}

TEST_CASE("date arithmetic and ordering") {
  const Date a(2020, 2, 24), b(2020, 3, 20);
  CHECK(b - a == 25);
  CHECK(a + 25 == b);
  CHECK(b - 25 == a);
  CHECK(a < b);
  CHECK(a <= a);
  CHECK(b > a);
  CHECK(a != b);
  Date c = a;
  ++c;
  CHECK(c == Date(2020, 2, 25));
}

TEST_CASE("csv line splitting") {
  CHECK(split_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_csv_line("a") == std::vector<std::string>{"a"});
  CHECK(split_csv_line("a,,c") == std::vector<std::string>{"a", "", "c"});
  CHECK(split_csv_line(",") == std::vector<std::string>{"", ""});
  CHECK(split_csv_line("") == std::vector<std::string>{""});
}

TEST_CASE("csv reader enforces the header and tracks line numbers") {
  const std::string path = temp_path("resilab_csv_reader_test.csv");
  write_file(path, "date,value\r\n2020-01-01,1\n\n2020-01-02,2\r\n");

  CsvReader reader(path, {"date", "value"});
  std::vector<std::string> f;
  REQUIRE(reader.next(f));
  CHECK(f == std::vector<std::string>{"2020-01-01", "1"});
  CHECK(reader.line_number() == 2);
  REQUIRE(reader.next(f));
  CHECK(f == std::vector<std::string>{"2020-01-02", "2"});
  CHECK(reader.line_number() == 4);
  CHECK_FALSE(reader.next(f));

  CHECK_THROWS_AS(CsvReader(path, {"date", "other"}), Error);
  CHECK_THROWS_AS(CsvReader(temp_path("resilab_no_such_file.csv"), {"a"}), Error);
  try {
    CsvReader bad(path, {"date", "other"});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::missing_column);
  }
  std::filesystem::remove(path);
}

TEST_CASE("full-precision formatting round-trips doubles exactly") {
  const double values[] = {0.0,         1.0,     -1.0,        0.1,
                           1.0 / 3.0,   1e-17,   -1e300,      1e300,
                           0.001953125, 2.5e-12, 123456789.123456789};
  for (double v : values) {
    const std::string s = fmt_full(v);
    auto back = parse_double(s);
    REQUIRE(back.has_value());
    CHECK(*back == v);
  }
}

TEST_CASE("fixed formatting rounds and normalizes negative zero") {
  CHECK(fmt_fixed(1.005, 2) == "1.00");  // 1.005 is stored just below 1.005
  CHECK(fmt_fixed(1.2349, 2) == "1.23");
  CHECK(fmt_fixed(-1.2351, 2) == "-1.24");
  CHECK(fmt_fixed(0.0, 2) == "0.00");
  CHECK(fmt_fixed(-0.0001, 2) == "0.00");
  CHECK(fmt_fixed(-0.004, 2) == "0.00");
  CHECK(fmt_fixed(72.0, 1) == "72.0");
}

TEST_CASE("strict numeric parsing") {
  CHECK(*parse_double("1.5") == 1.5);
  CHECK(*parse_double("-2e-3") == -0.002);
  CHECK(*parse_double("1e5") == 100000.0);
  CHECK_FALSE(parse_double("").has_value());
  CHECK_FALSE(parse_double("1.2x").has_value());
  CHECK_FALSE(parse_double("x1.2").has_value());
  CHECK_FALSE(parse_double("1.2 ").has_value());
  CHECK_FALSE(parse_double("1e").has_value());
  CHECK_FALSE(parse_double("--1").has_value());

  CHECK(*parse_int("42") == 42);
  CHECK(*parse_int("-7") == -7);
  CHECK_FALSE(parse_int("1.5").has_value());
  CHECK_FALSE(parse_int("").has_value());
  CHECK_FALSE(parse_int("9999999999999999999999").has_value());
}

TEST_CASE("atomic writes replace the target and leave no temp files") {
  const std::string path = temp_path("resilab_atomic_test.txt");
  atomic_write_file(path, "first");
  {
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    CHECK(content == "first");
  }
  atomic_write_file(path, "second version");
  {
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    CHECK(content == "second version");
  }
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove(path);

  CHECK_THROWS_AS(atomic_write_file("/no/such/dir/resilab_x.txt", "x"), Error);
}
