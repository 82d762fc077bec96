#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "psychflow/errors.hpp"
#include "psychflow/util/csv.hpp"
#include "psychflow/util/io.hpp"
#include "psychflow/util/time.hpp"

using namespace psychflow;
namespace fs = std::filesystem;

TEST_CASE("csv parses plain and quoted cells") {
  auto t = util::parse_csv("a,b,c\n1,\"x,y\",3\n4,\"he said \"\"hi\"\"\",6\r\n", "<string>");
  REQUIRE(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "x,y");
  CHECK(t.rows[1][1] == "he said \"hi\"");
  CHECK(t.column("b") == 1);
  CHECK_THROWS_AS(t.column("missing"), ParseError);
}

TEST_CASE("csv rejects ragged rows with the offending line number") {
  try {
    util::parse_csv("a,b\n1,2\n3\n", "f.csv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("f.csv:3") != std::string::npos);
  }
}

TEST_CASE("csv typed accessors validate") {
  auto t = util::parse_csv("x,y,z\n1.5,7,true\n", "<string>");
  CHECK(util::cell_double(t, 0, 0) == doctest::Approx(1.5));
  CHECK(util::cell_int(t, 0, 1) == 7);
  CHECK(util::cell_bool01(t, 0, 2));
  CHECK_THROWS_AS(util::cell_int(t, 0, 0), ParseError);
  CHECK_THROWS_AS(util::cell_bool01(t, 0, 1), ParseError);
}

TEST_CASE("csv escaping round-trips") {
  CHECK(util::csv_escape("plain") == "plain");
  CHECK(util::csv_escape("a,b") == "\"a,b\"");
  CHECK(util::csv_escape("q\"q") == "\"q\"\"q\"");
  CHECK(util::csv_line({"a", "b,c"}) == "a,\"b,c\"");
}

TEST_CASE("civil day arithmetic matches known dates") {
  CHECK(util::days_from_civil(1970, 1, 1) == 0);
  CHECK(util::days_from_civil(1970, 1, 2) == 1);
  CHECK(util::days_from_civil(1969, 12, 31) == -1);
  CHECK(util::days_from_civil(2000, 1, 1) == 10957);
  CHECK(util::days_from_civil(2024, 2, 29) == 19782);
  // 1970-01-01 was a Thursday, 2000-01-01 a Saturday (Monday = 0).
  CHECK(util::weekday_of_serial(0) == 3);
  CHECK(util::weekday_of_serial(util::days_from_civil(2000, 1, 1)) == 5);
  CHECK(util::weekday_of_serial(util::days_from_civil(2026, 8, 10)) == 0);
}

TEST_CASE("civil date round-trips over a wide range") {
  for (std::int64_t serial = -1000; serial <= 40000; serial += 13) {
    auto c = util::civil_from_serial(serial);
    CHECK(util::days_from_civil(c.year, c.month, c.day) == serial);
  }
  CHECK(util::format_date(0) == "1970-01-01");
  CHECK(util::format_date(util::days_from_civil(2024, 2, 29)) == "2024-02-29");
  CHECK(util::parse_date_serial(util::format_date(19782)) == 19782);
}

TEST_CASE("timestamps parse with and without seconds") {
  auto ts = util::parse_timestamp("2023-05-04 13:30");
  CHECK(ts.day_serial == util::days_from_civil(2023, 5, 4));
  CHECK(ts.hour == doctest::Approx(13.5));
  CHECK(ts.weekday() == 3);  // a Thursday

  auto ts2 = util::parse_timestamp("2023-05-04T06:15:36");
  CHECK(ts2.hour == doctest::Approx(6.26));
  CHECK(ts2.hours_since_epoch() ==
        doctest::Approx(static_cast<double>(ts2.day_serial) * 24.0 + 6.26));

  CHECK_THROWS_AS(util::parse_timestamp("2023-13-04 13:30"), ParseError);
  CHECK_THROWS_AS(util::parse_timestamp("2023-05-04 25:00"), ParseError);
  CHECK_THROWS_AS(util::parse_timestamp("not a time"), ParseError);
  CHECK(util::parse_date_serial("2023-05-04") == ts.day_serial);
  CHECK_THROWS_AS(util::parse_date_serial("2023-5-4"), ParseError);
}

TEST_CASE("fnv1a matches published vectors") {
  CHECK(util::fnv1a("") == 14695981039346656037ull);
  CHECK(util::fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(util::fnv1a("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("atomic write leaves only the target file") {
  fs::path dir = fs::temp_directory_path() / "psychflow_io_test";
  fs::remove_all(dir);
  fs::path target = dir / "nested" / "out.txt";
  util::write_file_atomic(target.string(), "hello\n");
  CHECK(util::read_file(target.string()) == "hello\n");
  CHECK_FALSE(fs::exists(target.string() + ".tmp"));
  util::write_file_atomic(target.string(), "rewritten\n");
  CHECK(util::read_file(target.string()) == "rewritten\n");
  fs::remove_all(dir);
  CHECK_THROWS_AS(util::read_file((dir / "absent.txt").string()), IoError);
}
