#include <string>
#include <vector>

#include "doctest.h"
#include "erctk/csv.hpp"
#include "helpers.hpp"

using erctk::csv::Table;

TEST_CASE("csv: basic parsing with header lookup") {
  Table t = erctk::csv::parse("a,b,c\n1,2,3\n4,5,6\n");
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0] == std::vector<std::string>{"1", "2", "3"});
  CHECK(t.column("b") == 1);
  CHECK_THROWS(t.column("zz"));
}

TEST_CASE("csv: quoting rules") {
  SUBCASE("comma inside quotes") {
    Table t = erctk::csv::parse("a,b\n\"x, y\",z\n");
    CHECK(t.rows[0][0] == "x, y");
    CHECK(t.rows[0][1] == "z");
  }
  SUBCASE("doubled quotes collapse") {
    Table t = erctk::csv::parse("a\n\"He said \"\"hi\"\".\"\n");
    CHECK(t.rows[0][0] == "He said \"hi\".");
  }
  SUBCASE("newline inside quotes") {
    Table t = erctk::csv::parse("a,b\n\"line1\nline2\",z\n");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][0] == "line1\nline2");
  }
  SUBCASE("empty fields") {
    Table t = erctk::csv::parse("a,b,c\n,,\n");
    CHECK(t.rows[0] == std::vector<std::string>{"", "", ""});
  }
  SUBCASE("quoted empty field") {
    Table t = erctk::csv::parse("a,b\n\"\",x\n");
    CHECK(t.rows[0][0] == "");
  }
  SUBCASE("trailing field after quoted") {
    Table t = erctk::csv::parse("a,b\n\"q\",last\n");
    CHECK(t.rows[0] == std::vector<std::string>{"q", "last"});
  }
}

TEST_CASE("csv: crlf and missing trailing newline are tolerated") {
  Table t = erctk::csv::parse("a,b\r\n1,2\r\n3,4");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0] == std::vector<std::string>{"1", "2"});
  CHECK(t.rows[1] == std::vector<std::string>{"3", "4"});
}

TEST_CASE("csv: ragged rows are an error") {
  CHECK_THROWS(erctk::csv::parse("a,b\n1\n"));
  CHECK_THROWS(erctk::csv::parse("a,b\n1,2,3\n"));
}

TEST_CASE("csv: unterminated quote is an error") {
  CHECK_THROWS(erctk::csv::parse("a\n\"oops\n"));
}

TEST_CASE("csv: tab delimiter is a plain split") {
  Table t = erctk::csv::parse("a\tb\n\"x\ty\n", '\t');
  // No quoting in TSV mode: the quote is literal data.
  CHECK(t.rows[0] == std::vector<std::string>{"\"x", "y"});
}

TEST_CASE("csv: read_file") {
  testutil::TempDir dir;
  std::string path = dir.file("t.csv");
  testutil::spit(path, "h1,h2\nv1,v2\n");
  Table t = erctk::csv::read_file(path);
  CHECK(t.rows[0][1] == "v2");
  CHECK_THROWS(erctk::csv::read_file(dir.file("absent.csv")));
}

TEST_CASE("csv: empty input and header-only input") {
  CHECK_THROWS(erctk::csv::parse(""));
  Table t = erctk::csv::parse("a,b\n");
  CHECK(t.rows.empty());
}
