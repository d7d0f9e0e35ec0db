// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include <set>

#include "doctest.h"
#include "lsth/csv.hpp"
#include "lsth/errors.hpp"
#include "lsth/rng.hpp"
#include "lsth/task_library.hpp"
#include "lsth/timeutil.hpp"
#include "lsth/value.hpp"

using namespace lsth;

TEST_CASE("counter-based generator is stateless and stable") {
  CHECK(mix64(7, 0) == mix64(7, 0));
  CHECK(mix64(7, 0) != mix64(7, 1));
  CHECK(mix64(7, 0) != mix64(8, 0));
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("deterministic shuffle is a permutation and seed-stable") {
  std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> w = v;
  deterministic_shuffle(v, 3);
  deterministic_shuffle(w, 3);
  CHECK(v == w);
  std::multiset<int> orig{1, 2, 3, 4, 5, 6, 7, 8};
  CHECK(std::multiset<int>(v.begin(), v.end()) == orig);
  std::vector<int> u{1, 2, 3, 4, 5, 6, 7, 8};
  deterministic_shuffle(u, 4);
  CHECK(u != v);
}

TEST_CASE("csv quoting round-trips awkward fields") {
  std::vector<std::string> fields{"plain", "with,comma", "with\"quote", "multi\nline", ""};
  std::string rec = csv::encode_record(fields);
  auto parsed = csv::parse(rec);
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0] == fields);
}

TEST_CASE("csv parses CRLF and empty trailing fields") {
  auto recs = csv::parse("a,b\r\nc,\r\n");
  REQUIRE(recs.size() == 2);
  CHECK(recs[1] == std::vector<std::string>{"c", ""});
}

TEST_CASE("decimal values are exact two-digit fixed point") {
  Value v = Value::parse(ColumnType::kDecimal, "123.45");
  CHECK(v.num == 12345);
  CHECK(v.to_text() == "123.45");
  CHECK(Value::parse(ColumnType::kDecimal, "7").num == 700);
  CHECK(Value::parse(ColumnType::kDecimal, "7.5").num == 750);
  CHECK(Value::parse(ColumnType::kDecimal, "-0.05").num == -5);
  CHECK(Value::parse(ColumnType::kDecimal, "-0.05").to_text() == "-0.05");
  CHECK_THROWS_AS(Value::parse(ColumnType::kDecimal, "1.234"), SchemaMismatch);
  CHECK_THROWS_AS(Value::parse(ColumnType::kInt64, "12x"), SchemaMismatch);
  CHECK_THROWS_AS(Value::parse(ColumnType::kDate, "2020-13"), SchemaMismatch);
}

TEST_CASE("value comparison across compatible types") {
  CHECK(compare(Value::int64(5), Value::decimal_cents(450)) > 0);
  CHECK(compare(Value::date("2020-01-02"), Value::string("2020-01-03")) < 0);
  CHECK_THROWS_AS(compare(Value::int64(1), Value::string("1")), SchemaMismatch);
}

TEST_CASE("rfc3339 round trip") {
  int64_t now = wall_now_ns();
  CHECK(parse_rfc3339_utc(rfc3339_utc(now)) == now);
  CHECK(rfc3339_utc(0) == "1970-01-01T00:00:00.000000000Z");
}

TEST_CASE("statement templates extract exactly the placeholders") {
  StatementTemplate tpl =
      StatementTemplate::from_text("SELECT count(*) FROM ${db}.fact WHERE k = ${key} -- ${db}");
  CHECK(tpl.variables == std::set<std::string>{"db", "key"});
  CHECK(StatementTemplate::from_text("no vars $ { } ${1bad}").variables.empty());
}

TEST_CASE("substitute replaces all placeholders or fails fast") {
  StatementTemplate tpl = StatementTemplate::from_text("SELECT count(*) FROM ${db}.fact");
  CHECK(substitute(tpl, {{"db", "main"}}) == "SELECT count(*) FROM main.fact");

  StatementTemplate asof = StatementTemplate::from_text("... AS OF VERSION ${asof_version}");
  CHECK(substitute(asof, {{"asof_version", "3"}}) == "... AS OF VERSION 3");

  StatementTemplate missing = StatementTemplate::from_text("x ${x} y");
  CHECK_THROWS_AS(substitute(missing, {}), MissingVariable);
  try {
    substitute(missing, {});
  } catch (const MissingVariable& e) {
    CHECK(e.variable == "x");
  }
}

TEST_CASE("substitute output never contains a live placeholder") {
  // Idempotence: substituting the output again is a no-op.
  StatementTemplate tpl = StatementTemplate::from_text("a ${x} b ${y}");
  std::string out = substitute(tpl, {{"x", "1"}, {"y", "2"}});
  CHECK(out.find("${") == std::string::npos);
  CHECK(substitute(StatementTemplate::from_text(out), {}) == out);
  // A binding value smuggling in a placeholder is rejected.
  CHECK_THROWS_AS(substitute(tpl, {{"x", "${y}"}, {"y", "2"}}), MissingVariable);
}

TEST_CASE("statement splitting respects quotes and strips comments") {
  auto stmts = split_statements("SELECT 1; -- trailing; comment\nCOPY INTO t FROM 'a;b';\n\n;");
  REQUIRE(stmts.size() == 2);
  CHECK(stmts[0] == "SELECT 1");
  CHECK(stmts[1] == "COPY INTO t FROM 'a;b'");
}
