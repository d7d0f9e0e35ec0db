// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "lsth/value.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace lsth {

const char* to_string(ColumnType t) {
  switch (t) {
    case ColumnType::kInt64:
      return "INT64";
    case ColumnType::kDecimal:
      return "DECIMAL";
    case ColumnType::kString:
      return "STRING";
    case ColumnType::kDate:
      return "DATE";
  }
  return "?";
}

ColumnType column_type_from_string(const std::string& s) {
  if (s == "INT64") return ColumnType::kInt64;
  if (s == "DECIMAL") return ColumnType::kDecimal;
  if (s == "STRING") return ColumnType::kString;
  if (s == "DATE") return ColumnType::kDate;
  throw SchemaMismatch("unknown column type: " + s);
}

namespace {

int64_t parse_int(const std::string& text) {
  int64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw SchemaMismatch("not an integer: '" + text + "'");
  }
  return v;
}

// Decimal text -> cents. Accepts [-]digits[.d[d]].
int64_t parse_decimal_cents(const std::string& text) {
  if (text.empty()) throw SchemaMismatch("empty decimal");
  size_t i = 0;
  bool neg = false;
  if (text[i] == '-') {
    neg = true;
    ++i;
  }
  int64_t whole = 0;
  size_t digits = 0;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i, ++digits) {
    whole = whole * 10 + (text[i] - '0');
  }
  if (digits == 0) throw SchemaMismatch("not a decimal: '" + text + "'");
  int64_t cents = whole * 100;
  if (i < text.size()) {
    if (text[i] != '.') throw SchemaMismatch("not a decimal: '" + text + "'");
    ++i;
    int64_t frac = 0;
    int scale = 0;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])) && scale < 2;
         ++i, ++scale) {
      frac = frac * 10 + (text[i] - '0');
    }
    if (i != text.size()) throw SchemaMismatch("decimal beyond 2 fraction digits: '" + text + "'");
    if (scale == 1) frac *= 10;
    cents += frac;
  }
  return neg ? -cents : cents;
}

bool looks_like_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

Value Value::parse(ColumnType t, const std::string& text) {
  switch (t) {
    case ColumnType::kInt64:
      return Value::int64(parse_int(text));
    case ColumnType::kDecimal:
      return Value::decimal_cents(parse_decimal_cents(text));
    case ColumnType::kString:
      return Value::string(text);
    case ColumnType::kDate:
      if (!looks_like_date(text)) throw SchemaMismatch("not an ISO date: '" + text + "'");
      return Value::date(text);
  }
  throw SchemaMismatch("unhandled column type");
}

std::string Value::to_text() const {
  switch (type) {
    case ColumnType::kInt64:
      return std::to_string(num);
    case ColumnType::kDecimal: {
      int64_t cents = num;
      bool neg = cents < 0;
      if (neg) cents = -cents;
      std::string s = std::to_string(cents / 100) + ".";
      int64_t frac = cents % 100;
      s += static_cast<char>('0' + frac / 10);
      s += static_cast<char>('0' + frac % 10);
      return neg ? "-" + s : s;
    }
    case ColumnType::kString:
    case ColumnType::kDate:
      return str;
  }
  return {};
}

int compare(const Value& a, const Value& b) {
  if (a.type != b.type) {
    // INT64/DECIMAL compare numerically, STRING/DATE textually (ISO dates
    // order correctly as text); anything else is a type clash.
    bool numeric_a = a.type == ColumnType::kInt64 || a.type == ColumnType::kDecimal;
    bool numeric_b = b.type == ColumnType::kInt64 || b.type == ColumnType::kDecimal;
    if (numeric_a && numeric_b) {
      int64_t ac = a.type == ColumnType::kDecimal ? a.num : a.num * 100;
      int64_t bc = b.type == ColumnType::kDecimal ? b.num : b.num * 100;
      return ac < bc ? -1 : ac > bc ? 1 : 0;
    }
    bool text_a = a.type == ColumnType::kString || a.type == ColumnType::kDate;
    bool text_b = b.type == ColumnType::kString || b.type == ColumnType::kDate;
    if (text_a && text_b) return a.str < b.str ? -1 : a.str > b.str ? 1 : 0;
    throw SchemaMismatch(std::string("cannot compare ") + to_string(a.type) + " with " +
                         to_string(b.type));
  }
  switch (a.type) {
    case ColumnType::kInt64:
    case ColumnType::kDecimal:
      return a.num < b.num ? -1 : a.num > b.num ? 1 : 0;
    case ColumnType::kString:
    case ColumnType::kDate:
      return a.str < b.str ? -1 : a.str > b.str ? 1 : 0;
  }
  return 0;
}

bool operator<(const Value& a, const Value& b) {
  if (a.type != b.type) return static_cast<int>(a.type) < static_cast<int>(b.type);
  return compare(a, b) < 0;
}

int column_index(const TableSchema& schema, const std::string& name) {
  for (size_t i = 0; i < schema.size(); ++i) {
    if (schema[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace lsth
