// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lsth/errors.hpp"

namespace lsth {

enum class ColumnType { kInt64, kDecimal, kString, kDate };

const char* to_string(ColumnType t);
ColumnType column_type_from_string(const std::string& s);

// A typed cell. INT64 and DECIMAL live in `num` (decimals are scaled by 100,
// i.e. stored in cents); STRING and DATE live in `str` (dates as ISO
// YYYY-MM-DD, which compares correctly as a string).
struct Value {
  ColumnType type = ColumnType::kInt64;
  int64_t num = 0;
  std::string str;

  static Value int64(int64_t v) { return {ColumnType::kInt64, v, {}}; }
  static Value decimal_cents(int64_t cents) { return {ColumnType::kDecimal, cents, {}}; }
  static Value string(std::string s) { return {ColumnType::kString, 0, std::move(s)}; }
  static Value date(std::string iso) { return {ColumnType::kDate, 0, std::move(iso)}; }

  // Parses `text` as a value of type `t`. Throws SchemaMismatch on bad input.
  static Value parse(ColumnType t, const std::string& text);

  std::string to_text() const;

  friend bool operator==(const Value& a, const Value& b) {
    return a.type == b.type && a.num == b.num && a.str == b.str;
  }
  friend bool operator<(const Value& a, const Value& b);
};

int compare(const Value& a, const Value& b);  // throws SchemaMismatch on type clash

using Row = std::vector<Value>;

struct Column {
  std::string name;
  ColumnType type;
  friend bool operator==(const Column&, const Column&) = default;
};
using TableSchema = std::vector<Column>;

int column_index(const TableSchema& schema, const std::string& name);  // -1 if absent

}  // namespace lsth
