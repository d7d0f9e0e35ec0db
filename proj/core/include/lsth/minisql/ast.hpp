// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lsth/engine/engine.hpp"
#include "lsth/engine/types.hpp"

namespace lsth {
namespace minisql {

// Statement dialect:
//   CREATE TABLE t (col TYPE, ...) USING {delta|iceberg|hudi}
//       MODE {cow|mor} KEY col TARGET n
//   COPY INTO t FROM 'path'
//   MERGE INTO t USING 'path'
//   DELETE FROM t WHERE key IN (v, ...)
//   SELECT {* | count(*) | sum(c) | min(c) | max(c)} FROM t
//       [JOIN t2 ON a = b] [WHERE c {=,<,>} v | c BETWEEN a AND b]
//       [GROUP BY c] [AS OF VERSION v]
//   OPTIMIZE t
//   VACUUM t RETAIN n VERSIONS
// One level of join, no subqueries. Keywords are case-insensitive, '--'
// starts a line comment.

struct CreateTable {
  engine::TableDescriptor desc;
};

struct CopyInto {
  std::string table;
  std::string source_path;
};

struct MergeInto {
  std::string table;
  std::string source_path;
};

struct DeleteFrom {
  std::string table;
  std::string key_column;
  std::vector<Value> keys;
};

struct Select {
  std::string table;
  engine::ScanRequest request;
};

struct OptimizeTable {
  std::string table;
};

struct VacuumTable {
  std::string table;
  int64_t retain_versions = 0;
};

using Statement =
    std::variant<CreateTable, CopyInto, MergeInto, DeleteFrom, Select, OptimizeTable, VacuumTable>;

// Parses exactly one statement. Trailing ';' allowed. Throws ParseError.
Statement parse_statement(const std::string& sql);

}  // namespace minisql
}  // namespace lsth
