// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include <algorithm>

#include "lsth/csv.hpp"
#include "lsth/engine/storage.hpp"
#include "lsth/errors.hpp"
#include "lsth/minisql/ast.hpp"
#include "lsth/minisql/exec.hpp"

namespace lsth {
namespace minisql {

using engine::Engine;
using engine::IoContext;
using engine::TableDescriptor;

namespace {

Value coerce(const Value& v, ColumnType want) {
  if (v.type == want) return v;
  if (want == ColumnType::kDecimal && v.type == ColumnType::kInt64) {
    return Value::decimal_cents(v.num * 100);
  }
  if (want == ColumnType::kDate && v.type == ColumnType::kString) {
    return Value::parse(ColumnType::kDate, v.str);
  }
  if (want == ColumnType::kString && v.type == ColumnType::kDate) {
    return Value::string(v.str);
  }
  throw ExecError(std::string("cannot use a ") + to_string(v.type) + " literal for a " +
                  to_string(want) + " column");
}

struct CsvSource {
  std::vector<int> column_of_schema;  // schema index -> csv column
  int op_column = -1;
  std::vector<std::vector<std::string>> records;  // without header
};

CsvSource load_csv_source(const std::string& path, const TableDescriptor& desc,
                          IoContext& io) {
  std::string content;
  try {
    content = engine::read_file(path, io);
  } catch (const IOFailure&) {
    throw ExecError("cannot open source file '" + path + "'");
  }
  auto records = csv::parse(content);
  if (records.empty()) throw ExecError("source file '" + path + "' has no header");
  CsvSource src;
  const auto& header = records.front();
  src.column_of_schema.assign(desc.schema.size(), -1);
  for (size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "op") {
      src.op_column = static_cast<int>(c);
      continue;
    }
    int idx = column_index(desc.schema, header[c]);
    if (idx < 0) throw SchemaMismatch("source column '" + header[c] + "' not in table schema");
    src.column_of_schema[static_cast<size_t>(idx)] = static_cast<int>(c);
  }
  for (size_t i = 0; i < desc.schema.size(); ++i) {
    if (src.column_of_schema[i] < 0) {
      throw SchemaMismatch("source file missing column '" + desc.schema[i].name + "'");
    }
  }
  src.records.assign(records.begin() + 1, records.end());
  return src;
}

Row row_from_record(const CsvSource& src, const TableDescriptor& desc,
                    const std::vector<std::string>& rec) {
  Row row;
  row.reserve(desc.schema.size());
  for (size_t i = 0; i < desc.schema.size(); ++i) {
    size_t c = static_cast<size_t>(src.column_of_schema[i]);
    if (c >= rec.size()) throw SchemaMismatch("short record in source file");
    row.push_back(Value::parse(desc.schema[i].type, rec[c]));
  }
  return row;
}

}  // namespace

ExecResult execute_statement(Engine& eng, const std::string& sql, IoContext io) {
  Statement stmt = parse_statement(sql);
  ExecResult out;

  if (auto* s = std::get_if<CreateTable>(&stmt)) {
    eng.create_table(s->desc, io);
    return out;
  }
  if (auto* s = std::get_if<CopyInto>(&stmt)) {
    TableDescriptor desc = eng.descriptor(s->table, io);
    CsvSource src = load_csv_source(s->source_path, desc, io);
    std::vector<Row> rows;
    rows.reserve(src.records.size());
    for (const auto& rec : src.records) rows.push_back(row_from_record(src, desc, rec));
    eng.load_append(s->table, rows, io);
    out.row_count = static_cast<int64_t>(rows.size());
    return out;
  }
  if (auto* s = std::get_if<MergeInto>(&stmt)) {
    TableDescriptor desc = eng.descriptor(s->table, io);
    CsvSource src = load_csv_source(s->source_path, desc, io);
    int key_idx = desc.key_index();
    std::vector<Row> upserts;
    std::vector<Value> deletes;
    for (const auto& rec : src.records) {
      bool is_delete = false;
      if (src.op_column >= 0 && static_cast<size_t>(src.op_column) < rec.size()) {
        const std::string& op = rec[static_cast<size_t>(src.op_column)];
        if (op == "D" || op == "d") is_delete = true;
        else if (!op.empty() && op != "U" && op != "u") {
          throw ExecError("unknown op '" + op + "' in source file");
        }
      }
      if (is_delete) {
        size_t c = static_cast<size_t>(src.column_of_schema[static_cast<size_t>(key_idx)]);
        if (c >= rec.size()) throw SchemaMismatch("short delete record in source file");
        deletes.push_back(Value::parse(desc.schema[static_cast<size_t>(key_idx)].type, rec[c]));
      } else {
        upserts.push_back(row_from_record(src, desc, rec));
      }
    }
    eng.merge(s->table, upserts, deletes, io);
    out.row_count = static_cast<int64_t>(upserts.size() + deletes.size());
    return out;
  }
  if (auto* s = std::get_if<DeleteFrom>(&stmt)) {
    TableDescriptor desc = eng.descriptor(s->table, io);
    if (s->key_column != desc.key_column) {
      throw ExecError("DELETE supports only the key column '" + desc.key_column + "'");
    }
    ColumnType key_type = desc.schema[desc.key_index()].type;
    std::vector<Value> keys;
    keys.reserve(s->keys.size());
    for (const auto& k : s->keys) keys.push_back(coerce(k, key_type));
    eng.merge(s->table, {}, keys, io);
    out.row_count = static_cast<int64_t>(keys.size());
    return out;
  }
  if (auto* s = std::get_if<Select>(&stmt)) {
    engine::ScanRequest req = s->request;
    if (req.predicate) {
      // Literals are typed by the lexer; coerce them to the column type once
      // the table schema is known.
      TableDescriptor left = eng.descriptor(s->table, io);
      const std::string& col = req.predicate->column;
      auto dot = col.find('.');
      std::string bare = dot == std::string::npos ? col : col.substr(dot + 1);
      int idx = column_index(left.schema, bare);
      ColumnType want = ColumnType::kString;
      bool resolved = false;
      if (idx >= 0) {
        want = left.schema[static_cast<size_t>(idx)].type;
        resolved = true;
      } else if (req.join) {
        TableDescriptor right = eng.descriptor(req.join->table, io);
        int ridx = column_index(right.schema, bare);
        if (ridx >= 0) {
          want = right.schema[static_cast<size_t>(ridx)].type;
          resolved = true;
        }
      }
      if (resolved) {
        req.predicate->lo = coerce(req.predicate->lo, want);
        if (req.predicate->op == engine::Predicate::Op::kBetween) {
          req.predicate->hi = coerce(req.predicate->hi, want);
        }
      }
    }
    engine::ScanResult r = eng.scan(s->table, req, io);
    out.row_count = r.row_count;
    out.scalar = r.scalar;
    out.rows = std::move(r.rows);
    return out;
  }
  if (auto* s = std::get_if<OptimizeTable>(&stmt)) {
    eng.optimize(s->table, io);
    return out;
  }
  if (auto* s = std::get_if<VacuumTable>(&stmt)) {
    eng.vacuum(s->table, s->retain_versions, io);
    return out;
  }
  throw ExecError("unhandled statement");
}

}  // namespace minisql
}  // namespace lsth
