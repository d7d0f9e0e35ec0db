// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include <algorithm>
#include <map>
#include <set>

#include "engine_detail.hpp"
#include "lsth/errors.hpp"

namespace lsth {
namespace engine {

namespace {

// Which side of a (possibly joined) scan a column reference names.
struct ResolvedColumn {
  bool right = false;
  int index = -1;
};

ResolvedColumn resolve_column(const std::string& ref, const std::string& left_table,
                              const TableSchema& left, const std::string& right_table,
                              const TableSchema* right) {
  std::string qualifier, name = ref;
  if (auto dot = ref.find('.'); dot != std::string::npos) {
    qualifier = ref.substr(0, dot);
    name = ref.substr(dot + 1);
  }
  ResolvedColumn out;
  if (!qualifier.empty()) {
    if (qualifier == left_table) {
      out.index = column_index(left, name);
    } else if (right && qualifier == right_table) {
      out.right = true;
      out.index = column_index(*right, name);
    } else {
      throw ExecError("unknown table qualifier '" + qualifier + "'");
    }
    if (out.index < 0) throw ExecError("unknown column '" + ref + "'");
    return out;
  }
  int li = column_index(left, name);
  int ri = right ? column_index(*right, name) : -1;
  if (li >= 0 && ri >= 0) throw ExecError("ambiguous column '" + name + "'");
  if (li >= 0) return {false, li};
  if (ri >= 0) return {true, ri};
  throw ExecError("unknown column '" + ref + "'");
}

bool value_matches(const Value& v, const Predicate& p) {
  switch (p.op) {
    case Predicate::Op::kEq:
      return compare(v, p.lo) == 0;
    case Predicate::Op::kLt:
      return compare(v, p.lo) < 0;
    case Predicate::Op::kGt:
      return compare(v, p.lo) > 0;
    case Predicate::Op::kBetween:
      return compare(v, p.lo) >= 0 && compare(v, p.hi) <= 0;
  }
  return false;
}

// Can any value in [mn, mx] satisfy the predicate?
bool range_may_match(const Value& mn, const Value& mx, const Predicate& p) {
  switch (p.op) {
    case Predicate::Op::kEq:
      return compare(p.lo, mn) >= 0 && compare(p.lo, mx) <= 0;
    case Predicate::Op::kLt:
      return compare(mn, p.lo) < 0;
    case Predicate::Op::kGt:
      return compare(mx, p.lo) > 0;
    case Predicate::Op::kBetween:
      return compare(mx, p.lo) >= 0 && compare(mn, p.hi) <= 0;
  }
  return false;
}

// Group-level pruning: a group may hold matching rows if the base range or
// any pending delta's upsert range intersects the predicate.
bool group_may_match(const DataFile& f, const std::vector<DeltaFile>* deltas, int col,
                     const Predicate& p) {
  if (!f.stats.empty() && range_may_match(f.stats.min_max[col].first, f.stats.min_max[col].second, p)) {
    return true;
  }
  if (deltas) {
    for (const auto& d : *deltas) {
      if (!d.upsert_stats.empty() &&
          range_may_match(d.upsert_stats.min_max[col].first, d.upsert_stats.min_max[col].second,
                          p)) {
        return true;
      }
    }
  }
  return false;
}

struct Aggregator {
  explicit Aggregator(ScanRequest::Agg k) : kind(k) {}
  ScanRequest::Agg kind;
  ColumnType type = ColumnType::kInt64;
  int64_t count = 0;
  int64_t sum = 0;
  std::optional<Value> min_v, max_v;

  void feed(const Value* v) {
    ++count;
    if (!v) return;
    type = v->type;
    switch (kind) {
      case ScanRequest::Agg::kSum:
        if (v->type != ColumnType::kInt64 && v->type != ColumnType::kDecimal) {
          throw ExecError("sum() needs a numeric column");
        }
        sum += v->num;
        break;
      case ScanRequest::Agg::kMin:
        if (!min_v || compare(*v, *min_v) < 0) min_v = *v;
        break;
      case ScanRequest::Agg::kMax:
        if (!max_v || compare(*v, *max_v) > 0) max_v = *v;
        break;
      default:
        break;
    }
  }

  Value result() const {
    switch (kind) {
      case ScanRequest::Agg::kCount:
        return Value::int64(count);
      case ScanRequest::Agg::kSum:
        return type == ColumnType::kDecimal ? Value::decimal_cents(sum) : Value::int64(sum);
      case ScanRequest::Agg::kMin:
        return min_v.value_or(Value::int64(0));
      case ScanRequest::Agg::kMax:
        return max_v.value_or(Value::int64(0));
      default:
        return Value::int64(0);
    }
  }
};

std::optional<double> scalar_of(const Value& v) {
  switch (v.type) {
    case ColumnType::kInt64:
      return static_cast<double>(v.num);
    case ColumnType::kDecimal:
      return static_cast<double>(v.num) / 100.0;
    default:
      return std::nullopt;
  }
}

}  // namespace

ScanResult Engine::scan(const std::string& table, const ScanRequest& req, IoContext io) {
  Impl& impl = *impl_;
  TableDescriptor left_desc = impl.descriptor_copy(table, io);
  Snapshot snap = impl.layout_snapshot(table, left_desc, req.asof, io);

  std::optional<TableDescriptor> right_desc;
  Snapshot right_snap;
  if (req.join) {
    right_desc = impl.descriptor_copy(req.join->table, io);
    right_snap = impl.layout_snapshot(req.join->table, *right_desc, std::nullopt, io);
  }
  const TableSchema* right_schema = right_desc ? &right_desc->schema : nullptr;

  std::optional<ResolvedColumn> pred_col;
  if (req.predicate) {
    pred_col = resolve_column(req.predicate->column, table, left_desc.schema,
                              req.join ? req.join->table : "", right_schema);
  }

  auto gather = [&](const std::string& tbl, const TableDescriptor& desc, const Snapshot& s,
                    bool apply_pred, int col_idx) {
    std::vector<Row> out;
    for (const auto& [id, f] : s.live_files) {
      const std::vector<DeltaFile>* deltas = nullptr;
      if (auto it = s.pending_deltas.find(id); it != s.pending_deltas.end()) deltas = &it->second;
      if (apply_pred && !group_may_match(f, deltas, col_idx, *req.predicate)) continue;
      std::vector<Row> rows = impl.materialize_group(
          tbl, desc, f, deltas ? *deltas : std::vector<DeltaFile>{}, io);
      for (auto& r : rows) {
        if (apply_pred && !value_matches(r[col_idx], *req.predicate)) continue;
        out.push_back(std::move(r));
      }
    }
    return out;
  };

  bool pred_on_left = req.predicate && !pred_col->right;
  bool pred_on_right = req.predicate && pred_col->right;
  std::vector<Row> rows = gather(table, left_desc, snap, pred_on_left,
                                 pred_on_left ? pred_col->index : 0);

  TableSchema output_schema = left_desc.schema;
  if (req.join) {
    std::vector<Row> right_rows = gather(req.join->table, *right_desc, right_snap, pred_on_right,
                                         pred_on_right ? pred_col->index : 0);
    ResolvedColumn lcol = resolve_column(req.join->left_column, table, left_desc.schema,
                                         req.join->table, right_schema);
    ResolvedColumn rcol = resolve_column(req.join->right_column, table, left_desc.schema,
                                         req.join->table, right_schema);
    if (lcol.right == rcol.right) throw ExecError("join condition must reference both tables");
    if (lcol.right) std::swap(lcol, rcol);
    std::multimap<Value, const Row*> by_key;
    for (const auto& r : right_rows) by_key.insert({r[rcol.index], &r});
    std::vector<Row> joined;
    for (const auto& l : rows) {
      auto [lo, hi] = by_key.equal_range(l[lcol.index]);
      for (auto it = lo; it != hi; ++it) {
        Row j = l;
        j.insert(j.end(), it->second->begin(), it->second->end());
        joined.push_back(std::move(j));
      }
    }
    rows = std::move(joined);
    for (const auto& c : right_desc->schema) output_schema.push_back(c);
  }

  ScanResult result;
  if (req.agg == ScanRequest::Agg::kNone) {
    result.rows = std::move(rows);
    result.row_count = static_cast<int64_t>(result.rows.size());
    result.output_schema = std::move(output_schema);
    return result;
  }

  int agg_idx = -1;
  bool agg_right = false;
  if (req.agg != ScanRequest::Agg::kCount) {
    ResolvedColumn rc = resolve_column(req.agg_column, table, left_desc.schema,
                                       req.join ? req.join->table : "", right_schema);
    agg_right = rc.right;
    agg_idx = rc.index;
    if (agg_right) agg_idx += static_cast<int>(left_desc.schema.size());
  }
  (void)agg_right;

  if (req.group_by.empty()) {
    Aggregator agg(req.agg);
    for (const auto& r : rows) agg.feed(agg_idx >= 0 ? &r[agg_idx] : nullptr);
    Value v = agg.result();
    result.scalar = scalar_of(v);
    result.rows.push_back({v});
    result.row_count = 1;
    result.output_schema = {{"agg", v.type}};
    return result;
  }

  ResolvedColumn gc = resolve_column(req.group_by, table, left_desc.schema,
                                     req.join ? req.join->table : "", right_schema);
  int group_idx = gc.index + (gc.right ? static_cast<int>(left_desc.schema.size()) : 0);
  std::map<Value, Aggregator> groups;
  for (const auto& r : rows) {
    auto [it, inserted] = groups.try_emplace(r[group_idx], Aggregator(req.agg));
    it->second.feed(agg_idx >= 0 ? &r[agg_idx] : nullptr);
  }
  for (const auto& [key, agg] : groups) {
    result.rows.push_back({key, agg.result()});
  }
  result.row_count = static_cast<int64_t>(result.rows.size());
  Value sample = result.rows.empty() ? Value::int64(0) : result.rows.front()[1];
  result.output_schema = {{"group", result.rows.empty() ? ColumnType::kInt64
                                                        : result.rows.front()[0].type},
                          {"agg", sample.type}};
  return result;
}

}  // namespace engine
}  // namespace lsth
