// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "lsth/engine/engine.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <set>

#include "engine_detail.hpp"
#include "json.hpp"
#include "lsth/csv.hpp"
#include "lsth/errors.hpp"

namespace lsth {
namespace engine {

namespace fs = std::filesystem;
using detail::TableCache;

namespace detail {

ColumnStats compute_stats(const TableSchema& schema, const std::vector<Row>& rows) {
  ColumnStats stats;
  if (rows.empty()) return stats;
  stats.min_max.reserve(schema.size());
  for (size_t c = 0; c < schema.size(); ++c) {
    Value mn = rows[0][c], mx = rows[0][c];
    for (const auto& r : rows) {
      if (compare(r[c], mn) < 0) mn = r[c];
      if (compare(r[c], mx) > 0) mx = r[c];
    }
    stats.min_max.emplace_back(std::move(mn), std::move(mx));
  }
  return stats;
}

namespace {

std::string rows_to_csv(const std::vector<Row>& rows) {
  std::string out;
  std::vector<std::string> fields;
  for (const auto& r : rows) {
    fields.clear();
    for (const auto& v : r) fields.push_back(v.to_text());
    out += csv::encode_record(fields);
  }
  return out;
}

std::vector<Row> csv_to_rows(std::string_view body, const TableSchema& schema) {
  std::vector<Row> rows;
  for (const auto& rec : csv::parse(body)) {
    if (rec.size() != schema.size()) throw FormatError("data file row arity mismatch");
    Row row;
    row.reserve(schema.size());
    for (size_t c = 0; c < schema.size(); ++c) row.push_back(Value::parse(schema[c].type, rec[c]));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string encode_data_file(const std::string& file_id, const TableSchema& schema,
                             const std::vector<Row>& rows) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : schema) cols.push_back(c.name);
  std::string out =
      nlohmann::json{{"file_id", file_id}, {"kind", "data"}, {"columns", cols}}.dump() + "\n";
  out += rows_to_csv(rows);
  return out;
}

std::string encode_delta_file(const std::string& file_id, const std::string& base_file_id,
                              const TableSchema& schema, const std::vector<Value>& deleted_keys,
                              const std::vector<Row>& upserts) {
  nlohmann::json keys = nlohmann::json::array();
  for (const auto& k : deleted_keys) keys.push_back(k.to_text());
  std::string out = nlohmann::json{{"file_id", file_id},
                                   {"kind", "delta"},
                                   {"base_file_id", base_file_id},
                                   {"deleted_keys", keys}}
                        .dump() +
                    "\n";
  out += rows_to_csv(upserts);
  (void)schema;
  return out;
}

std::vector<Row> decode_data_file(const std::string& content, const TableSchema& schema) {
  size_t nl = content.find('\n');
  if (nl == std::string::npos) throw FormatError("data file missing header");
  return csv_to_rows(std::string_view(content).substr(nl + 1), schema);
}

DecodedDelta decode_delta_file(const std::string& content, const TableDescriptor& desc) {
  size_t nl = content.find('\n');
  if (nl == std::string::npos) throw FormatError("delta file missing header");
  nlohmann::json hdr = nlohmann::json::parse(content.substr(0, nl), nullptr, false);
  if (hdr.is_discarded()) throw FormatError("delta file header malformed");
  DecodedDelta out;
  ColumnType key_type = desc.schema[desc.key_index()].type;
  for (const auto& k : hdr.at("deleted_keys")) {
    out.deleted_keys.push_back(Value::parse(key_type, k.get<std::string>()));
  }
  out.upserts = csv_to_rows(std::string_view(content).substr(nl + 1), desc.schema);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------

Engine::Impl::Impl(fs::path r, int budget) : root(std::move(r)), retry_budget(budget) {
  std::random_device rd;
  salt = (static_cast<uint64_t>(rd()) << 32) ^ (static_cast<uint64_t>(::getpid()) << 16) ^
         static_cast<uint64_t>(std::chrono::steady_clock::now().time_since_epoch().count());
}

TableCache& Engine::Impl::cache_slot(const std::string& table) {
  std::lock_guard lk(map_mu);
  return tables[table];
}

const TableDescriptor& Engine::Impl::load_descriptor(TableCache& t, const std::string& table,
                                                     IoContext& io) {
  if (!t.has_desc) {
    fs::path p = table_dir(table) / "table.json";
    std::error_code ec;
    if (!fs::exists(p, ec)) throw UnknownTable(table);
    t.desc = parse_descriptor(read_file(p, io));
    t.has_desc = true;
  }
  return t.desc;
}

TableDescriptor Engine::Impl::descriptor_copy(const std::string& table, IoContext& io) {
  TableCache& t = cache_slot(table);
  std::lock_guard lk(t.wmu);
  return load_descriptor(t, table, io);
}

void Engine::Impl::refresh_locked(TableCache& t, const std::string& table, IoContext& io) {
  const TableDescriptor& desc = load_descriptor(t, table, io);
  LogState ls = list_log(meta_dir(table), io);
  if (ls.commit_versions.empty()) throw UnknownTable(table);
  int64_t latest = ls.latest();
  if (t.state.version >= latest) return;
  if (t.state.version < 0) {
    t.log.clear();
    t.log_start = 0;
    t.base_state = VersionedState{};
    t.state = VersionedState{};
    if (desc.layout == Layout::kDeltaStyle && !ls.checkpoint_versions.empty()) {
      int64_t ckpt = ls.checkpoint_versions.back();
      t.base_state =
          parse_state(read_file(meta_dir(table) / checkpoint_file_name(ckpt), io), desc);
      t.log_start = ckpt + 1;
      t.state = t.base_state;
    }
  }
  for (int64_t v = t.state.version + 1; v <= latest; ++v) {
    CommitEntry e = read_commit(meta_dir(table), v, desc, io);
    t.state.apply(e);
    t.log.push_back(std::move(e));
  }
}

void Engine::Impl::ensure_full_log_locked(TableCache& t, const std::string& table, IoContext& io) {
  if (t.log_start == 0) return;
  std::vector<CommitEntry> head;
  head.reserve(t.log_start);
  for (int64_t v = 0; v < t.log_start; ++v) {
    head.push_back(read_commit(meta_dir(table), v, t.desc, io));
  }
  head.insert(head.end(), std::make_move_iterator(t.log.begin()),
              std::make_move_iterator(t.log.end()));
  t.log = std::move(head);
  t.log_start = 0;
  t.base_state = VersionedState{};
}

std::string Engine::Impl::new_file_id(char kind) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%06llx-%08llu", kind,
                static_cast<unsigned long long>(salt & 0xffffff),
                static_cast<unsigned long long>(file_seq.fetch_add(1)));
  return buf;
}

DataFile Engine::Impl::write_data_file(const std::string& table, const TableDescriptor& desc,
                                       const std::vector<Row>& rows, IoContext& io) {
  DataFile f;
  f.file_id = new_file_id('f');
  std::string content = detail::encode_data_file(f.file_id, desc.schema, rows);
  write_file(data_dir(table) / f.file_id, content, io);
  f.row_count = static_cast<int64_t>(rows.size());
  f.byte_size = static_cast<int64_t>(content.size());
  f.stats = detail::compute_stats(desc.schema, rows);
  return f;
}

DeltaFile Engine::Impl::write_delta_file(const std::string& table, const TableDescriptor& desc,
                                         const std::string& base_file_id,
                                         const std::vector<Value>& deleted_keys,
                                         const std::vector<Row>& upserts, IoContext& io) {
  DeltaFile d;
  d.file_id = new_file_id('d');
  d.base_file_id = base_file_id;
  std::string content =
      detail::encode_delta_file(d.file_id, base_file_id, desc.schema, deleted_keys, upserts);
  write_file(data_dir(table) / d.file_id, content, io);
  d.deleted_keys = deleted_keys;
  d.upsert_count = static_cast<int64_t>(upserts.size());
  d.byte_size = static_cast<int64_t>(content.size());
  d.upsert_stats = detail::compute_stats(desc.schema, upserts);
  return d;
}

std::vector<Row> Engine::Impl::read_base_rows(const std::string& table,
                                              const TableDescriptor& desc, const DataFile& f,
                                              IoContext& io) {
  fs::path p = data_dir(table) / f.file_id;
  std::string content;
  try {
    content = read_file(p, io);
  } catch (const IOFailure&) {
    throw VersionNotFound("data file " + f.file_id + " is gone (vacuumed)");
  }
  return detail::decode_data_file(content, desc.schema);
}

std::vector<Row> Engine::Impl::materialize_group(const std::string& table,
                                                 const TableDescriptor& desc, const DataFile& base,
                                                 const std::vector<DeltaFile>& deltas,
                                                 IoContext& io) {
  std::vector<Row> rows = read_base_rows(table, desc, base, io);
  int key_idx = desc.key_index();
  for (const auto& d : deltas) {
    std::string content;
    try {
      content = read_file(data_dir(table) / d.file_id, io);
    } catch (const IOFailure&) {
      throw VersionNotFound("delta file " + d.file_id + " is gone (vacuumed)");
    }
    detail::DecodedDelta dec = detail::decode_delta_file(content, desc);
    std::set<Value> kill(dec.deleted_keys.begin(), dec.deleted_keys.end());
    for (const auto& u : dec.upserts) kill.insert(u[key_idx]);
    std::erase_if(rows, [&](const Row& r) { return kill.count(r[key_idx]) > 0; });
    rows.insert(rows.end(), dec.upserts.begin(), dec.upserts.end());
  }
  return rows;
}

namespace {

bool entry_touches(const CommitEntry& e, const std::vector<std::string>& read_set) {
  auto in_set = [&](const std::string& id) {
    return std::find(read_set.begin(), read_set.end(), id) != read_set.end();
  };
  for (const auto& a : e.actions) {
    if (a.type == ActionType::kRemoveFile && in_set(a.file_id)) return true;
    if (a.type == ActionType::kAddDelta && in_set(a.delta->base_file_id)) return true;
  }
  return false;
}

}  // namespace

Engine::Impl::CommitOutcome Engine::Impl::run_commit(const std::string& table,
                                                     const Planner& planner, IoContext& io) {
  TableCache& t = cache_slot(table);
  std::lock_guard lk(t.wmu);
  const TableDescriptor& desc = load_descriptor(t, table, io);
  std::vector<std::string> prev_read_set;
  int64_t prev_base = -1;
  bool was_merge = false;
  for (int attempt = 0; attempt <= retry_budget; ++attempt) {
    refresh_locked(t, table, io);
    if (attempt > 0 && was_merge) {
      // A merge aborts when any commit that beat it touched its base files.
      for (const auto& e : t.log) {
        if (e.version > prev_base && entry_touches(e, prev_read_set)) {
          throw ConflictError("concurrent commit touched base files of this merge");
        }
      }
    }
    Plan plan = planner(t.state);
    CommitEntry entry;
    entry.version = t.state.version + 1;
    entry.parent_version = t.state.version;
    entry.kind = plan.kind;
    entry.actions = std::move(plan.actions);
    entry.vacuum_floor = std::max(t.state.vacuum_floor, plan.vacuum_floor);
    entry.vacuum_deleted = plan.vacuum_deleted;
    for (auto& a : entry.actions) {
      if (a.type == ActionType::kAddFile) a.file->created_by_version = entry.version;
      if (a.type == ActionType::kAddDelta) a.delta->created_by_version = entry.version;
    }
    bool won = publish_exclusive(meta_dir(table) / commit_file_name(entry.version),
                                 serialize_commit(entry, desc), io);
    if (won) {
      t.state.apply(entry);
      t.log.push_back(entry);
      if (desc.layout != Layout::kDeltaStyle) ensure_full_log_locked(t, table, io);
      layout_publish(table_dir(table), desc, t.log, t.state, io);
      for (const auto& id : entry.vacuum_deleted) {
        remove_file_quiet(data_dir(table) / id);
      }
      return {t.state, entry};
    }
    prev_read_set = std::move(plan.read_set);
    prev_base = entry.parent_version;
    was_merge = plan.kind == CommitKind::kMerge;
  }
  throw ConflictError("commit retry budget exhausted for table " + table);
}

Snapshot Engine::Impl::layout_snapshot(const std::string& table, const TableDescriptor& desc,
                                       std::optional<int64_t> asof, IoContext& io) {
  return layout_read_snapshot(table_dir(table), desc, asof, io);
}

// ---------------------------------------------------------------------------
// Public surface.

Engine::Engine(fs::path storage_root, int retry_budget)
    : impl_(std::make_unique<Impl>(std::move(storage_root), retry_budget)) {
  std::error_code ec;
  fs::create_directories(impl_->root, ec);
  if (ec || !fs::is_directory(impl_->root)) {
    throw TargetUnreachable("storage root not usable: " + impl_->root.string());
  }
}

Engine::~Engine() = default;

const fs::path& Engine::root() const { return impl_->root; }

void Engine::create_table(const TableDescriptor& desc, IoContext io) {
  desc.validate();
  fs::path dir = impl_->table_dir(desc.name);
  std::error_code ec;
  fs::create_directories(dir / "meta", ec);
  fs::create_directories(dir / "data", ec);
  if (ec) throw IOFailure("cannot create table directories under " + dir.string());

  CommitEntry entry;
  entry.version = 0;
  entry.parent_version = -1;
  entry.kind = CommitKind::kAppend;
  Action schema_action;
  schema_action.type = ActionType::kSchema;
  schema_action.table = desc;
  entry.actions.push_back(std::move(schema_action));
  // The creation commit decides the race between two creators; the loser
  // must not clobber table.json.
  if (!publish_exclusive(impl_->meta_dir(desc.name) / commit_file_name(0),
                         serialize_commit(entry, desc), io)) {
    throw ExecError("table already exists: " + desc.name);
  }
  write_file(dir / "table.json", serialize_descriptor(desc), io);
  TableCache& t = impl_->cache_slot(desc.name);
  std::lock_guard lk(t.wmu);
  t.desc = desc;
  t.has_desc = true;
  t.log_start = 0;
  t.log = {entry};
  t.state = VersionedState{};
  t.state.apply(entry);
  layout_publish(dir, desc, t.log, t.state, io);
}

bool Engine::table_exists(const std::string& table) const {
  std::error_code ec;
  return fs::exists(impl_->table_dir(table) / "table.json", ec);
}

std::vector<std::string> Engine::list_tables(IoContext io) const {
  std::vector<std::string> out;
  for (const auto& name : list_dir(impl_->root, io)) {
    if (table_exists(name)) out.push_back(name);
  }
  return out;
}

TableDescriptor Engine::descriptor(const std::string& table, IoContext io) {
  return impl_->descriptor_copy(table, io);
}

namespace {

void validate_rows(const TableDescriptor& desc, const std::vector<Row>& rows) {
  for (const auto& r : rows) {
    if (r.size() != desc.schema.size()) throw SchemaMismatch("row arity mismatch");
    for (size_t c = 0; c < r.size(); ++c) {
      if (r[c].type != desc.schema[c].type) {
        throw SchemaMismatch("column '" + desc.schema[c].name + "' expects " +
                             std::string(to_string(desc.schema[c].type)) + ", got " +
                             to_string(r[c].type));
      }
    }
  }
}

std::vector<std::vector<Row>> chunk_rows(const std::vector<Row>& rows, int64_t target) {
  std::vector<std::vector<Row>> chunks;
  for (size_t i = 0; i < rows.size(); i += static_cast<size_t>(target)) {
    size_t end = std::min(rows.size(), i + static_cast<size_t>(target));
    chunks.emplace_back(rows.begin() + static_cast<ptrdiff_t>(i),
                        rows.begin() + static_cast<ptrdiff_t>(end));
  }
  return chunks;
}

}  // namespace

Snapshot Engine::load_append(const std::string& table, const std::vector<Row>& rows, IoContext io) {
  TableDescriptor desc = impl_->descriptor_copy(table, io);
  validate_rows(desc, rows);
  // Data files are immutable: write them once and reuse across retries.
  std::vector<DataFile> files;
  for (const auto& chunk : chunk_rows(rows, desc.target_file_rows)) {
    files.push_back(impl_->write_data_file(table, desc, chunk, io));
  }
  auto planner = [&](const VersionedState&) {
    Impl::Plan plan;
    plan.kind = CommitKind::kAppend;
    for (const auto& f : files) {
      Action a;
      a.type = ActionType::kAddFile;
      a.file = f;
      plan.actions.push_back(std::move(a));
    }
    return plan;
  };
  return impl_->run_commit(table, planner, io).after.snapshot;
}

Snapshot Engine::merge(const std::string& table, const std::vector<Row>& upserts,
                       const std::vector<Value>& delete_keys, IoContext io) {
  TableDescriptor desc = impl_->descriptor_copy(table, io);
  validate_rows(desc, upserts);
  const int key_idx = desc.key_index();

  // Last write wins within the statement; a key both upserted and deleted is
  // deleted.
  std::map<Value, Row> upsert_by_key;
  for (const auto& r : upserts) upsert_by_key[r[key_idx]] = r;
  std::set<Value> deletes(delete_keys.begin(), delete_keys.end());
  for (const auto& k : deletes) upsert_by_key.erase(k);

  auto planner = [&](const VersionedState& base) {
    Impl::Plan plan;
    plan.kind = CommitKind::kMerge;

    auto stats_cover = [&](const ColumnStats& st, const Value& key) {
      if (st.empty()) return false;
      return compare(key, st.min_max[key_idx].first) >= 0 &&
             compare(key, st.min_max[key_idx].second) <= 0;
    };
    auto group_may_contain = [&](const DataFile& f, const std::vector<DeltaFile>* deltas,
                                 const Value& key) {
      if (stats_cover(f.stats, key)) return true;
      if (deltas) {
        for (const auto& d : *deltas) {
          if (stats_cover(d.upsert_stats, key)) return true;
        }
      }
      return false;
    };

    // Materialize candidate groups whose key-range stats cover any touched
    // key, then compute the exact affected set.
    std::map<std::string, std::vector<Row>> group_rows;
    std::map<std::string, std::set<Value>> group_keys;
    for (const auto& [id, f] : base.snapshot.live_files) {
      const std::vector<DeltaFile>* deltas = nullptr;
      if (auto it = base.snapshot.pending_deltas.find(id); it != base.snapshot.pending_deltas.end()) {
        deltas = &it->second;
      }
      bool candidate = false;
      for (const auto& [k, _] : upsert_by_key) {
        if (group_may_contain(f, deltas, k)) {
          candidate = true;
          break;
        }
      }
      if (!candidate) {
        for (const auto& k : deletes) {
          if (group_may_contain(f, deltas, k)) {
            candidate = true;
            break;
          }
        }
      }
      if (!candidate) continue;
      std::vector<Row> rows = impl_->materialize_group(
          table, desc, f, deltas ? *deltas : std::vector<DeltaFile>{}, io);
      std::set<Value> keys;
      for (const auto& r : rows) keys.insert(r[key_idx]);
      bool affected = false;
      for (const auto& [k, _] : upsert_by_key) {
        if (keys.count(k)) {
          affected = true;
          break;
        }
      }
      if (!affected) {
        for (const auto& k : deletes) {
          if (keys.count(k)) {
            affected = true;
            break;
          }
        }
      }
      if (!affected) continue;
      group_rows[id] = std::move(rows);
      group_keys[id] = std::move(keys);
    }

    // Route each upsert to the first group that currently holds its key.
    std::map<std::string, std::vector<Row>> assigned;
    std::vector<Row> unmatched;
    for (const auto& [k, row] : upsert_by_key) {
      bool placed = false;
      for (const auto& [id, keys] : group_keys) {
        if (keys.count(k)) {
          if (!placed) assigned[id].push_back(row);
          placed = true;  // later groups holding a duplicate key just drop it
        }
      }
      if (!placed) unmatched.push_back(row);
    }

    for (const auto& [id, rows] : group_rows) {
      plan.read_set.push_back(id);
      std::set<Value> kill(deletes.begin(), deletes.end());
      for (const auto& r : assigned[id]) kill.insert(r[key_idx]);
      if (desc.write_mode == WriteMode::kCow) {
        std::vector<Row> next;
        for (const auto& r : rows) {
          if (!kill.count(r[key_idx])) next.push_back(r);
        }
        const auto& add = assigned[id];
        next.insert(next.end(), add.begin(), add.end());
        Action rm;
        rm.type = ActionType::kRemoveFile;
        rm.file_id = id;
        plan.actions.push_back(std::move(rm));
        if (!next.empty()) {
          Action ad;
          ad.type = ActionType::kAddFile;
          ad.file = impl_->write_data_file(table, desc, next, io);
          plan.actions.push_back(std::move(ad));
        }
      } else {
        std::vector<Value> dead;
        for (const auto& k : deletes) {
          if (group_keys[id].count(k)) dead.push_back(k);
        }
        Action ad;
        ad.type = ActionType::kAddDelta;
        ad.delta = impl_->write_delta_file(table, desc, id, dead, assigned[id], io);
        plan.actions.push_back(std::move(ad));
      }
    }

    // New keys append as fresh files. Hudi-style tables avoid small files by
    // folding the new rows into the emptiest live group with room, paying
    // extra write work for stable file counts.
    std::vector<std::vector<Row>> chunks = chunk_rows(unmatched, desc.target_file_rows);
    for (auto& chunk : chunks) {
      if (desc.layout == Layout::kHudiStyle &&
          static_cast<int64_t>(chunk.size()) < desc.target_file_rows) {
        std::string host;
        int64_t host_rows = 0;
        for (const auto& [id, f] : base.snapshot.live_files) {
          if (group_rows.count(id)) continue;  // already rewritten or read by this merge
          int64_t rows_now = f.row_count;
          if (auto it = base.snapshot.pending_deltas.find(id);
              it != base.snapshot.pending_deltas.end()) {
            for (const auto& d : it->second) rows_now += d.upsert_count;
          }
          if (rows_now + static_cast<int64_t>(chunk.size()) > desc.target_file_rows) continue;
          if (host.empty() || rows_now < host_rows) {
            host = id;
            host_rows = rows_now;
          }
        }
        if (!host.empty()) {
          const DataFile& f = base.snapshot.live_files.at(host);
          const std::vector<DeltaFile>* deltas = nullptr;
          if (auto it = base.snapshot.pending_deltas.find(host);
              it != base.snapshot.pending_deltas.end()) {
            deltas = &it->second;
          }
          std::vector<Row> merged = impl_->materialize_group(
              table, desc, f, deltas ? *deltas : std::vector<DeltaFile>{}, io);
          merged.insert(merged.end(), chunk.begin(), chunk.end());
          plan.read_set.push_back(host);
          Action rm;
          rm.type = ActionType::kRemoveFile;
          rm.file_id = host;
          plan.actions.push_back(std::move(rm));
          Action ad;
          ad.type = ActionType::kAddFile;
          ad.file = impl_->write_data_file(table, desc, merged, io);
          plan.actions.push_back(std::move(ad));
          continue;
        }
      }
      Action ad;
      ad.type = ActionType::kAddFile;
      ad.file = impl_->write_data_file(table, desc, chunk, io);
      plan.actions.push_back(std::move(ad));
    }
    return plan;
  };
  return impl_->run_commit(table, planner, io).after.snapshot;
}

Snapshot Engine::optimize(const std::string& table, IoContext io) {
  TableDescriptor desc = impl_->descriptor_copy(table, io);
  auto planner = [&](const VersionedState& base) {
    Impl::Plan plan;
    plan.kind = CommitKind::kOptimize;
    // First-fit bin packing over groups in ascending file_id order; every
    // pending delta is folded into its base along the way.
    struct Bin {
      std::vector<Row> rows;
    };
    std::vector<Bin> bins;
    for (const auto& [id, f] : base.snapshot.live_files) {
      const std::vector<DeltaFile>* deltas = nullptr;
      if (auto it = base.snapshot.pending_deltas.find(id); it != base.snapshot.pending_deltas.end()) {
        deltas = &it->second;
      }
      std::vector<Row> rows = impl_->materialize_group(
          table, desc, f, deltas ? *deltas : std::vector<DeltaFile>{}, io);
      plan.read_set.push_back(id);
      Action rm;
      rm.type = ActionType::kRemoveFile;
      rm.file_id = id;
      plan.actions.push_back(std::move(rm));
      if (rows.empty()) continue;
      bool placed = false;
      for (auto& bin : bins) {
        if (static_cast<int64_t>(bin.rows.size() + rows.size()) <= desc.target_file_rows) {
          bin.rows.insert(bin.rows.end(), rows.begin(), rows.end());
          placed = true;
          break;
        }
      }
      if (!placed) bins.push_back({std::move(rows)});
    }
    for (const auto& bin : bins) {
      Action ad;
      ad.type = ActionType::kAddFile;
      ad.file = impl_->write_data_file(table, desc, bin.rows, io);
      plan.actions.push_back(std::move(ad));
    }
    return plan;
  };
  return impl_->run_commit(table, planner, io).after.snapshot;
}

Snapshot Engine::vacuum(const std::string& table, int64_t retain_versions, IoContext io) {
  if (retain_versions < 0) throw ConfigError("retain_versions must be >= 0");
  TableDescriptor desc = impl_->descriptor_copy(table, io);
  auto planner = [&](const VersionedState& base) {
    TableCache& t = impl_->cache_slot(table);  // wmu already held by run_commit
    impl_->ensure_full_log_locked(t, table, io);
    int64_t window_low = std::max(base.vacuum_floor, base.version - retain_versions);

    std::set<std::string> reachable;
    std::set<std::string> known;
    std::set<std::string> already_deleted;
    VersionedState replay;
    for (const auto& e : t.log) {
      for (const auto& a : e.actions) {
        if (a.type == ActionType::kAddFile) known.insert(a.file->file_id);
        if (a.type == ActionType::kAddDelta) known.insert(a.delta->file_id);
      }
      for (const auto& id : e.vacuum_deleted) already_deleted.insert(id);
      replay.apply(e);
      if (replay.version >= window_low) {
        for (const auto& [id, _] : replay.snapshot.live_files) reachable.insert(id);
        for (const auto& [_, ds] : replay.snapshot.pending_deltas) {
          for (const auto& d : ds) reachable.insert(d.file_id);
        }
      }
    }
    Impl::Plan plan;
    plan.kind = CommitKind::kVacuum;
    plan.vacuum_floor = window_low;
    for (const auto& id : known) {
      if (!reachable.count(id) && !already_deleted.count(id)) plan.vacuum_deleted.push_back(id);
    }
    return plan;
  };
  return impl_->run_commit(table, planner, io).after.snapshot;
}

Snapshot Engine::read_metadata(const std::string& table, std::optional<int64_t> asof,
                               IoContext io) {
  TableDescriptor desc = impl_->descriptor_copy(table, io);
  return impl_->layout_snapshot(table, desc, asof, io);
}

CommitEntry Engine::commit(const std::string& table, int64_t parent_version,
                           std::vector<Action> actions, CommitKind kind, IoContext io) {
  TableDescriptor desc = impl_->descriptor_copy(table, io);
  (void)desc;
  bool parent_checked = false;
  auto planner = [&](const VersionedState& base) {
    if (!parent_checked) {
      if (base.version != parent_version) {
        throw ConflictError("parent version " + std::to_string(parent_version) +
                            " is no longer current (latest " + std::to_string(base.version) + ")");
      }
      parent_checked = true;
    }
    Impl::Plan plan;
    plan.kind = kind;
    plan.actions = actions;
    if (kind == CommitKind::kMerge) {
      for (const auto& a : actions) {
        if (a.type == ActionType::kRemoveFile) plan.read_set.push_back(a.file_id);
        if (a.type == ActionType::kAddDelta) plan.read_set.push_back(a.delta->base_file_id);
      }
    }
    return plan;
  };
  return impl_->run_commit(table, planner, io).entry;
}

int64_t Engine::current_version(const std::string& table) {
  TableCache& t = impl_->cache_slot(table);
  std::lock_guard lk(t.wmu);
  IoContext uncounted;
  impl_->refresh_locked(t, table, uncounted);
  return t.state.version;
}

StorageCounters Engine::cumulative() const { return impl_->counters.snapshot(); }

AtomicCounters& Engine::counter_sink() { return impl_->counters; }

}  // namespace engine
}  // namespace lsth
