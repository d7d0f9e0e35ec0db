// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lsth/value.hpp"

namespace lsth {
namespace engine {

enum class Layout { kDeltaStyle, kIcebergStyle, kHudiStyle };
enum class WriteMode { kCow, kMor };

const char* to_string(Layout l);
const char* to_string(WriteMode m);
Layout layout_from_string(const std::string& s);
WriteMode write_mode_from_string(const std::string& s);

struct TableDescriptor {
  std::string name;
  TableSchema schema;
  Layout layout = Layout::kDeltaStyle;
  WriteMode write_mode = WriteMode::kCow;
  std::string key_column;
  int64_t target_file_rows = 1000;
  int64_t checkpoint_interval = 10;  // delta-style log checkpoint cadence

  int key_index() const { return column_index(schema, key_column); }
  void validate() const;  // throws SchemaMismatch / ConfigError
  friend bool operator==(const TableDescriptor&, const TableDescriptor&) = default;
};

// Inclusive per-column [min, max]; absent for files with zero rows.
struct ColumnStats {
  std::vector<std::pair<Value, Value>> min_max;  // indexed like the schema
  bool empty() const { return min_max.empty(); }
};

struct DataFile {
  std::string file_id;  // also the physical file name under <table>/data/
  int64_t row_count = 0;
  int64_t byte_size = 0;
  int64_t created_by_version = 0;
  ColumnStats stats;
};

// Key-based change set against one base data file. Immutable once written.
struct DeltaFile {
  std::string file_id;
  std::string base_file_id;
  std::vector<Value> deleted_keys;
  int64_t upsert_count = 0;
  int64_t byte_size = 0;
  int64_t created_by_version = 0;
  ColumnStats upsert_stats;  // stats over the upserted rows only
};

enum class ActionType { kAddFile, kRemoveFile, kAddDelta, kSchema };
enum class CommitKind { kAppend, kMerge, kOptimize, kVacuum };

const char* to_string(ActionType t);
const char* to_string(CommitKind k);

struct Action {
  ActionType type;
  std::optional<DataFile> file;          // kAddFile
  std::string file_id;                   // kRemoveFile
  std::optional<DeltaFile> delta;        // kAddDelta
  std::optional<TableDescriptor> table;  // kSchema
};

struct CommitEntry {
  int64_t version = 0;
  int64_t parent_version = -1;
  CommitKind kind = CommitKind::kAppend;
  std::vector<Action> actions;
  // Lowest version still queryable; raised by vacuum and carried forward by
  // every later commit so a single commit read reveals the current floor.
  int64_t vacuum_floor = 0;
  std::vector<std::string> vacuum_deleted;  // physical files removed by a vacuum
};

// One immutable table version: the live base files and, in MoR mode, the
// pending delta files keyed by their base file.
struct Snapshot {
  int64_t version = 0;
  std::map<std::string, DataFile> live_files;
  std::map<std::string, std::vector<DeltaFile>> pending_deltas;

  int64_t pending_delta_count() const {
    int64_t n = 0;
    for (const auto& [_, v] : pending_deltas) n += static_cast<int64_t>(v.size());
    return n;
  }
  void apply(const Action& a);  // replay one commit action
};

}  // namespace engine
}  // namespace lsth
