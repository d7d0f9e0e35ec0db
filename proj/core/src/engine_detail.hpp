// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lsth/engine/engine.hpp"
#include "lsth/engine/layout.hpp"
#include "lsth/engine/storage.hpp"
#include "lsth/engine/types.hpp"

namespace lsth {
namespace engine {
namespace detail {

// Per-table cache: descriptor, a contiguous commit-log window and the
// replayed state at its end. The log window starts at 0 except for
// delta-style tables warmed from a checkpoint.
struct TableCache {
  std::mutex wmu;  // serializes refresh/commit on this table within one engine
  TableDescriptor desc;
  bool has_desc = false;
  int64_t log_start = 0;
  std::vector<CommitEntry> log;
  VersionedState base_state;  // state at log_start - 1 (version -1 when log_start == 0)
  VersionedState state;       // replayed state at the latest known version
};

ColumnStats compute_stats(const TableSchema& schema, const std::vector<Row>& rows);

// Physical data/delta file contents: one JSON header line, then CSV rows.
std::string encode_data_file(const std::string& file_id, const TableSchema& schema,
                             const std::vector<Row>& rows);
std::string encode_delta_file(const std::string& file_id, const std::string& base_file_id,
                              const TableSchema& schema, const std::vector<Value>& deleted_keys,
                              const std::vector<Row>& upserts);
std::vector<Row> decode_data_file(const std::string& content, const TableSchema& schema);
struct DecodedDelta {
  std::vector<Value> deleted_keys;
  std::vector<Row> upserts;
};
DecodedDelta decode_delta_file(const std::string& content, const TableDescriptor& desc);

}  // namespace detail

struct Engine::Impl {
  std::filesystem::path root;
  int retry_budget;
  uint64_t salt;
  std::atomic<uint64_t> file_seq{0};
  AtomicCounters counters;
  mutable std::mutex map_mu;
  std::map<std::string, detail::TableCache> tables;

  Impl(std::filesystem::path r, int budget);

  std::filesystem::path table_dir(const std::string& table) const { return root / table; }
  std::filesystem::path meta_dir(const std::string& table) const { return root / table / "meta"; }
  std::filesystem::path data_dir(const std::string& table) const { return root / table / "data"; }

  detail::TableCache& cache_slot(const std::string& table);
  const TableDescriptor& load_descriptor(detail::TableCache& t, const std::string& table,
                                         IoContext& io);
  TableDescriptor descriptor_copy(const std::string& table, IoContext& io);

  // Brings the cache to the newest committed version; wmu must be held.
  void refresh_locked(detail::TableCache& t, const std::string& table, IoContext& io);
  void ensure_full_log_locked(detail::TableCache& t, const std::string& table, IoContext& io);

  std::string new_file_id(char kind);

  // Writes rows as one data file and returns its metadata (created_by_version
  // is filled in by the committer).
  DataFile write_data_file(const std::string& table, const TableDescriptor& desc,
                           const std::vector<Row>& rows, IoContext& io);
  DeltaFile write_delta_file(const std::string& table, const TableDescriptor& desc,
                             const std::string& base_file_id,
                             const std::vector<Value>& deleted_keys, const std::vector<Row>& upserts,
                             IoContext& io);

  std::vector<Row> read_base_rows(const std::string& table, const TableDescriptor& desc,
                                  const DataFile& f, IoContext& io);
  // Base rows with pending deltas folded in, oldest delta first.
  std::vector<Row> materialize_group(const std::string& table, const TableDescriptor& desc,
                                     const DataFile& base, const std::vector<DeltaFile>& deltas,
                                     IoContext& io);

  struct Plan {
    CommitKind kind = CommitKind::kAppend;
    std::vector<Action> actions;
    std::vector<std::string> read_set;  // base files a MERGE depends on
    int64_t vacuum_floor = -1;          // <0: inherit parent floor
    std::vector<std::string> vacuum_deleted;
  };
  using Planner = std::function<Plan(const VersionedState& base)>;

  struct CommitOutcome {
    VersionedState after;
    CommitEntry entry;
  };

  // The optimistic-commit loop: plan against the freshest state, publish the
  // commit file with create-if-absent, and on a lost race revalidate and
  // retry (merges abort with ConflictError when an interleaved commit
  // touched their read set). Returns the state after the winning commit.
  CommitOutcome run_commit(const std::string& table, const Planner& planner, IoContext& io);

  Snapshot layout_snapshot(const std::string& table, const TableDescriptor& desc,
                           std::optional<int64_t> asof, IoContext& io);
};

}  // namespace engine
}  // namespace lsth
