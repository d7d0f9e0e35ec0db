// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lsth/engine/storage.hpp"
#include "lsth/engine/types.hpp"

namespace lsth {
namespace engine {

struct Predicate {
  enum class Op { kEq, kLt, kGt, kBetween };
  std::string column;  // may be qualified as "table.column"
  Op op = Op::kEq;
  Value lo;
  Value hi;  // kBetween only (inclusive bounds)
};

struct ScanRequest {
  std::optional<int64_t> asof;  // applies to the scanned (left) table
  std::optional<Predicate> predicate;
  struct Join {
    std::string table;
    std::string left_column;
    std::string right_column;
  };
  std::optional<Join> join;
  enum class Agg { kNone, kCount, kSum, kMin, kMax };
  Agg agg = Agg::kNone;
  std::string agg_column;  // kSum/kMin/kMax
  std::string group_by;    // empty = no grouping
};

struct ScanResult {
  std::vector<Row> rows;
  int64_t row_count = 0;
  std::optional<double> scalar;  // first cell of a single-aggregate result
  TableSchema output_schema;
};

// A miniature log-structured table engine. One Engine models one compute
// cluster: several Engine instances may share a storage root and observe
// each other's commits through the commit log. All operations are safe for
// concurrent use from multiple sessions.
//
// Writes serialize through atomic create-if-absent of commit files; on a
// lost race the operation re-reads the log, revalidates and retries up to
// `retry_budget` times. Merges whose base files were touched by an
// interleaved commit abort with ConflictError instead of retrying.
class Engine {
 public:
  static constexpr int kDefaultRetryBudget = 3;

  explicit Engine(std::filesystem::path storage_root, int retry_budget = kDefaultRetryBudget);
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const std::filesystem::path& root() const;

  void create_table(const TableDescriptor& desc, IoContext io);
  bool table_exists(const std::string& table) const;
  std::vector<std::string> list_tables(IoContext io) const;
  TableDescriptor descriptor(const std::string& table, IoContext io);

  // Packs rows into data files of at most target_file_rows and appends them
  // in one APPEND commit. Zero rows still advance the version.
  Snapshot load_append(const std::string& table, const std::vector<Row>& rows, IoContext io);

  // Key-based upserts and deletes in one MERGE commit. CoW rewrites every
  // base file containing an affected key; MoR attaches one delta file per
  // affected base. Upserts whose keys match no live file append as new data
  // files in both modes. A key listed in both sets is deleted.
  Snapshot merge(const std::string& table, const std::vector<Row>& upserts,
                 const std::vector<Value>& delete_keys, IoContext io);

  ScanResult scan(const std::string& table, const ScanRequest& req, IoContext io);

  // Merges pending deltas into their bases and bin-packs all live files
  // (first-fit, ascending file_id) into files of at most target_file_rows.
  Snapshot optimize(const std::string& table, IoContext io);

  // Physically deletes files unreachable from every snapshot in
  // [current - retain_versions, current] and records one VACUUM commit.
  Snapshot vacuum(const std::string& table, int64_t retain_versions, IoContext io);

  // Reconstructs a snapshot through the table's layout read path (this is
  // where the per-layout metadata accounting lives).
  Snapshot read_metadata(const std::string& table, std::optional<int64_t> asof, IoContext io);

  // Single prevalidated commit batch; exposed for tests and maintenance
  // tooling. Appends auto-rebase on lost races.
  CommitEntry commit(const std::string& table, int64_t parent_version, std::vector<Action> actions,
                     CommitKind kind, IoContext io);

  int64_t current_version(const std::string& table);  // uncounted freshness probe
  StorageCounters cumulative() const;
  AtomicCounters& counter_sink();

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace engine
}  // namespace lsth
