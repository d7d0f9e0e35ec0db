// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lsth/engine/storage.hpp"
#include "lsth/engine/types.hpp"

namespace lsth {
namespace engine {

// On-disk layout of one table:
//   <root>/<table>/table.json                   descriptor
//   <root>/<table>/meta/%020d.commit            commit log (all layouts; the
//                                               create-if-absent commit file
//                                               is the only write-arbitration
//                                               primitive)
//   <root>/<table>/meta/%020d.checkpoint        delta-style
//   <root>/<table>/meta/v%d.metadata            iceberg-style, per version
//   <root>/<table>/meta/current.metadata        iceberg-style top-level file,
//                                               atomically replaced
//   <root>/<table>/meta/snap-%d.manifestlist    iceberg-style
//   <root>/<table>/meta/manifest-<v>-<k>.mf     iceberg-style
//   <root>/<table>/meta/%020d.timeline          hudi-style action files
//   <root>/<table>/meta/index.meta              hudi-style metadata index
//   <root>/<table>/data/<file_id>               data and delta files
// All metadata files are line-oriented JSON.

std::string commit_file_name(int64_t version);
std::string checkpoint_file_name(int64_t version);
std::string timeline_file_name(int64_t version);

std::string serialize_descriptor(const TableDescriptor&);
TableDescriptor parse_descriptor(const std::string& json_text);

std::string serialize_commit(const CommitEntry&, const TableDescriptor&);
CommitEntry parse_commit(const std::string& json_text, const TableDescriptor&);

// What the commit log says about a table right now.
struct LogState {
  std::vector<int64_t> commit_versions;      // sorted ascending
  std::vector<int64_t> checkpoint_versions;  // sorted ascending
  int64_t latest() const { return commit_versions.empty() ? -1 : commit_versions.back(); }
};
LogState list_log(const std::filesystem::path& meta_dir, IoContext& io);
CommitEntry read_commit(const std::filesystem::path& meta_dir, int64_t version,
                        const TableDescriptor& desc, IoContext& io);

// Replayable full state at one version (checkpoint payload, hudi index entry).
struct VersionedState {
  int64_t version = -1;
  int64_t vacuum_floor = 0;
  Snapshot snapshot;

  void apply(const CommitEntry& entry);
};
std::string serialize_state(const VersionedState&, const TableDescriptor&);
VersionedState parse_state(const std::string& json_text, const TableDescriptor&);

// Snapshot resolution through the layout's read path, with the layout's
// exact metadata-read accounting:
//   delta-style:   1 list + newest checkpoint <= target (if any) + every
//                  commit file after it up to the target
//   iceberg-style: current.metadata + the snapshot's manifest list + its
//                  manifest files (no list call)
//   hudi-style:    1 list of the timeline + index.meta
// Throws VersionNotFound for unknown or vacuumed versions. `floor_out`, when
// non-null, receives the vacuum floor observed on the read path.
Snapshot layout_read_snapshot(const std::filesystem::path& table_dir, const TableDescriptor&,
                              std::optional<int64_t> asof, IoContext& io,
                              int64_t* floor_out = nullptr);

// Publishes the layout's derived metadata for a freshly won commit. `log`
// must be the contiguous commit log; for iceberg- and hudi-style tables it
// has to start at version 0 (manifest evolution and the metadata index are
// pure functions of the log prefix), for delta-style a suffix is enough.
// `after` is the replayed state at log.back().version.
void layout_publish(const std::filesystem::path& table_dir, const TableDescriptor&,
                    const std::vector<CommitEntry>& log, const VersionedState& after,
                    IoContext& io);

}  // namespace engine
}  // namespace lsth
