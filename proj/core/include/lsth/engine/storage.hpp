// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "lsth/counters.hpp"

namespace lsth {
namespace engine {

// Engine-wide cumulative counters; safe under concurrent sessions.
struct AtomicCounters {
  std::atomic<int64_t> files_opened{0};
  std::atomic<int64_t> files_written{0};
  std::atomic<int64_t> list_calls{0};
  std::atomic<int64_t> bytes_read{0};
  std::atomic<int64_t> bytes_written{0};

  void add(const StorageCounters& d) {
    files_opened.fetch_add(d.files_opened, std::memory_order_relaxed);
    files_written.fetch_add(d.files_written, std::memory_order_relaxed);
    list_calls.fetch_add(d.list_calls, std::memory_order_relaxed);
    bytes_read.fetch_add(d.bytes_read, std::memory_order_relaxed);
    bytes_written.fetch_add(d.bytes_written, std::memory_order_relaxed);
  }
  StorageCounters snapshot() const {
    StorageCounters c;
    c.files_opened = files_opened.load(std::memory_order_relaxed);
    c.files_written = files_written.load(std::memory_order_relaxed);
    c.list_calls = list_calls.load(std::memory_order_relaxed);
    c.bytes_read = bytes_read.load(std::memory_order_relaxed);
    c.bytes_written = bytes_written.load(std::memory_order_relaxed);
    return c;
  }
};

// Counted filesystem access. Every read/list/write of table files goes
// through one of these helpers so storage counters stay exhaustive. `stmt`
// charges the activity to the statement being executed; `global` is the
// engine-wide accumulator. Either may be null (catalog introspection runs
// uncounted so per-statement deltas add up to the engine total exactly).
struct IoContext {
  StorageCounters* stmt = nullptr;
  AtomicCounters* global = nullptr;

  void charge(const StorageCounters& d) {
    if (stmt) *stmt += d;
    if (global) global->add(d);
  }
};

std::string read_file(const std::filesystem::path& p, IoContext& io);

// Write via temp file + rename. Replaces an existing file atomically.
void write_file(const std::filesystem::path& p, const std::string& content, IoContext& io);

// Create-if-absent via temp file + hard link: the commit-log synchronization
// primitive. Returns false when the target already exists. The write attempt
// is counted either way (a losing put still costs a storage call).
bool publish_exclusive(const std::filesystem::path& p, const std::string& content, IoContext& io);

// Sorted file names (not paths) in a directory. Dotfiles and temp files are
// skipped. Missing directory -> empty list.
std::vector<std::string> list_dir(const std::filesystem::path& p, IoContext& io);

void remove_file_quiet(const std::filesystem::path& p);  // uncounted; ignores ENOENT

}  // namespace engine
}  // namespace lsth
