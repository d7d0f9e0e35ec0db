// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lsth/counters.hpp"

namespace lsth {

enum class TargetKind { kMiniLst, kDryRun };

TargetKind target_kind_from_string(const std::string& s);
const char* to_string(TargetKind k);

struct ConnectionSpec {
  TargetKind kind = TargetKind::kMiniLst;
  std::string storage_root;  // required for kMiniLst; script output dir for kDryRun
  std::map<std::string, std::string> options;
};

struct StatementResult {
  int64_t row_count = 0;
  std::optional<double> scalar;  // first cell when the result is a single aggregate
  StorageCounters engine_counters_delta;
};

// Read-only introspection used by custom-task generators and the executor's
// version registry. Targets without engine access report supported()==false.
class CatalogView {
 public:
  virtual ~CatalogView() = default;
  virtual bool supported() const = 0;
  virtual std::vector<std::string> tables() = 0;
  virtual int64_t row_count(const std::string& table) = 0;
  virtual int64_t current_version(const std::string& table) = 0;
};

// One session on a target. Not safe for concurrent use; distinct sessions
// are, including against the same storage root.
class Connection {
 public:
  virtual ~Connection() = default;
  virtual StatementResult execute(const std::string& sql) = 0;
  virtual void close() = 0;
};

// One target models one compute cluster: sessions opened from the same
// Target share an engine instance, and Targets pointed at the same
// storage_root observe each other's tables through shared storage.
class Target {
 public:
  virtual ~Target() = default;
  virtual std::unique_ptr<Connection> open_session() = 0;
  virtual CatalogView* catalog() = 0;  // never null; may be unsupported
  virtual StorageCounters cumulative() const = 0;

  // Throws TargetUnreachable when the storage root is missing or unusable.
  static std::shared_ptr<Target> connect(const ConnectionSpec&);
};

// Convenience for single-session use: a dedicated target plus one session.
std::unique_ptr<Connection> open_connection(const ConnectionSpec&);

}  // namespace lsth
