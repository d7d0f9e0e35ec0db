// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include "lsth/counters.hpp"
#include "lsth/workload.hpp"

namespace lsth {

// One timed telemetry row per executed statement. Serialized as one JSON
// object per line with a schema version field `v: 1`; `wall_start` is
// RFC-3339 UTC, durations are integer nanoseconds from the monotonic clock
// (mono_start_ns is the raw monotonic start, used for interval logic).
struct EventRecord {
  std::string experiment_id;
  std::string phase_id;
  PhaseType phase_type = PhaseType::kCustom;
  int session_idx = 0;
  std::string task_name;
  int task_idx = 0;  // ordinal of the task within its session
  int statement_idx = 0;
  enum class Status { kSuccess, kFailure, kSkipped } status = Status::kSuccess;
  int64_t wall_start_ns = 0;
  int64_t mono_start_ns = 0;
  int64_t duration_ns = 0;
  StorageCounters counters;
  std::string error_text;

  int64_t mono_end_ns() const { return mono_start_ns + duration_ns; }
};

const char* to_string(EventRecord::Status s);

// Periodic cumulative engine counters, one source per target.
struct CounterSample {
  std::string source;
  int64_t wall_time_ns = 0;
  StorageCounters counters;
};

// Accepts concurrent appends; implementations validate records (negative
// durations and counters are rejected with Error).
class TelemetrySink {
 public:
  virtual ~TelemetrySink() = default;
  virtual void append(const EventRecord&) = 0;
  virtual void sample(const CounterSample&) = 0;
};

// events.jsonl + counters.jsonl under one experiment output directory.
class JsonlTelemetry : public TelemetrySink {
 public:
  explicit JsonlTelemetry(std::filesystem::path dir);
  void append(const EventRecord&) override;
  void sample(const CounterSample&) override;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::ofstream events_;
  std::ofstream counters_;
  std::mutex mu_;
};

// In-memory sink for tests and the report pipeline.
class MemoryTelemetry : public TelemetrySink {
 public:
  void append(const EventRecord&) override;
  void sample(const CounterSample&) override;
  std::vector<EventRecord> events() const;
  std::vector<CounterSample> samples() const;

 private:
  mutable std::mutex mu_;
  std::vector<EventRecord> events_;
  std::vector<CounterSample> samples_;
};

struct LoadedTelemetry {
  std::vector<EventRecord> events;
  std::vector<CounterSample> samples;
  std::vector<std::string> diagnostics;  // lenient mode: one entry per bad line
};

// Strict mode (default) throws FormatError at the first malformed line;
// lenient mode reports bad lines with their line numbers and keeps going.
std::vector<EventRecord> load_events(const std::filesystem::path& events_file, bool strict = true,
                                     std::vector<std::string>* diagnostics = nullptr);
std::vector<CounterSample> load_counter_samples(const std::filesystem::path& counters_file,
                                                bool strict = true,
                                                std::vector<std::string>* diagnostics = nullptr);
LoadedTelemetry load_telemetry_dir(const std::filesystem::path& dir, bool strict = true);

}  // namespace lsth
