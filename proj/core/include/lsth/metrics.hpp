// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lsth/telemetry.hpp"

namespace lsth {

enum class Direction { kLowerBetter, kHigherBetter };

// Metric values M_0..M_n across iterations of one phase type, in occurrence
// order. The stability computation runs over these.
struct MetricSeries {
  PhaseType phase_type = PhaseType::kCustom;
  std::string metric_name;
  std::vector<double> values;
  Direction direction = Direction::kLowerBetter;
};

struct PhaseAggregate {
  std::string phase_id;
  PhaseType phase_type = PhaseType::kCustom;
  double statement_time_s = 0;  // sum of statement durations
  double phase_span_s = 0;      // wall envelope: max end - min start
  StorageCounters counters;
  int statements = 0;
  int statement_failures = 0;
  double throughput_stmts_per_s = 0;
};

// Per-phase aggregates in occurrence order (first-event monotonic time).
std::vector<PhaseAggregate> aggregate_phases(const std::vector<EventRecord>& events);
// Throws UnknownPhase when no event carries the id.
PhaseAggregate aggregate_phase(const std::vector<EventRecord>& events, const std::string& phase_id);

// Groups iterations of the same phase type in occurrence order and derives
// one series per (phase type, metric). Metrics: latency_s (statement time),
// files_opened, files_written, list_calls, bytes_read, bytes_written
// (lower-better) and throughput_stmts_per_s (higher-better).
std::vector<MetricSeries> series_by_phase_type(const std::vector<EventRecord>& events);

// Mean of successive relative deltas: (1/n) * sum_i (M_i - M_{i-1}) / M_{i-1},
// n = length - 1. Higher-better series are transformed to reciprocals first.
// Throws InsufficientData (length < 2) and DivisionByZero (a zero M_{i-1}
// after the direction transform).
double degradation_rate(const MetricSeries& series);

struct SdrCell {
  PhaseType phase_type = PhaseType::kCustom;
  std::string metric;
  int n = 0;                  // iterations - 1
  std::optional<double> sdr;  // absent when the series has a single sample
};
std::vector<SdrCell> sdr_table(const std::vector<MetricSeries>& series);

// Writes report.md, report.csv (columns: phase_type, metric, n, sdr) and
// plotdata/<phase_type>_<metric>.csv. Numbers carry 6 significant digits.
void emit_report(const std::vector<PhaseAggregate>& aggregates,
                 const std::vector<MetricSeries>& series, const std::vector<SdrCell>& sdr,
                 const std::filesystem::path& out_dir);

}  // namespace lsth
