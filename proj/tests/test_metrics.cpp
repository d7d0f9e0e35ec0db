// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "lsth/errors.hpp"
#include "lsth/metrics.hpp"
#include "lsth/rng.hpp"

using namespace lsth;
namespace fs = std::filesystem;

namespace {

MetricSeries series_of(std::vector<double> values,
                       Direction dir = Direction::kLowerBetter) {
  MetricSeries s;
  s.phase_type = PhaseType::kSingleUser;
  s.metric_name = "latency_s";
  s.values = std::move(values);
  s.direction = dir;
  return s;
}

EventRecord event_of(const std::string& phase, PhaseType type, int session, int64_t start_ns,
                     int64_t duration_ns, EventRecord::Status status) {
  EventRecord e;
  e.experiment_id = "exp";
  e.phase_id = phase;
  e.phase_type = type;
  e.session_idx = session;
  e.task_name = "t";
  e.statement_idx = 0;
  e.status = status;
  e.wall_start_ns = start_ns;
  e.mono_start_ns = start_ns;
  e.duration_ns = duration_ns;
  return e;
}

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("lsth_met_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("degradation rate reproduces the worked latency example") {
  double sdr = degradation_rate(series_of({47, 75, 106, 131, 163, 157}));
  CHECK(std::abs(sdr - 0.2905) < 0.0005);
  // Closed form: (28/47 + 31/75 + 25/106 + 32/131 - 6/163) / 5.
  double closed =
      (28.0 / 47 + 31.0 / 75 + 25.0 / 106 + 32.0 / 131 - 6.0 / 163) / 5.0;
  CHECK(std::abs(sdr - closed) < 1e-12);
}

TEST_CASE("degradation rate basics") {
  CHECK(degradation_rate(series_of({100, 100, 100})) == 0.0);
  CHECK(std::abs(degradation_rate(series_of({100, 110, 121})) - 0.10) < 1e-12);
  CHECK(degradation_rate(series_of({200, 100}, Direction::kHigherBetter)) == 1.0);
  CHECK_THROWS_AS(degradation_rate(series_of({100})), InsufficientData);
  CHECK_THROWS_AS(degradation_rate(series_of({0, 5})), DivisionByZero);
  CHECK_THROWS_AS(degradation_rate(series_of({0, 5}, Direction::kHigherBetter)), DivisionByZero);
}

TEST_CASE("degradation rate properties over randomized series") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    size_t len = 2 + rng.below(8);
    std::vector<double> values;
    for (size_t i = 0; i < len; ++i) {
      values.push_back(1.0 + static_cast<double>(rng.below(100000)) / 100.0);
    }
    double base = degradation_rate(series_of(values));
    // Scale invariance.
    double c = 0.5 + static_cast<double>(rng.below(1000)) / 100.0;
    std::vector<double> scaled = values;
    for (auto& v : scaled) v *= c;
    CHECK(std::abs(degradation_rate(series_of(scaled)) - base) <= 1e-9 * std::abs(base) + 1e-12);
    // Reciprocal duality.
    std::vector<double> recip = values;
    for (auto& v : recip) v = 1.0 / v;
    double dual = degradation_rate(series_of(values, Direction::kHigherBetter));
    CHECK(std::abs(degradation_rate(series_of(recip)) - dual) <= 1e-9 * std::abs(dual) + 1e-12);
  }
  // Sign property.
  CHECK(degradation_rate(series_of({1, 2, 3, 5})) > 0.0);
  CHECK(degradation_rate(series_of({5, 3, 2, 1})) < 0.0);
}

TEST_CASE("phase aggregates: statement time vs phase span") {
  const int64_t s = 1000000000;  // 1s in ns
  std::vector<EventRecord> events;
  SUBCASE("three sequential 1s statements") {
    for (int i = 0; i < 3; ++i) {
      events.push_back(
          event_of("p", PhaseType::kSingleUser, 0, i * s, s, EventRecord::Status::kSuccess));
    }
    PhaseAggregate agg = aggregate_phase(events, "p");
    CHECK(agg.statement_time_s == 3.0);
    CHECK(agg.phase_span_s >= 3.0);
  }
  SUBCASE("two fully overlapped 3s sessions") {
    events.push_back(event_of("p", PhaseType::kThroughput, 0, 0, 3 * s, EventRecord::Status::kSuccess));
    events.push_back(event_of("p", PhaseType::kThroughput, 1, 0, 3 * s, EventRecord::Status::kSuccess));
    PhaseAggregate agg = aggregate_phase(events, "p");
    CHECK(agg.statement_time_s == 6.0);
    CHECK(agg.phase_span_s == 3.0);
    CHECK(agg.throughput_stmts_per_s == doctest::Approx(2.0 / 3.0));
  }
  SUBCASE("failures are counted") {
    events.push_back(event_of("p", PhaseType::kSingleUser, 0, 0, s, EventRecord::Status::kFailure));
    events.push_back(event_of("p", PhaseType::kSingleUser, 0, s, s, EventRecord::Status::kSuccess));
    PhaseAggregate agg = aggregate_phase(events, "p");
    CHECK(agg.statement_failures == 1);
    CHECK(agg.statements == 2);
  }
  CHECK_THROWS_AS(aggregate_phase(events, "nope"), UnknownPhase);
}

TEST_CASE("series group phase-type iterations in occurrence order") {
  const int64_t s = 1000000000;
  std::vector<EventRecord> events;
  // W1-like: SU, DM, SU, DM, SU with growing SU latency.
  int64_t t = 0;
  for (int i = 0; i < 3; ++i) {
    events.push_back(event_of("su_" + std::to_string(i), PhaseType::kSingleUser, 0, t,
                              (i + 1) * s, EventRecord::Status::kSuccess));
    t += (i + 1) * s;
    if (i < 2) {
      events.push_back(event_of("dm_" + std::to_string(i), PhaseType::kDataMaintenance, 0, t, s,
                                EventRecord::Status::kSuccess));
      t += s;
    }
  }
  std::vector<MetricSeries> series = series_by_phase_type(events);
  const MetricSeries* su_latency = nullptr;
  const MetricSeries* dm_latency = nullptr;
  for (const auto& s2 : series) {
    if (s2.metric_name == "latency_s" && s2.phase_type == PhaseType::kSingleUser) su_latency = &s2;
    if (s2.metric_name == "latency_s" && s2.phase_type == PhaseType::kDataMaintenance) {
      dm_latency = &s2;
    }
  }
  REQUIRE(su_latency != nullptr);
  REQUIRE(dm_latency != nullptr);
  CHECK(su_latency->values == std::vector<double>{1, 2, 3});
  CHECK(dm_latency->values == std::vector<double>{1, 1});
  CHECK(degradation_rate(*su_latency) > 0.0);

  // One iteration only: S_DR is n/a, not zero.
  std::vector<EventRecord> one = {
      event_of("solo", PhaseType::kOptimize, 0, 0, s, EventRecord::Status::kSuccess)};
  for (const auto& cell : sdr_table(series_by_phase_type(one))) {
    CHECK(cell.n == 0);
    CHECK(!cell.sdr.has_value());
  }
}

TEST_CASE("report files carry the pinned schema") {
  const int64_t s = 1000000000;
  std::vector<EventRecord> events;
  for (int i = 0; i < 3; ++i) {
    EventRecord e = event_of("su_" + std::to_string(i), PhaseType::kSingleUser, 0, i * 2 * s,
                             (i + 1) * s, EventRecord::Status::kSuccess);
    e.counters.files_opened = 10 + i;
    events.push_back(e);
  }
  std::vector<PhaseAggregate> aggs = aggregate_phases(events);
  std::vector<MetricSeries> series = series_by_phase_type(events);
  std::vector<SdrCell> sdr = sdr_table(series);
  fs::path dir = fresh_dir("report");
  emit_report(aggs, series, sdr, dir);

  std::string csv = slurp(dir / "report.csv");
  CHECK(csv.rfind("phase_type,metric,n,sdr\n", 0) == 0);
  CHECK(csv.find("single_user,latency_s,2,") != std::string::npos);
  std::string md = slurp(dir / "report.md");
  CHECK(md.find("S_DR") != std::string::npos);
  CHECK(md.find("su_1") != std::string::npos);
  CHECK(fs::exists(dir / "plotdata" / "single_user_latency_s.csv"));
  std::string plot = slurp(dir / "plotdata" / "single_user_latency_s.csv");
  CHECK(plot == "iteration,value\n0,1\n1,2\n2,3\n");

  // Empty telemetry still renders a report.
  fs::path empty_dir = fresh_dir("report_empty");
  emit_report({}, {}, {}, empty_dir);
  CHECK(slurp(empty_dir / "report.csv") == "phase_type,metric,n,sdr\n");
}
