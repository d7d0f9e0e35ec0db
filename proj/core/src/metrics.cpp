// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "lsth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "lsth/errors.hpp"

namespace lsth {

namespace {

struct PhaseBucket {
  std::string id;
  PhaseType type;
  int64_t first_mono = 0;
  std::vector<const EventRecord*> events;
};

std::vector<PhaseBucket> bucket_by_phase(const std::vector<EventRecord>& events) {
  std::map<std::string, PhaseBucket> by_id;
  for (const auto& e : events) {
    auto [it, inserted] = by_id.try_emplace(e.phase_id);
    PhaseBucket& b = it->second;
    if (inserted) {
      b.id = e.phase_id;
      b.type = e.phase_type;
      b.first_mono = e.mono_start_ns;
    }
    b.first_mono = std::min(b.first_mono, e.mono_start_ns);
    b.events.push_back(&e);
  }
  std::vector<PhaseBucket> out;
  out.reserve(by_id.size());
  for (auto& [_, b] : by_id) out.push_back(std::move(b));
  std::sort(out.begin(), out.end(),
            [](const PhaseBucket& a, const PhaseBucket& b) { return a.first_mono < b.first_mono; });
  return out;
}

PhaseAggregate aggregate_bucket(const PhaseBucket& b) {
  PhaseAggregate agg;
  agg.phase_id = b.id;
  agg.phase_type = b.type;
  int64_t duration_sum = 0;
  int64_t min_start = b.events.front()->mono_start_ns;
  int64_t max_end = min_start;
  for (const EventRecord* e : b.events) {
    duration_sum += e->duration_ns;
    min_start = std::min(min_start, e->mono_start_ns);
    max_end = std::max(max_end, e->mono_end_ns());
    agg.counters += e->counters;
    ++agg.statements;
    if (e->status == EventRecord::Status::kFailure) ++agg.statement_failures;
  }
  agg.statement_time_s = static_cast<double>(duration_sum) / 1e9;
  agg.phase_span_s = static_cast<double>(max_end - min_start) / 1e9;
  double span = std::max(agg.phase_span_s, 1e-9);
  agg.throughput_stmts_per_s = static_cast<double>(agg.statements) / span;
  return agg;
}

}  // namespace

std::vector<PhaseAggregate> aggregate_phases(const std::vector<EventRecord>& events) {
  std::vector<PhaseAggregate> out;
  for (const auto& b : bucket_by_phase(events)) out.push_back(aggregate_bucket(b));
  return out;
}

PhaseAggregate aggregate_phase(const std::vector<EventRecord>& events,
                               const std::string& phase_id) {
  for (const auto& b : bucket_by_phase(events)) {
    if (b.id == phase_id) return aggregate_bucket(b);
  }
  throw UnknownPhase("no events for phase '" + phase_id + "'");
}

std::vector<MetricSeries> series_by_phase_type(const std::vector<EventRecord>& events) {
  std::vector<PhaseAggregate> aggs = aggregate_phases(events);
  struct Entry {
    const char* name;
    Direction dir;
    double (*get)(const PhaseAggregate&);
  };
  static const Entry kMetrics[] = {
      {"latency_s", Direction::kLowerBetter,
       [](const PhaseAggregate& a) { return a.statement_time_s; }},
      {"phase_span_s", Direction::kLowerBetter,
       [](const PhaseAggregate& a) { return a.phase_span_s; }},
      {"files_opened", Direction::kLowerBetter,
       [](const PhaseAggregate& a) { return static_cast<double>(a.counters.files_opened); }},
      {"files_written", Direction::kLowerBetter,
       [](const PhaseAggregate& a) { return static_cast<double>(a.counters.files_written); }},
      {"list_calls", Direction::kLowerBetter,
       [](const PhaseAggregate& a) { return static_cast<double>(a.counters.list_calls); }},
      {"bytes_read", Direction::kLowerBetter,
       [](const PhaseAggregate& a) { return static_cast<double>(a.counters.bytes_read); }},
      {"bytes_written", Direction::kLowerBetter,
       [](const PhaseAggregate& a) { return static_cast<double>(a.counters.bytes_written); }},
      {"throughput_stmts_per_s", Direction::kHigherBetter,
       [](const PhaseAggregate& a) { return a.throughput_stmts_per_s; }},
  };

  // Phase types in first-occurrence order keep the report stable.
  std::vector<PhaseType> type_order;
  for (const auto& a : aggs) {
    if (std::find(type_order.begin(), type_order.end(), a.phase_type) == type_order.end()) {
      type_order.push_back(a.phase_type);
    }
  }
  std::vector<MetricSeries> out;
  for (PhaseType type : type_order) {
    for (const auto& m : kMetrics) {
      MetricSeries s;
      s.phase_type = type;
      s.metric_name = m.name;
      s.direction = m.dir;
      for (const auto& a : aggs) {
        if (a.phase_type == type) s.values.push_back(m.get(a));
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

double degradation_rate(const MetricSeries& series) {
  const std::vector<double>& raw = series.values;
  if (raw.size() < 2) {
    throw InsufficientData("degradation rate needs at least 2 iterations, have " +
                           std::to_string(raw.size()));
  }
  std::vector<double> m = raw;
  if (series.direction == Direction::kHigherBetter) {
    for (auto& v : m) {
      if (v == 0.0) throw DivisionByZero("zero value in higher-is-better series");
      v = 1.0 / v;
    }
  }
  double sum = 0;
  for (size_t i = 1; i < m.size(); ++i) {
    if (m[i - 1] == 0.0) {
      throw DivisionByZero("zero M_" + std::to_string(i - 1) + " in series " + series.metric_name);
    }
    sum += (m[i] - m[i - 1]) / m[i - 1];
  }
  return sum / static_cast<double>(m.size() - 1);
}

std::vector<SdrCell> sdr_table(const std::vector<MetricSeries>& series) {
  std::vector<SdrCell> out;
  for (const auto& s : series) {
    SdrCell cell;
    cell.phase_type = s.phase_type;
    cell.metric = s.metric_name;
    cell.n = static_cast<int>(s.values.size()) - 1;
    if (s.values.size() >= 2) {
      try {
        cell.sdr = degradation_rate(s);
      } catch (const DivisionByZero&) {
        cell.sdr = std::nullopt;
      }
    }
    out.push_back(std::move(cell));
  }
  return out;
}

}  // namespace lsth
