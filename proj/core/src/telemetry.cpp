// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "lsth/telemetry.hpp"

#include "json.hpp"
#include "lsth/errors.hpp"
#include "lsth/timeutil.hpp"

namespace lsth {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(EventRecord::Status s) {
  switch (s) {
    case EventRecord::Status::kSuccess:
      return "SUCCESS";
    case EventRecord::Status::kFailure:
      return "FAILURE";
    case EventRecord::Status::kSkipped:
      return "SKIPPED";
  }
  return "?";
}

namespace {

EventRecord::Status status_from_string(const std::string& s) {
  if (s == "SUCCESS") return EventRecord::Status::kSuccess;
  if (s == "FAILURE") return EventRecord::Status::kFailure;
  if (s == "SKIPPED") return EventRecord::Status::kSkipped;
  throw FormatError("unknown status: " + s);
}

void validate(const EventRecord& e) {
  if (e.duration_ns < 0) throw Error("event duration must be >= 0");
  if (!e.counters.non_negative()) throw Error("event counters must be >= 0");
  if (e.session_idx < 0 || e.task_idx < 0 || e.statement_idx < 0) {
    throw Error("event ordinals must be >= 0");
  }
}

json counters_json(const StorageCounters& c) {
  return json{{"files_opened", c.files_opened},
              {"files_written", c.files_written},
              {"list_calls", c.list_calls},
              {"bytes_read", c.bytes_read},
              {"bytes_written", c.bytes_written}};
}

StorageCounters counters_from_json(const json& j) {
  StorageCounters c;
  c.files_opened = j.at("files_opened").get<int64_t>();
  c.files_written = j.at("files_written").get<int64_t>();
  c.list_calls = j.at("list_calls").get<int64_t>();
  c.bytes_read = j.at("bytes_read").get<int64_t>();
  c.bytes_written = j.at("bytes_written").get<int64_t>();
  return c;
}

std::string event_line(const EventRecord& e) {
  json j{{"v", 1},
         {"experiment_id", e.experiment_id},
         {"phase_id", e.phase_id},
         {"phase_type", to_string(e.phase_type)},
         {"session_idx", e.session_idx},
         {"task_name", e.task_name},
         {"task_idx", e.task_idx},
         {"statement_idx", e.statement_idx},
         {"status", to_string(e.status)},
         {"wall_start", rfc3339_utc(e.wall_start_ns)},
         {"mono_start_ns", e.mono_start_ns},
         {"duration_ns", e.duration_ns},
         {"counters", counters_json(e.counters)}};
  if (!e.error_text.empty()) j["error_text"] = e.error_text;
  return j.dump() + "\n";
}

EventRecord event_from_line(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw FormatError("malformed JSON");
  EventRecord e;
  e.experiment_id = j.at("experiment_id").get<std::string>();
  e.phase_id = j.at("phase_id").get<std::string>();
  e.phase_type = phase_type_from_string(j.at("phase_type").get<std::string>());
  e.session_idx = j.at("session_idx").get<int>();
  e.task_name = j.at("task_name").get<std::string>();
  e.task_idx = j.at("task_idx").get<int>();
  e.statement_idx = j.at("statement_idx").get<int>();
  e.status = status_from_string(j.at("status").get<std::string>());
  e.wall_start_ns = parse_rfc3339_utc(j.at("wall_start").get<std::string>());
  e.mono_start_ns = j.at("mono_start_ns").get<int64_t>();
  e.duration_ns = j.at("duration_ns").get<int64_t>();
  e.counters = counters_from_json(j.at("counters"));
  if (j.contains("error_text")) e.error_text = j["error_text"].get<std::string>();
  if (e.duration_ns < 0) throw FormatError("negative duration");
  return e;
}

std::string sample_line(const CounterSample& s) {
  return json{{"v", 1},
              {"source", s.source},
              {"wall_time", rfc3339_utc(s.wall_time_ns)},
              {"counters", counters_json(s.counters)}}
             .dump() +
         "\n";
}

CounterSample sample_from_line(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw FormatError("malformed JSON");
  CounterSample s;
  s.source = j.at("source").get<std::string>();
  s.wall_time_ns = parse_rfc3339_utc(j.at("wall_time").get<std::string>());
  s.counters = counters_from_json(j.at("counters"));
  return s;
}

template <typename T, typename ParseFn>
std::vector<T> load_lines(const fs::path& file, bool strict, std::vector<std::string>* diagnostics,
                          ParseFn parse_one) {
  std::ifstream in(file);
  if (!in) throw IOFailure("cannot open " + file.string());
  std::vector<T> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(parse_one(line));
    } catch (const Error& e) {
      std::string diag = file.filename().string() + ":" + std::to_string(line_no) + ": " + e.what();
      if (strict) throw FormatError(diag);
      if (diagnostics) diagnostics->push_back(diag);
    }
  }
  return out;
}

}  // namespace

JsonlTelemetry::JsonlTelemetry(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  events_.open(dir_ / "events.jsonl", std::ios::app);
  counters_.open(dir_ / "counters.jsonl", std::ios::app);
  if (!events_ || !counters_) throw IOFailure("cannot open telemetry files under " + dir_.string());
}

void JsonlTelemetry::append(const EventRecord& e) {
  validate(e);
  std::string line = event_line(e);
  std::lock_guard lk(mu_);
  events_ << line;
  events_.flush();
  if (!events_) throw IOFailure("telemetry append failed");
}

void JsonlTelemetry::sample(const CounterSample& s) {
  std::string line = sample_line(s);
  std::lock_guard lk(mu_);
  counters_ << line;
  counters_.flush();
  if (!counters_) throw IOFailure("telemetry sample failed");
}

void MemoryTelemetry::append(const EventRecord& e) {
  validate(e);
  std::lock_guard lk(mu_);
  events_.push_back(e);
}

void MemoryTelemetry::sample(const CounterSample& s) {
  std::lock_guard lk(mu_);
  samples_.push_back(s);
}

std::vector<EventRecord> MemoryTelemetry::events() const {
  std::lock_guard lk(mu_);
  return events_;
}

std::vector<CounterSample> MemoryTelemetry::samples() const {
  std::lock_guard lk(mu_);
  return samples_;
}

std::vector<EventRecord> load_events(const fs::path& file, bool strict,
                                     std::vector<std::string>* diagnostics) {
  return load_lines<EventRecord>(file, strict, diagnostics, event_from_line);
}

std::vector<CounterSample> load_counter_samples(const fs::path& file, bool strict,
                                                std::vector<std::string>* diagnostics) {
  return load_lines<CounterSample>(file, strict, diagnostics, sample_from_line);
}

LoadedTelemetry load_telemetry_dir(const fs::path& dir, bool strict) {
  LoadedTelemetry out;
  out.events = load_events(dir / "events.jsonl", strict, &out.diagnostics);
  std::error_code ec;
  if (fs::exists(dir / "counters.jsonl", ec)) {
    out.samples = load_counter_samples(dir / "counters.jsonl", strict, &out.diagnostics);
  }
  return out;
}

}  // namespace lsth
