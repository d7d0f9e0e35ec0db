// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "lsth/errors.hpp"
#include "lsth/telemetry.hpp"
#include "lsth/timeutil.hpp"

using namespace lsth;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("lsth_tel_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

EventRecord event_of(const std::string& phase, int session, int statement) {
  EventRecord e;
  e.experiment_id = "exp1";
  e.phase_id = phase;
  e.phase_type = PhaseType::kSingleUser;
  e.session_idx = session;
  e.task_name = "single_user";
  e.statement_idx = statement;
  e.status = EventRecord::Status::kSuccess;
  e.wall_start_ns = wall_now_ns();
  e.mono_start_ns = mono_now_ns();
  e.duration_ns = 1000 + statement;
  e.counters.files_opened = 2;
  e.counters.bytes_read = 64;
  return e;
}

}  // namespace

TEST_CASE("append then load round-trips every field") {
  fs::path dir = fresh_dir("rt");
  {
    JsonlTelemetry sink{dir};
    EventRecord e = event_of("p1", 0, 0);
    e.error_text = "boom";
    e.status = EventRecord::Status::kFailure;
    sink.append(e);
    sink.append(event_of("p1", 0, 1));
    CounterSample s;
    s.source = "default";
    s.wall_time_ns = wall_now_ns();
    s.counters.files_written = 5;
    sink.sample(s);
  }
  LoadedTelemetry loaded = load_telemetry_dir(dir);
  REQUIRE(loaded.events.size() == 2);
  CHECK(loaded.events[0].error_text == "boom");
  CHECK(loaded.events[0].status == EventRecord::Status::kFailure);
  CHECK(loaded.events[1].duration_ns == 1001);
  CHECK(loaded.events[1].counters.files_opened == 2);
  CHECK(loaded.events[1].counters.bytes_read == 64);
  REQUIRE(loaded.samples.size() == 1);
  CHECK(loaded.samples[0].counters.files_written == 5);
  CHECK(loaded.diagnostics.empty());
}

TEST_CASE("empty file loads to empty lists") {
  fs::path dir = fresh_dir("empty");
  { JsonlTelemetry sink{dir}; }
  LoadedTelemetry loaded = load_telemetry_dir(dir);
  CHECK(loaded.events.empty());
  CHECK(loaded.samples.empty());
}

TEST_CASE("negative durations are rejected at append time") {
  fs::path dir = fresh_dir("neg");
  JsonlTelemetry sink{dir};
  EventRecord e = event_of("p1", 0, 0);
  e.duration_ns = -5;
  CHECK_THROWS_AS(sink.append(e), Error);
  e.duration_ns = 5;
  e.counters.bytes_read = -1;
  CHECK_THROWS_AS(sink.append(e), Error);
}

TEST_CASE("one malformed line: strict throws, lenient reports and continues") {
  fs::path dir = fresh_dir("malformed");
  {
    JsonlTelemetry sink{dir};
    for (int i = 0; i < 10; ++i) sink.append(event_of("p1", 0, i));
  }
  // Corrupt line 4.
  std::vector<std::string> lines;
  {
    std::ifstream in(dir / "events.jsonl");
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }
  lines[3] = "{this is not json";
  {
    std::ofstream out(dir / "events.jsonl", std::ios::trunc);
    for (const auto& l : lines) out << l << "\n";
  }
  CHECK_THROWS_AS(load_events(dir / "events.jsonl", /*strict=*/true), FormatError);
  std::vector<std::string> diags;
  std::vector<EventRecord> events = load_events(dir / "events.jsonl", /*strict=*/false, &diags);
  CHECK(events.size() == 9);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].find(":4:") != std::string::npos);
}

TEST_CASE("concurrent appends preserve per-session order") {
  fs::path dir = fresh_dir("conc");
  {
    JsonlTelemetry sink{dir};
    std::vector<std::thread> threads;
    for (int s = 0; s < 4; ++s) {
      threads.emplace_back([&sink, s]() {
        for (int i = 0; i < 50; ++i) sink.append(event_of("p1", s, i));
      });
    }
    for (auto& t : threads) t.join();
  }
  std::vector<EventRecord> events = load_events(dir / "events.jsonl");
  CHECK(events.size() == 200);
  int next[4] = {0, 0, 0, 0};
  for (const auto& e : events) {
    CHECK(e.statement_idx == next[e.session_idx]);
    ++next[e.session_idx];
  }
  for (int s = 0; s < 4; ++s) CHECK(next[s] == 50);
}
