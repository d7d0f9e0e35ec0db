// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "lsth/timeutil.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <ctime>

#include "lsth/errors.hpp"

namespace lsth {

int64_t wall_now_ns() {
  using namespace std::chrono;
  return duration_cast<nanoseconds>(system_clock::now().time_since_epoch()).count();
}

int64_t mono_now_ns() {
  using namespace std::chrono;
  return duration_cast<nanoseconds>(steady_clock::now().time_since_epoch()).count();
}

std::string rfc3339_utc(int64_t wall_ns) {
  std::time_t secs = static_cast<std::time_t>(wall_ns / 1000000000);
  int64_t frac = wall_ns % 1000000000;
  if (frac < 0) {
    frac += 1000000000;
    secs -= 1;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%09" PRId64 "Z",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                frac);
  return buf;
}

int64_t parse_rfc3339_utc(const std::string& s) {
  std::tm tm{};
  int64_t frac = 0;
  int n = 0;
  if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%d.%9" SCNd64 "Z%n", &tm.tm_year, &tm.tm_mon,
                  &tm.tm_mday, &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &frac, &n) != 7 ||
      n != static_cast<int>(s.size())) {
    throw FormatError("bad RFC-3339 timestamp: '" + s + "'");
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  std::time_t secs = timegm(&tm);
  return static_cast<int64_t>(secs) * 1000000000 + frac;
}

}  // namespace lsth
