// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <string>

namespace lsth {

// Wall-clock time (UTC, nanoseconds since the Unix epoch) and its RFC-3339
// rendering. Durations always come from the monotonic clock; wall time is
// recorded separately for correlation.
int64_t wall_now_ns();
int64_t mono_now_ns();
std::string rfc3339_utc(int64_t wall_ns);
int64_t parse_rfc3339_utc(const std::string& s);  // throws FormatError

}  // namespace lsth
