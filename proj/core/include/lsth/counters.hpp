// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <string>

namespace lsth {

// Storage-activity counters. These stand in for cloud storage API calls and
// I/O volume: every physical file open/list/write performed by the engine is
// counted here. Additive across windows; all fields are deltas or cumulative
// sums depending on context.
struct StorageCounters {
  int64_t files_opened = 0;
  int64_t files_written = 0;
  int64_t list_calls = 0;
  int64_t bytes_read = 0;
  int64_t bytes_written = 0;

  StorageCounters& operator+=(const StorageCounters& o) {
    files_opened += o.files_opened;
    files_written += o.files_written;
    list_calls += o.list_calls;
    bytes_read += o.bytes_read;
    bytes_written += o.bytes_written;
    return *this;
  }
  friend StorageCounters operator+(StorageCounters a, const StorageCounters& b) { return a += b; }
  friend StorageCounters operator-(StorageCounters a, const StorageCounters& b) {
    a.files_opened -= b.files_opened;
    a.files_written -= b.files_written;
    a.list_calls -= b.list_calls;
    a.bytes_read -= b.bytes_read;
    a.bytes_written -= b.bytes_written;
    return a;
  }
  friend bool operator==(const StorageCounters&, const StorageCounters&) = default;

  bool non_negative() const {
    return files_opened >= 0 && files_written >= 0 && list_calls >= 0 && bytes_read >= 0 &&
           bytes_written >= 0;
  }
  int64_t total_calls() const { return files_opened + files_written + list_calls; }
  std::string to_string() const;
};

}  // namespace lsth
