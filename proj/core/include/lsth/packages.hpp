// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <map>
#include <string>

#include "lsth/workload.hpp"

namespace lsth {

// Built-in workload packages over the synthetic star schema:
//   W0       load, single-user, throughput, data-maintenance baseline
//   W1       longevity: 6 single-user phases with 5 interleaved maintenance
//   W2       resilience: per iteration i, i maintenance tasks, a degraded
//            single-user run, optimize, and a post-optimize single-user run
//   W3       read/write concurrency: W2's task multiset with the single-user
//            runs attached to the maintenance/optimize phases as concurrent
//            sessions
//   W3_MULTI W3 with reads routed to target "reader", writes to "writer"
//   W4       time travel: k maintenance phases, then k+1 time-travel phases,
//            phase j querying the version produced by write phase j
enum class PackageId { kW0, kW1, kW2, kW3, kW3Multi, kW4 };

PackageId package_from_string(const std::string& s);  // "W0".."W4", "W3_MULTI"
const char* to_string(PackageId);

struct PackageConfig {
  int streams = 2;     // concurrent single-user streams per throughput phase (s)
  int iterations = 2;  // maintenance/optimize iterations (k)
  std::string writer_target = "default";
  std::string reader_target = "default";  // used by W3_MULTI
  std::string data_dir = "data";          // datagen output consumed by load/merge
  std::map<std::string, std::string> params;  // extra workload globals
};

// Expands a package into a plain WorkloadSpec; errors with ConfigError when
// streams or iterations are below 1.
WorkloadSpec build_package(PackageId id, const PackageConfig& cfg);

// Refresh streams the package consumes (datagen must provide at least this).
int refreshes_needed(PackageId id, const PackageConfig& cfg);

}  // namespace lsth
