// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "lsth/errors.hpp"
#include "lsth/packages.hpp"

using namespace lsth;

namespace {

PackageConfig config_of(int streams, int iterations) {
  PackageConfig cfg;
  cfg.streams = streams;
  cfg.iterations = iterations;
  cfg.data_dir = "data";
  return cfg;
}

int count_type(const WorkloadSpec& spec, PhaseType t) {
  int n = 0;
  for (const auto& p : spec.phases) {
    if (p.phase_type == t) ++n;
  }
  return n;
}

// Task multiset: (task name, params) across all phases and sessions.
std::multiset<std::pair<std::string, std::string>> task_multiset(const WorkloadSpec& spec) {
  std::multiset<std::pair<std::string, std::string>> out;
  for (const auto& phase : spec.phases) {
    for (const auto& session : phase.sessions) {
      for (const auto& task : session.tasks) {
        std::string params;
        for (const auto& [k, v] : task.params) params += k + "=" + v + ";";
        out.insert({task.task_name, params});
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("W1 is one load plus six single-user and five maintenance phases") {
  WorkloadSpec spec = build_package(PackageId::kW1, config_of(1, 1));
  CHECK(spec.phases.size() == 12);
  CHECK(count_type(spec, PhaseType::kLoad) == 1);
  CHECK(count_type(spec, PhaseType::kSingleUser) == 6);
  CHECK(count_type(spec, PhaseType::kDataMaintenance) == 5);
  CHECK(max_concurrency(spec) == 1);
  // Interleaving: SU, DM, SU, DM, ..., SU.
  CHECK(spec.phases[1].phase_type == PhaseType::kSingleUser);
  CHECK(spec.phases[2].phase_type == PhaseType::kDataMaintenance);
  CHECK(spec.phases.back().phase_type == PhaseType::kSingleUser);
}

TEST_CASE("W0 follows the baseline phase sequence") {
  WorkloadSpec spec = build_package(PackageId::kW0, config_of(4, 1));
  REQUIRE(spec.phases.size() == 6);
  CHECK(spec.phases[0].phase_type == PhaseType::kLoad);
  CHECK(spec.phases[1].phase_type == PhaseType::kSingleUser);
  CHECK(spec.phases[2].phase_type == PhaseType::kThroughput);
  CHECK(spec.phases[3].phase_type == PhaseType::kDataMaintenance);
  CHECK(spec.phases[4].phase_type == PhaseType::kThroughput);
  CHECK(spec.phases[5].phase_type == PhaseType::kDataMaintenance);
  CHECK(max_concurrency(spec) == 4);
  // Distinct permutation seeds per throughput stream.
  const PhaseSpec& tp = spec.phases[2];
  REQUIRE(tp.sessions.size() == 4);
  for (size_t i = 0; i < tp.sessions.size(); ++i) {
    CHECK(tp.sessions[i].tasks[0].permutation_seed == static_cast<int64_t>(i));
  }
}

TEST_CASE("W2 grows the maintenance batch linearly and optimizes each round") {
  WorkloadSpec spec = build_package(PackageId::kW2, config_of(1, 3));
  CHECK(spec.phases.size() == 2 + 4 * 3);
  CHECK(count_type(spec, PhaseType::kOptimize) == 3);
  CHECK(count_type(spec, PhaseType::kSingleUser) == 1 + 2 * 3);
  // dm_i carries i maintenance tasks.
  std::map<std::string, size_t> dm_tasks;
  for (const auto& p : spec.phases) {
    if (p.phase_type == PhaseType::kDataMaintenance) {
      dm_tasks[p.id] = p.sessions[0].tasks.size();
    }
  }
  CHECK(dm_tasks["dm_1"] == 1);
  CHECK(dm_tasks["dm_2"] == 2);
  CHECK(dm_tasks["dm_3"] == 3);
  // Refresh streams are consumed sequentially without reuse.
  std::multiset<std::string> files;
  for (const auto& p : spec.phases) {
    for (const auto& s : p.sessions) {
      for (const auto& t : s.tasks) {
        if (auto it = t.params.find("refresh_file"); it != t.params.end()) files.insert(it->second);
      }
    }
  }
  CHECK(files.size() == 6);
  CHECK(std::set<std::string>(files.begin(), files.end()).size() == 6);
  // Each optimize phase is directly followed by a single-user phase.
  for (size_t i = 0; i < spec.phases.size(); ++i) {
    if (spec.phases[i].phase_type == PhaseType::kOptimize) {
      REQUIRE(i + 1 < spec.phases.size());
      CHECK(spec.phases[i + 1].phase_type == PhaseType::kSingleUser);
    }
  }
}

TEST_CASE("W2 and W3 carry identical task multisets, differing in grouping") {
  for (int k : {1, 2, 3}) {
    CAPTURE(k);
    WorkloadSpec w2 = build_package(PackageId::kW2, config_of(1, k));
    WorkloadSpec w3 = build_package(PackageId::kW3, config_of(1, k));
    CHECK(task_multiset(w2) == task_multiset(w3));
    CHECK(w2.phases.size() == 2 + 4 * static_cast<size_t>(k));
    CHECK(w3.phases.size() == 2 + 2 * static_cast<size_t>(k));
    CHECK(max_concurrency(w2) == 1);
    CHECK(max_concurrency(w3) == 2);
  }
}

TEST_CASE("every W3 maintenance and optimize phase carries a concurrent reader") {
  WorkloadSpec spec = build_package(PackageId::kW3, config_of(1, 1));
  for (const auto& p : spec.phases) {
    if (p.phase_type == PhaseType::kDataMaintenance || p.phase_type == PhaseType::kOptimize) {
      REQUIRE(p.sessions.size() == 2);
      CHECK(p.sessions[1].tasks[0].task_name == "single_user");
    }
  }
}

TEST_CASE("W3_MULTI routes reads and writes to separate targets") {
  WorkloadSpec spec = build_package(PackageId::kW3Multi, config_of(1, 2));
  for (const auto& p : spec.phases) {
    for (const auto& s : p.sessions) {
      for (const auto& t : s.tasks) {
        if (t.task_name == "single_user") CHECK(s.target == "reader");
        else CHECK(s.target == "writer");
      }
    }
  }
}

TEST_CASE("W4 shape and time-travel phase mapping") {
  PackageConfig cfg = config_of(1, 2);
  WorkloadSpec spec = build_package(PackageId::kW4, cfg);
  CHECK(spec.phases.size() == 6);  // load + 2 dm + 3 tt
  CHECK(count_type(spec, PhaseType::kTimeTravel) == 3);
  // Phase j of the time-travel tail resolves the version recorded after
  // write phase j: load for j=1, dm_{j-1} otherwise.
  std::map<std::string, std::string> asof;
  for (const auto& p : spec.phases) {
    if (p.phase_type == PhaseType::kTimeTravel) {
      asof[p.id] = p.sessions[0].tasks[0].params.at("asof_phase");
    }
  }
  CHECK(asof.at("tt_1") == "load");
  CHECK(asof.at("tt_2") == "dm_1");
  CHECK(asof.at("tt_3") == "dm_2");
}

TEST_CASE("package parameters are rejected when out of range") {
  CHECK_THROWS_AS(build_package(PackageId::kW0, config_of(0, 1)), ConfigError);
  CHECK_THROWS_AS(build_package(PackageId::kW2, config_of(1, 0)), ConfigError);
}

TEST_CASE("refresh requirements per package") {
  CHECK(refreshes_needed(PackageId::kW0, config_of(2, 9)) == 2);
  CHECK(refreshes_needed(PackageId::kW1, config_of(2, 9)) == 5);
  CHECK(refreshes_needed(PackageId::kW2, config_of(2, 3)) == 6);
  CHECK(refreshes_needed(PackageId::kW4, config_of(2, 3)) == 3);
}

TEST_CASE("package ids parse in both cases") {
  CHECK(package_from_string("w1") == PackageId::kW1);
  CHECK(package_from_string("W3_MULTI") == PackageId::kW3Multi);
  CHECK_THROWS_AS(package_from_string("W9"), ConfigError);
}
