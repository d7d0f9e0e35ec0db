// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "lsth/packages.hpp"

#include <cctype>

#include "lsth/errors.hpp"

namespace lsth {

PackageId package_from_string(const std::string& s) {
  std::string u = s;
  for (auto& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (u == "W0") return PackageId::kW0;
  if (u == "W1") return PackageId::kW1;
  if (u == "W2") return PackageId::kW2;
  if (u == "W3") return PackageId::kW3;
  if (u == "W3_MULTI" || u == "W3MULTI") return PackageId::kW3Multi;
  if (u == "W4") return PackageId::kW4;
  throw ConfigError("unknown package: " + s);
}

const char* to_string(PackageId id) {
  switch (id) {
    case PackageId::kW0:
      return "W0";
    case PackageId::kW1:
      return "W1";
    case PackageId::kW2:
      return "W2";
    case PackageId::kW3:
      return "W3";
    case PackageId::kW3Multi:
      return "W3_MULTI";
    case PackageId::kW4:
      return "W4";
  }
  return "?";
}

namespace {

struct Builder {
  const PackageConfig& cfg;
  bool multi = false;
  WorkloadSpec spec;
  int next_refresh = 1;

  std::string read_target() const {
    if (!multi) return cfg.writer_target;
    return cfg.reader_target == "default" ? "reader" : cfg.reader_target;
  }
  std::string write_target() const {
    if (!multi) return cfg.writer_target;
    return cfg.writer_target == "default" ? "writer" : cfg.writer_target;
  }

  TaskRef su_task(int64_t seed) const {
    TaskRef t;
    t.task_name = "single_user";
    t.permutation_seed = seed;
    return t;
  }

  TaskRef dm_task() {
    TaskRef t;
    t.task_name = "data_maintenance";
    t.params["refresh_file"] = cfg.data_dir + "/refresh_" + std::to_string(next_refresh++) + ".csv";
    return t;
  }

  TaskRef tt_task(const std::string& asof_phase) const {
    TaskRef t;
    t.task_name = "time_travel";
    t.permutation_seed = 0;
    t.params["asof_phase"] = asof_phase;
    return t;
  }

  void phase(const std::string& id, PhaseType type, std::vector<SessionSpec> sessions) {
    PhaseSpec p;
    p.id = id;
    p.phase_type = type;
    p.sessions = std::move(sessions);
    spec.phases.push_back(std::move(p));
  }

  SessionSpec session(const std::string& target, std::vector<TaskRef> tasks) const {
    SessionSpec s;
    s.target = target;
    s.tasks = std::move(tasks);
    return s;
  }

  void load_phase() {
    TaskRef t;
    t.task_name = "load";
    phase("load", PhaseType::kLoad, {session(write_target(), {t})});
  }

  void su_phase(const std::string& id) {
    phase(id, PhaseType::kSingleUser, {session(read_target(), {su_task(0)})});
  }

  void dm_phase(const std::string& id, int task_count) {
    std::vector<TaskRef> tasks;
    for (int j = 0; j < task_count; ++j) tasks.push_back(dm_task());
    phase(id, PhaseType::kDataMaintenance, {session(write_target(), std::move(tasks))});
  }

  void optimize_phase(const std::string& id) {
    TaskRef t;
    t.task_name = "optimize";
    phase(id, PhaseType::kOptimize, {session(write_target(), {t})});
  }

  void throughput_phase(const std::string& id, int streams) {
    std::vector<SessionSpec> sessions;
    for (int j = 0; j < streams; ++j) {
      sessions.push_back(session(read_target(), {su_task(j)}));
    }
    phase(id, PhaseType::kThroughput, std::move(sessions));
  }

  // Attaches a concurrent single-user session to the last phase added.
  void attach_su() {
    spec.phases.back().sessions.push_back(session(read_target(), {su_task(0)}));
  }
};

}  // namespace

WorkloadSpec build_package(PackageId id, const PackageConfig& cfg) {
  if (cfg.streams < 1) throw ConfigError("package streams must be >= 1");
  if (cfg.iterations < 1) throw ConfigError("package iterations must be >= 1");
  Builder b{cfg};
  b.multi = id == PackageId::kW3Multi;
  b.spec.id = to_string(id);
  b.spec.params = cfg.params;
  const int k = cfg.iterations;

  switch (id) {
    case PackageId::kW0:
      b.load_phase();
      b.su_phase("su_1");
      b.throughput_phase("tp_1", cfg.streams);
      b.dm_phase("dm_1", 1);
      b.throughput_phase("tp_2", cfg.streams);
      b.dm_phase("dm_2", 1);
      break;
    case PackageId::kW1:
      // Fixed shape: six single-user phases, five interleaved maintenance.
      b.load_phase();
      for (int i = 1; i <= 5; ++i) {
        b.su_phase("su_" + std::to_string(i));
        b.dm_phase("dm_" + std::to_string(i), 1);
      }
      b.su_phase("su_6");
      break;
    case PackageId::kW2:
      b.load_phase();
      b.su_phase("su_0");
      for (int i = 1; i <= k; ++i) {
        b.dm_phase("dm_" + std::to_string(i), i);
        b.su_phase("su_" + std::to_string(i));
        b.optimize_phase("opt_" + std::to_string(i));
        b.su_phase("su_" + std::to_string(i) + "_opt");
      }
      break;
    case PackageId::kW3:
    case PackageId::kW3Multi:
      // Same task multiset as W2; the per-iteration single-user runs become
      // concurrent sessions of the maintenance and optimize phases.
      b.load_phase();
      b.su_phase("su_0");
      for (int i = 1; i <= k; ++i) {
        b.dm_phase("dm_" + std::to_string(i), i);
        b.attach_su();
        b.optimize_phase("opt_" + std::to_string(i));
        b.attach_su();
      }
      break;
    case PackageId::kW4:
      b.load_phase();
      for (int i = 1; i <= k; ++i) b.dm_phase("dm_" + std::to_string(i), 1);
      for (int j = 1; j <= k + 1; ++j) {
        std::string asof_phase = j == 1 ? "load" : "dm_" + std::to_string(j - 1);
        b.phase("tt_" + std::to_string(j), PhaseType::kTimeTravel,
                {b.session(b.read_target(), {b.tt_task(asof_phase)})});
      }
      break;
  }
  validate_workload(b.spec);
  return b.spec;
}

int refreshes_needed(PackageId id, const PackageConfig& cfg) {
  switch (id) {
    case PackageId::kW0:
      return 2;
    case PackageId::kW1:
      return 5;
    case PackageId::kW2:
    case PackageId::kW3:
    case PackageId::kW3Multi:
      return cfg.iterations * (cfg.iterations + 1) / 2;
    case PackageId::kW4:
      return cfg.iterations;
  }
  return 0;
}

}  // namespace lsth
