// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lsth {

class TaskLibrary;
class GeneratorRegistry;

enum class PhaseType {
  kLoad,
  kSingleUser,
  kThroughput,
  kDataMaintenance,
  kOptimize,
  kTimeTravel,
  kCustom
};

const char* to_string(PhaseType t);
PhaseType phase_type_from_string(const std::string& s);

struct GeneratorRef {
  std::string name;
  std::map<std::string, std::string> params;
  friend bool operator==(const GeneratorRef&, const GeneratorRef&) = default;
};

struct TaskRef {
  std::string task_name;  // empty when generator-backed
  std::map<std::string, std::string> params;
  std::optional<GeneratorRef> generator;
  std::optional<int64_t> permutation_seed;
  friend bool operator==(const TaskRef&, const TaskRef&) = default;
};

struct SessionSpec {
  std::string target = "default";
  std::vector<TaskRef> tasks;
  friend bool operator==(const SessionSpec&, const SessionSpec&) = default;
};

struct PhaseSpec {
  std::string id;
  PhaseType phase_type = PhaseType::kCustom;
  std::vector<SessionSpec> sessions;
  friend bool operator==(const PhaseSpec&, const PhaseSpec&) = default;
};

// The parsed workload tree: phases run strictly in order; all sessions of a
// phase run concurrently; tasks within a session run sequentially. Immutable
// after parse and safely shareable across sessions.
struct WorkloadSpec {
  std::string id;
  std::map<std::string, std::string> params;  // global variable bindings
  std::vector<PhaseSpec> phases;
  friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

// Parses the YAML workload document. Unknown keys are rejected. When
// `library`/`generators` are given, task names and generator names are
// validated against them. Throws SyntaxError on malformed YAML and
// ValidationError on schema violations.
WorkloadSpec parse_workload(const std::string& document, const TaskLibrary* library = nullptr,
                            const GeneratorRegistry* generators = nullptr);

std::string serialize_workload(const WorkloadSpec&);

// Largest session count of any phase; the connection-pool size per target.
int max_concurrency(const WorkloadSpec&);

// Structural checks shared by parse_workload and build_package.
void validate_workload(const WorkloadSpec&, const TaskLibrary* library = nullptr,
                       const GeneratorRegistry* generators = nullptr);

}  // namespace lsth
