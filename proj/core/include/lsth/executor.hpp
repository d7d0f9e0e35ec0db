// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <atomic>
#include <map>
#include <string>

#include "lsth/connector.hpp"
#include "lsth/generators.hpp"
#include "lsth/task_library.hpp"
#include "lsth/telemetry.hpp"
#include "lsth/workload.hpp"

namespace lsth {

enum class FailurePolicy { kAbortExperiment, kAbortSession, kContinue };
FailurePolicy failure_policy_from_string(const std::string& s);

struct ExperimentConfig {
  std::string experiment_id = "exp";
  std::map<std::string, ConnectionSpec> targets;
  std::map<std::string, std::string> globals;  // command-line variable overrides
  FailurePolicy failure_policy = FailurePolicy::kAbortExperiment;
  int repetitions = 1;
  DialectKey dialect;  // template resolution key (dialect + LST under test)
  // Table whose version is recorded in the registry after load/maintenance
  // phases; `${fact_table}` from the bindings wins when present.
  std::string registry_table = "fact";
};

// Mutable run state shared by all sessions of an experiment. The version
// registry is written only between phases, so sessions read it without
// coordination. Variable precedence, strongest first: task params, workload
// params, command-line globals, runtime-injected defaults.
struct RunContext {
  const TaskLibrary* library = nullptr;
  const GeneratorRegistry* generators = nullptr;
  DialectKey dialect;
  FailurePolicy failure_policy = FailurePolicy::kAbortExperiment;
  std::string experiment_id;
  std::map<std::string, std::string> workload_params;
  std::map<std::string, std::string> globals;
  std::map<std::string, int64_t> version_registry;  // phase id -> table version
  int64_t last_registered_version = 0;
  std::atomic<bool> abort_experiment{false};
};

struct SessionResult {
  int executed = 0;
  int failures = 0;
  int skipped = 0;
};

struct ExperimentResult {
  int phases_run = 0;
  int statements = 0;
  int failures = 0;
  int skipped = 0;
  bool aborted = false;
  std::map<std::string, int64_t> version_registry;
};

// Runs the tasks of one session sequentially on one connection, emitting one
// EventRecord per statement. Exposed for tests; run_experiment drives it.
SessionResult run_session(const PhaseSpec& phase, int session_idx, const SessionSpec& session,
                          Connection& conn, CatalogView* catalog, RunContext& ctx,
                          TelemetrySink& sink);

// Executes phases in order with all sessions of a phase started concurrently;
// a phase completes only when every session completes. A connection pool of
// size max_concurrency(spec) is created per target before the first phase.
ExperimentResult run_experiment(const WorkloadSpec& spec, const ExperimentConfig& cfg,
                                const TaskLibrary& library, const GeneratorRegistry& generators,
                                TelemetrySink& sink);

}  // namespace lsth
