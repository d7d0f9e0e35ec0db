// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "lsth/executor.hpp"

#include <algorithm>
#include <set>
#include <thread>

#include "lsth/errors.hpp"
#include "lsth/rng.hpp"
#include "lsth/timeutil.hpp"

namespace lsth {

FailurePolicy failure_policy_from_string(const std::string& s) {
  if (s == "abort_experiment" || s == "abort-experiment") return FailurePolicy::kAbortExperiment;
  if (s == "abort_session" || s == "abort-session") return FailurePolicy::kAbortSession;
  if (s == "continue") return FailurePolicy::kContinue;
  throw ConfigError("unknown failure policy: " + s);
}

namespace {

// Concrete statements of one task after resolution, expansion and
// permutation, ready for substitution.
struct PreparedTask {
  std::string name;
  std::vector<StatementTemplate> statements;
  std::map<std::string, std::string> params;
};

std::vector<PreparedTask> prepare_tasks(const PhaseSpec& phase, int session_idx,
                                        const SessionSpec& session, CatalogView* catalog,
                                        RunContext& ctx) {
  std::vector<PreparedTask> out;
  for (const auto& ref : session.tasks) {
    if (ref.generator) {
      for (auto& tpl : ctx.generators->expand(*ref.generator, catalog)) {
        PreparedTask p;
        p.name = tpl.name;
        p.statements = std::move(tpl.statements);
        p.params = ref.params;
        out.push_back(std::move(p));
      }
      continue;
    }
    TaskTemplate tpl = ctx.library->resolve(ref.task_name, ctx.dialect);
    PreparedTask p;
    p.name = tpl.name;
    p.statements = std::move(tpl.statements);
    p.params = ref.params;
    // Streams of a throughput phase run distinct permutations of the query
    // set; the seed defaults to the session index within the phase.
    std::optional<int64_t> seed = ref.permutation_seed;
    if (!seed && phase.phase_type == PhaseType::kThroughput) seed = session_idx;
    if (seed) deterministic_shuffle(p.statements, static_cast<uint64_t>(*seed));
    out.push_back(std::move(p));
  }
  return out;
}

std::map<std::string, std::string> bindings_for(const PreparedTask& task, RunContext& ctx) {
  std::map<std::string, std::string> m;
  // Runtime-injected defaults (weakest).
  m["experiment_id"] = ctx.experiment_id;
  m["asof_version"] = std::to_string(ctx.last_registered_version);
  for (const auto& [k, v] : ctx.globals) m[k] = v;
  for (const auto& [k, v] : ctx.workload_params) m[k] = v;
  for (const auto& [k, v] : task.params) m[k] = v;
  // A task pinned to a write phase resolves its version through the
  // registry (time-travel phases in the built-in packages do this).
  if (auto it = m.find("asof_phase"); it != m.end()) {
    auto reg = ctx.version_registry.find(it->second);
    m["asof_version"] = std::to_string(reg == ctx.version_registry.end() ? 0 : reg->second);
  }
  return m;
}

EventRecord base_event(const PhaseSpec& phase, int session_idx, const PreparedTask& task,
                       int task_idx, int statement_idx, RunContext& ctx) {
  EventRecord e;
  e.experiment_id = ctx.experiment_id;
  e.phase_id = phase.id;
  e.phase_type = phase.phase_type;
  e.session_idx = session_idx;
  e.task_name = task.name;
  e.task_idx = task_idx;
  e.statement_idx = statement_idx;
  return e;
}

}  // namespace

SessionResult run_session(const PhaseSpec& phase, int session_idx, const SessionSpec& session,
                          Connection& conn, CatalogView* catalog, RunContext& ctx,
                          TelemetrySink& sink) {
  SessionResult result;
  std::vector<PreparedTask> tasks;
  try {
    tasks = prepare_tasks(phase, session_idx, session, catalog, ctx);
  } catch (const Error& e) {
    // Resolution/expansion failures count as a failure of the first task.
    EventRecord ev;
    ev.experiment_id = ctx.experiment_id;
    ev.phase_id = phase.id;
    ev.phase_type = phase.phase_type;
    ev.session_idx = session_idx;
    ev.task_name = session.tasks.empty() ? "?" : (session.tasks[0].generator ? session.tasks[0].generator->name : session.tasks[0].task_name);
    ev.status = EventRecord::Status::kFailure;
    ev.wall_start_ns = wall_now_ns();
    ev.mono_start_ns = mono_now_ns();
    ev.error_text = e.what();
    sink.append(ev);
    ++result.failures;
    if (ctx.failure_policy == FailurePolicy::kAbortExperiment) ctx.abort_experiment = true;
    return result;
  }

  bool session_aborted = false;
  for (size_t t = 0; t < tasks.size(); ++t) {
    const PreparedTask& task = tasks[t];
    std::map<std::string, std::string> bindings = bindings_for(task, ctx);
    for (size_t s = 0; s < task.statements.size(); ++s) {
      EventRecord ev = base_event(phase, session_idx, task, static_cast<int>(t),
                                  static_cast<int>(s), ctx);
      if (session_aborted || ctx.abort_experiment.load()) {
        ev.status = EventRecord::Status::kSkipped;
        ev.wall_start_ns = wall_now_ns();
        ev.mono_start_ns = mono_now_ns();
        sink.append(ev);
        ++result.skipped;
        continue;
      }
      std::string sql;
      try {
        sql = substitute(task.statements[s], bindings);
      } catch (const Error& e) {
        ev.status = EventRecord::Status::kFailure;
        ev.wall_start_ns = wall_now_ns();
        ev.mono_start_ns = mono_now_ns();
        ev.error_text = e.what();
        sink.append(ev);
        ++result.failures;
        switch (ctx.failure_policy) {
          case FailurePolicy::kAbortExperiment:
            ctx.abort_experiment = true;
            break;
          case FailurePolicy::kAbortSession:
            session_aborted = true;
            break;
          case FailurePolicy::kContinue:
            break;
        }
        continue;
      }
      ev.wall_start_ns = wall_now_ns();
      ev.mono_start_ns = mono_now_ns();
      try {
        StatementResult r = conn.execute(sql);
        ev.duration_ns = mono_now_ns() - ev.mono_start_ns;
        ev.counters = r.engine_counters_delta;
        ev.status = EventRecord::Status::kSuccess;
        ++result.executed;
      } catch (const Error& e) {
        ev.duration_ns = mono_now_ns() - ev.mono_start_ns;
        ev.status = EventRecord::Status::kFailure;
        ev.error_text = e.what();
        ++result.failures;
        switch (ctx.failure_policy) {
          case FailurePolicy::kAbortExperiment:
            ctx.abort_experiment = true;
            break;
          case FailurePolicy::kAbortSession:
            session_aborted = true;
            break;
          case FailurePolicy::kContinue:
            break;
        }
      }
      sink.append(ev);
    }
  }
  return result;
}

ExperimentResult run_experiment(const WorkloadSpec& spec, const ExperimentConfig& cfg,
                                const TaskLibrary& library, const GeneratorRegistry& generators,
                                TelemetrySink& sink) {
  validate_workload(spec, &library, &generators);
  if (cfg.repetitions < 1) throw ConfigError("repetitions must be >= 1");

  // Every target referenced by the workload must be configured and reachable.
  std::set<std::string> referenced;
  for (const auto& phase : spec.phases) {
    for (const auto& session : phase.sessions) referenced.insert(session.target);
  }
  std::map<std::string, std::shared_ptr<Target>> targets;
  std::map<std::string, std::vector<std::unique_ptr<Connection>>> pools;
  int pool_size = max_concurrency(spec);
  for (const auto& name : referenced) {
    auto it = cfg.targets.find(name);
    if (it == cfg.targets.end()) {
      throw TargetUnreachable("workload references unconfigured target '" + name + "'");
    }
    targets[name] = Target::connect(it->second);
    auto& pool = pools[name];
    for (int i = 0; i < pool_size; ++i) pool.push_back(targets[name]->open_session());
  }

  RunContext ctx;
  ctx.library = &library;
  ctx.generators = &generators;
  ctx.dialect = cfg.dialect;
  ctx.failure_policy = cfg.failure_policy;
  ctx.experiment_id = cfg.experiment_id;
  ctx.workload_params = spec.params;
  ctx.globals = cfg.globals;

  std::string registry_table = cfg.registry_table;
  if (auto it = spec.params.find("fact_table"); it != spec.params.end()) {
    registry_table = it->second;
  }

  ExperimentResult result;
  for (int rep = 1; rep <= cfg.repetitions; ++rep) {
    for (const auto& phase_in : spec.phases) {
      PhaseSpec phase = phase_in;
      if (rep > 1) phase.id += "#" + std::to_string(rep);
      std::vector<SessionResult> session_results(phase.sessions.size());
      std::vector<std::thread> workers;
      workers.reserve(phase.sessions.size());
      for (size_t i = 0; i < phase.sessions.size(); ++i) {
        const SessionSpec& session = phase.sessions[i];
        Connection* conn = pools[session.target][i].get();
        CatalogView* catalog = targets[session.target]->catalog();
        workers.emplace_back([&, i, conn, catalog]() {
          session_results[i] =
              run_session(phase, static_cast<int>(i), phase.sessions[i], *conn, catalog, ctx, sink);
        });
      }
      for (auto& w : workers) w.join();
      ++result.phases_run;
      for (const auto& r : session_results) {
        result.statements += r.executed;
        result.failures += r.failures;
        result.skipped += r.skipped;
      }
      // The registry records the table version after every write phase (one
      // metadata probe); time-travel tasks resolve their versions from it.
      if (phase.phase_type == PhaseType::kLoad || phase.phase_type == PhaseType::kDataMaintenance) {
        CatalogView* catalog = targets[phase.sessions.front().target]->catalog();
        if (catalog && catalog->supported() && !ctx.abort_experiment.load()) {
          try {
            int64_t v = catalog->current_version(registry_table);
            ctx.version_registry[phase.id] = v;
            ctx.last_registered_version = v;
          } catch (const Error&) {
            ctx.version_registry[phase.id] = 0;
          }
        } else {
          ctx.version_registry[phase.id] = 0;
          ctx.last_registered_version = 0;
        }
      }
      for (const auto& [name, target] : targets) {
        CounterSample s;
        s.source = name;
        s.wall_time_ns = wall_now_ns();
        s.counters = target->cumulative();
        sink.sample(s);
      }
    }
  }
  result.aborted = ctx.abort_experiment.load();
  result.version_registry = ctx.version_registry;
  return result;
}

}  // namespace lsth
