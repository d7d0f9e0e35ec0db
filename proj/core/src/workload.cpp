// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "lsth/workload.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <set>

#include "lsth/errors.hpp"
#include "lsth/generators.hpp"
#include "lsth/task_library.hpp"

namespace lsth {

const char* to_string(PhaseType t) {
  switch (t) {
    case PhaseType::kLoad:
      return "load";
    case PhaseType::kSingleUser:
      return "single_user";
    case PhaseType::kThroughput:
      return "throughput";
    case PhaseType::kDataMaintenance:
      return "data_maintenance";
    case PhaseType::kOptimize:
      return "optimize";
    case PhaseType::kTimeTravel:
      return "time_travel";
    case PhaseType::kCustom:
      return "custom";
  }
  return "?";
}

PhaseType phase_type_from_string(const std::string& s) {
  if (s == "load") return PhaseType::kLoad;
  if (s == "single_user") return PhaseType::kSingleUser;
  if (s == "throughput") return PhaseType::kThroughput;
  if (s == "data_maintenance") return PhaseType::kDataMaintenance;
  if (s == "optimize") return PhaseType::kOptimize;
  if (s == "time_travel") return PhaseType::kTimeTravel;
  if (s == "custom") return PhaseType::kCustom;
  throw ValidationError("unknown phase type: " + s);
}

namespace {

void reject_unknown_keys(const YAML::Node& map, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& kv : map) {
    std::string key = kv.first.as<std::string>();
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end()) {
      throw ValidationError("unknown key '" + key + "' in " + where);
    }
  }
}

std::map<std::string, std::string> parse_params(const YAML::Node& node, const std::string& where) {
  std::map<std::string, std::string> params;
  if (!node) return params;
  if (!node.IsMap()) throw ValidationError(where + " must be a map");
  for (const auto& kv : node) {
    params[kv.first.as<std::string>()] = kv.second.as<std::string>();
  }
  return params;
}

TaskRef parse_task(const YAML::Node& node, const std::string& where) {
  if (!node.IsMap()) throw ValidationError(where + " must be a map");
  reject_unknown_keys(node, {"task", "generator", "params", "permutation_seed"}, where);
  TaskRef ref;
  if (node["task"]) ref.task_name = node["task"].as<std::string>();
  if (node["generator"]) {
    const YAML::Node& g = node["generator"];
    if (!g.IsMap()) throw ValidationError(where + ".generator must be a map");
    reject_unknown_keys(g, {"name", "params"}, where + ".generator");
    GeneratorRef gen;
    if (!g["name"]) throw ValidationError(where + ".generator needs a name");
    gen.name = g["name"].as<std::string>();
    gen.params = parse_params(g["params"], where + ".generator.params");
    ref.generator = std::move(gen);
  }
  ref.params = parse_params(node["params"], where + ".params");
  if (node["permutation_seed"]) ref.permutation_seed = node["permutation_seed"].as<int64_t>();
  return ref;
}

}  // namespace

WorkloadSpec parse_workload(const std::string& document, const TaskLibrary* library,
                            const GeneratorRegistry* generators) {
  YAML::Node root;
  try {
    root = YAML::Load(document);
  } catch (const YAML::Exception& e) {
    throw SyntaxError(std::string("malformed workload document: ") + e.what());
  }
  if (!root.IsMap()) throw SyntaxError("workload document must be a map");
  reject_unknown_keys(root, {"id", "params", "phases"}, "workload");

  WorkloadSpec spec;
  if (!root["id"]) throw ValidationError("workload needs an id");
  spec.id = root["id"].as<std::string>();
  spec.params = parse_params(root["params"], "workload.params");

  if (!root["phases"] || !root["phases"].IsSequence()) {
    throw ValidationError("workload needs a phases list");
  }
  for (const auto& pn : root["phases"]) {
    if (!pn.IsMap()) throw ValidationError("phase must be a map");
    reject_unknown_keys(pn, {"id", "type", "sessions"}, "phase");
    PhaseSpec phase;
    if (!pn["id"]) throw ValidationError("phase needs an id");
    phase.id = pn["id"].as<std::string>();
    if (!pn["type"]) throw ValidationError("phase '" + phase.id + "' needs a type");
    phase.phase_type = phase_type_from_string(pn["type"].as<std::string>());
    if (pn["sessions"]) {
      if (!pn["sessions"].IsSequence()) {
        throw ValidationError("phase '" + phase.id + "' sessions must be a list");
      }
      for (const auto& sn : pn["sessions"]) {
        if (!sn.IsMap()) throw ValidationError("session must be a map");
        reject_unknown_keys(sn, {"target", "tasks"}, "session in phase '" + phase.id + "'");
        SessionSpec session;
        if (sn["target"]) session.target = sn["target"].as<std::string>();
        if (sn["tasks"]) {
          if (!sn["tasks"].IsSequence()) throw ValidationError("session tasks must be a list");
          int i = 0;
          for (const auto& tn : sn["tasks"]) {
            session.tasks.push_back(
                parse_task(tn, "task[" + std::to_string(i++) + "] in phase '" + phase.id + "'"));
          }
        }
        phase.sessions.push_back(std::move(session));
      }
    }
    spec.phases.push_back(std::move(phase));
  }

  validate_workload(spec, library, generators);
  return spec;
}

void validate_workload(const WorkloadSpec& spec, const TaskLibrary* library,
                       const GeneratorRegistry* generators) {
  if (spec.id.empty()) throw ValidationError("workload id is empty");
  if (spec.phases.empty()) throw ValidationError("workload has no phases");
  std::set<std::string> ids;
  for (const auto& phase : spec.phases) {
    if (!ids.insert(phase.id).second) {
      throw ValidationError("duplicate phase id '" + phase.id + "'");
    }
    if (phase.sessions.empty()) {
      throw ValidationError("phase '" + phase.id + "' has no sessions");
    }
    for (const auto& session : phase.sessions) {
      for (const auto& task : session.tasks) {
        bool has_name = !task.task_name.empty();
        bool has_gen = task.generator.has_value();
        if (has_name == has_gen) {
          throw ValidationError("task in phase '" + phase.id +
                                "' must name exactly one of task or generator");
        }
        if (has_name && library && !library->has_task(task.task_name)) {
          throw ValidationError("task '" + task.task_name + "' not found in library");
        }
        if (has_gen && generators && !generators->contains(task.generator->name)) {
          throw ValidationError("generator '" + task.generator->name + "' is not registered");
        }
      }
    }
  }
}

std::string serialize_workload(const WorkloadSpec& spec) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "id" << YAML::Value << spec.id;
  if (!spec.params.empty()) {
    out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : spec.params) out << YAML::Key << k << YAML::Value << v;
    out << YAML::EndMap;
  }
  out << YAML::Key << "phases" << YAML::Value << YAML::BeginSeq;
  for (const auto& phase : spec.phases) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << phase.id;
    out << YAML::Key << "type" << YAML::Value << to_string(phase.phase_type);
    out << YAML::Key << "sessions" << YAML::Value << YAML::BeginSeq;
    for (const auto& session : phase.sessions) {
      out << YAML::BeginMap;
      out << YAML::Key << "target" << YAML::Value << session.target;
      out << YAML::Key << "tasks" << YAML::Value << YAML::BeginSeq;
      for (const auto& task : session.tasks) {
        out << YAML::BeginMap;
        if (!task.task_name.empty()) {
          out << YAML::Key << "task" << YAML::Value << task.task_name;
        }
        if (task.generator) {
          out << YAML::Key << "generator" << YAML::Value << YAML::BeginMap;
          out << YAML::Key << "name" << YAML::Value << task.generator->name;
          if (!task.generator->params.empty()) {
            out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
            for (const auto& [k, v] : task.generator->params) {
              out << YAML::Key << k << YAML::Value << v;
            }
            out << YAML::EndMap;
          }
          out << YAML::EndMap;
        }
        if (!task.params.empty()) {
          out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
          for (const auto& [k, v] : task.params) out << YAML::Key << k << YAML::Value << v;
          out << YAML::EndMap;
        }
        if (task.permutation_seed) {
          out << YAML::Key << "permutation_seed" << YAML::Value << *task.permutation_seed;
        }
        out << YAML::EndMap;
      }
      out << YAML::EndSeq;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

int max_concurrency(const WorkloadSpec& spec) {
  size_t mx = 0;
  for (const auto& phase : spec.phases) mx = std::max(mx, phase.sessions.size());
  return static_cast<int>(mx);
}

}  // namespace lsth
