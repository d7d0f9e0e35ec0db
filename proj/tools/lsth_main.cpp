// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "lsth/datagen.hpp"
#include "lsth/errors.hpp"
#include "lsth/executor.hpp"
#include "lsth/metrics.hpp"
#include "lsth/packages.hpp"
#include "lsth/task_library.hpp"
#include "lsth/telemetry.hpp"
#include "lsth/timeutil.hpp"
#include "lsth/workload.hpp"

namespace fs = std::filesystem;
using namespace lsth;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitExecution = 2;

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IOFailure("cannot open " + p.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::string default_output_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("LSTH_OUTPUT_DIR"); env && *env) return env;
  return "";
}

std::map<std::string, ConnectionSpec> parse_targets_file(const fs::path& p) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(p.string());
  } catch (const YAML::Exception& e) {
    throw ConfigError("malformed targets file: " + std::string(e.what()));
  }
  if (!root.IsMap() || !root["targets"] || !root["targets"].IsMap()) {
    throw ConfigError("targets file needs a top-level 'targets' map");
  }
  std::map<std::string, ConnectionSpec> out;
  for (const auto& kv : root["targets"]) {
    ConnectionSpec spec;
    const YAML::Node& node = kv.second;
    if (!node.IsMap() || !node["kind"]) {
      throw ConfigError("target '" + kv.first.as<std::string>() + "' needs a kind");
    }
    spec.kind = target_kind_from_string(node["kind"].as<std::string>());
    if (node["storage_root"]) spec.storage_root = node["storage_root"].as<std::string>();
    if (node["options"] && node["options"].IsMap()) {
      for (const auto& opt : node["options"]) {
        spec.options[opt.first.as<std::string>()] = opt.second.as<std::string>();
      }
    }
    out[kv.first.as<std::string>()] = std::move(spec);
  }
  return out;
}

void print_phase_plan(const WorkloadSpec& spec) {
  std::cout << "workload " << spec.id << ": " << spec.phases.size() << " phases, max concurrency "
            << max_concurrency(spec) << "\n";
  int i = 0;
  for (const auto& phase : spec.phases) {
    std::cout << "  " << ++i << ". " << phase.id << " [" << to_string(phase.phase_type) << "] "
              << phase.sessions.size() << " session(s):";
    for (const auto& session : phase.sessions) {
      std::cout << " [";
      for (size_t t = 0; t < session.tasks.size(); ++t) {
        const TaskRef& ref = session.tasks[t];
        std::cout << (t ? " " : "")
                  << (ref.generator ? ref.generator->name + "()" : ref.task_name);
      }
      std::cout << "]@" << session.target;
    }
    std::cout << "\n";
  }
}

std::map<std::string, std::string> parse_kv_flags(const std::vector<std::string>& kvs) {
  std::map<std::string, std::string> out;
  for (const auto& kv : kvs) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--param expects key=value, got '" + kv + "'");
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

int cmd_validate(const std::string& workload_file, const std::string& library_root) {
  try {
    TaskLibrary library{library_root};
    GeneratorRegistry generators = GeneratorRegistry::with_builtins();
    WorkloadSpec spec = parse_workload(read_text(workload_file), &library, &generators);
    print_phase_plan(spec);
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "validation failed: " << e.what() << "\n";
    return kExitValidation;
  }
}

int cmd_datagen(const std::string& out_dir, int64_t rows, uint64_t seed, int refreshes,
                double fraction) {
  try {
    datagen::GenSpec spec;
    spec.scale_rows = rows;
    spec.seed = seed;
    spec.refresh_count = refreshes;
    spec.refresh_fraction = fraction;
    spec.validate();
    fs::path dir(out_dir);
    datagen::GenManifest manifest = datagen::generate_base(spec, dir);
    datagen::append_manifest_json(manifest, dir / "manifest.json");
    for (int i = 1; i <= refreshes; ++i) {
      datagen::append_manifest_json(datagen::generate_refresh(spec, i, dir),
                                    dir / "manifest.json");
    }
    std::cout << "wrote base tables and " << refreshes << " refresh stream(s) to " << out_dir
              << "\n";
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "datagen failed: " << e.what() << "\n";
    return kExitExecution;
  }
}

int cmd_run(std::string workload_file, const std::string& package_name,
            const std::string& targets_file, std::string out_dir, const std::string& library_root,
            const std::string& data_dir, const std::string& lst_name, int streams, int iterations,
            const std::vector<std::string>& params, const std::string& experiment_id,
            const std::string& failure_policy, int repetitions) {
  out_dir = default_output_dir(out_dir);
  if (out_dir.empty()) {
    std::cerr << "run needs -o/--output (or LSTH_OUTPUT_DIR)\n";
    return kExitValidation;
  }
  WorkloadSpec spec;
  TaskLibrary library{library_root};
  GeneratorRegistry generators = GeneratorRegistry::with_builtins();
  try {
    if (!package_name.empty()) {
      PackageConfig pkg;
      pkg.streams = streams;
      pkg.iterations = iterations;
      pkg.data_dir = data_dir;
      pkg.params["data_dir"] = data_dir;
      pkg.params["fact_table"] = "fact";
      pkg.params["dim1_table"] = "dim1";
      pkg.params["dim2_table"] = "dim2";
      pkg.params["write_mode"] = "cow";
      pkg.params["target_file_rows"] = "100";
      for (const auto& [k, v] : parse_kv_flags(params)) pkg.params[k] = v;
      spec = build_package(package_from_string(package_name), pkg);
      // Materialize the expanded package so the run is reproducible from the
      // output directory alone.
      fs::create_directories(out_dir);
      std::ofstream materialized(fs::path(out_dir) / "workload.yaml", std::ios::trunc);
      materialized << serialize_workload(spec);
      workload_file = (fs::path(out_dir) / "workload.yaml").string();
    } else if (!workload_file.empty()) {
      spec = parse_workload(read_text(workload_file), &library, &generators);
    } else {
      std::cerr << "run needs -w/--workload or --package\n";
      return kExitValidation;
    }
  } catch (const Error& e) {
    std::cerr << "workload error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    ExperimentConfig cfg;
    cfg.experiment_id = experiment_id.empty() ? spec.id + "-" + std::to_string(wall_now_ns() / 1000000)
                                              : experiment_id;
    cfg.targets = parse_targets_file(targets_file);
    cfg.globals = parse_kv_flags(params);
    cfg.failure_policy = failure_policy_from_string(failure_policy);
    cfg.repetitions = repetitions;
    cfg.dialect.dialect = "minisql";
    cfg.dialect.lst = lst_from_string(lst_name);

    JsonlTelemetry sink{fs::path(out_dir)};
    ExperimentResult result = run_experiment(spec, cfg, library, generators, sink);
    std::cout << "experiment " << cfg.experiment_id << ": " << result.phases_run << " phases, "
              << result.statements << " statements, " << result.failures << " failures, "
              << result.skipped << " skipped\n";
    std::cout << "telemetry: " << (fs::path(out_dir) / "events.jsonl").string() << "\n";
    if (result.aborted || result.failures > 0) {
      std::cerr << "experiment finished with failures\n";
      return kExitExecution;
    }
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "execution failed: " << e.what() << "\n";
    return kExitExecution;
  }
}

int cmd_report(const std::string& in_dir, std::string out_dir) {
  out_dir = default_output_dir(out_dir);
  if (out_dir.empty()) out_dir = in_dir;
  try {
    LoadedTelemetry telemetry = load_telemetry_dir(in_dir, /*strict=*/false);
    for (const auto& diag : telemetry.diagnostics) std::cerr << "warning: " << diag << "\n";
    std::vector<PhaseAggregate> aggregates = aggregate_phases(telemetry.events);
    std::vector<MetricSeries> series = series_by_phase_type(telemetry.events);
    std::vector<SdrCell> sdr = sdr_table(series);
    emit_report(aggregates, series, sdr, out_dir);
    std::cout << "report written to " << (fs::path(out_dir) / "report.md").string() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "report failed: " << e.what() << "\n";
    return kExitExecution;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"benchmark harness for log-structured tables"};
  app.require_subcommand(1);

  std::string workload_file, library_root = "library", out_dir, targets_file, package_name;
  std::string data_dir = "data", lst_name = "delta", experiment_id;
  std::string failure_policy = "abort_experiment";
  std::vector<std::string> params;
  int64_t rows = 1000;
  uint64_t seed = 1;
  int refreshes = 5, streams = 2, iterations = 2, repetitions = 1;
  double fraction = 0.1;
  std::string report_in;

  CLI::App* validate = app.add_subcommand("validate", "parse a workload and print its phase plan");
  validate->add_option("-w,--workload", workload_file, "workload YAML file")->required();
  validate->add_option("--library", library_root, "task library root");

  CLI::App* dg = app.add_subcommand("datagen", "generate the synthetic star schema");
  dg->add_option("-o,--output", out_dir, "output directory")->required();
  dg->add_option("--rows", rows, "fact rows");
  dg->add_option("--seed", seed, "generator seed");
  dg->add_option("--refreshes", refreshes, "refresh stream count");
  dg->add_option("--fraction", fraction, "refresh fraction of base keys");

  CLI::App* run = app.add_subcommand("run", "execute a workload and record telemetry");
  run->add_option("-w,--workload", workload_file, "workload YAML file");
  run->add_option("--package", package_name, "built-in package (W0, W1, W2, W3, W3_MULTI, W4)");
  run->add_option("-t,--targets", targets_file, "targets YAML file")->required();
  run->add_option("-o,--output", out_dir, "output directory (default: $LSTH_OUTPUT_DIR)");
  run->add_option("--library", library_root, "task library root");
  run->add_option("--data", data_dir, "datagen directory consumed by load/merge tasks");
  run->add_option("--lst", lst_name, "LST under test: delta, iceberg or hudi");
  run->add_option("--streams", streams, "throughput streams (packages)");
  run->add_option("--iterations", iterations, "maintenance iterations (packages)");
  run->add_option("--param", params, "variable override key=value (repeatable)");
  run->add_option("--id", experiment_id, "experiment id");
  run->add_option("--failure-policy", failure_policy,
                  "abort_experiment, abort_session or continue");
  run->add_option("--repeat", repetitions, "repeat the whole phase sequence N times");

  CLI::App* report = app.add_subcommand("report", "compute metrics from recorded telemetry");
  report->add_option("-i,--input", report_in, "experiment output directory")->required();
  report->add_option("-o,--output", out_dir, "report directory (default: input dir)");

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return cmd_validate(workload_file, library_root);
  if (dg->parsed()) return cmd_datagen(out_dir, rows, seed, refreshes, fraction);
  if (run->parsed()) {
    return cmd_run(workload_file, package_name, targets_file, out_dir, library_root, data_dir,
                   lst_name, streams, iterations, params, experiment_id, failure_policy,
                   repetitions);
  }
  if (report->parsed()) return cmd_report(report_in, out_dir);
  return kExitValidation;
}
