// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "lsth/generators.hpp"

#include <filesystem>
#include <fstream>

#include "lsth/csv.hpp"
#include "lsth/errors.hpp"

namespace lsth {

namespace fs = std::filesystem;

void GeneratorRegistry::register_generator(const std::string& name, GeneratorFn fn) {
  generators_[name] = std::move(fn);
}

bool GeneratorRegistry::contains(const std::string& name) const {
  return generators_.count(name) > 0;
}

std::vector<TaskTemplate> GeneratorRegistry::expand(const GeneratorRef& ref,
                                                    CatalogView* catalog) const {
  auto it = generators_.find(ref.name);
  if (it == generators_.end()) {
    throw GeneratorNotFound("generator '" + ref.name + "' is not registered");
  }
  if (!catalog || !catalog->supported()) {
    throw GeneratorError("generator '" + ref.name +
                         "' disabled: target has no catalog introspection");
  }
  try {
    return it->second(ref, *catalog);
  } catch (const GeneratorError&) {
    throw;
  } catch (const Error& e) {
    throw GeneratorError("generator '" + ref.name + "' failed: " + e.what());
  }
}

GeneratorRegistry GeneratorRegistry::with_builtins() {
  GeneratorRegistry reg;
  reg.register_generator("batched_dm", batched_dm_generator);
  return reg;
}

std::vector<TaskTemplate> batched_dm_generator(const GeneratorRef& ref, CatalogView& catalog) {
  (void)catalog;
  auto param = [&](const char* name) -> const std::string& {
    auto it = ref.params.find(name);
    if (it == ref.params.end()) {
      throw GeneratorError(std::string("batched_dm needs param '") + name + "'");
    }
    return it->second;
  };
  const std::string& table = param("table");
  const std::string& source = param("source");
  int64_t batch_rows = 0;
  try {
    batch_rows = std::stoll(param("batch_rows"));
  } catch (const std::exception&) {
    throw GeneratorError("batched_dm param 'batch_rows' must be an integer");
  }
  if (batch_rows < 1) throw GeneratorError("batched_dm param 'batch_rows' must be >= 1");

  std::ifstream in(source, std::ios::binary);
  if (!in) throw GeneratorError("batched_dm cannot open source '" + source + "'");
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto records = csv::parse(content);
  if (records.empty()) throw GeneratorError("batched_dm source '" + source + "' has no header");
  const auto& header = records.front();
  int64_t data_rows = static_cast<int64_t>(records.size()) - 1;
  std::vector<TaskTemplate> tasks;
  if (data_rows == 0) return tasks;

  fs::path src(source);
  std::string stem = (src.parent_path() / src.stem()).string();
  int64_t batch_count = (data_rows + batch_rows - 1) / batch_rows;
  for (int64_t b = 0; b < batch_count; ++b) {
    std::string slice_path = stem + ".batch" + std::to_string(b + 1) + ".csv";
    std::ofstream out(slice_path, std::ios::binary | std::ios::trunc);
    if (!out) throw GeneratorError("batched_dm cannot write slice '" + slice_path + "'");
    std::vector<std::string> fields(header.begin(), header.end());
    out << csv::encode_record(fields);
    int64_t lo = 1 + b * batch_rows;
    int64_t hi = std::min<int64_t>(static_cast<int64_t>(records.size()) - 1, lo + batch_rows - 1);
    for (int64_t r = lo; r <= hi; ++r) {
      fields.assign(records[static_cast<size_t>(r)].begin(), records[static_cast<size_t>(r)].end());
      out << csv::encode_record(fields);
    }
    out.close();
    TaskTemplate task;
    task.name = ref.name + "_" + std::to_string(b + 1);
    task.statements.push_back(
        StatementTemplate::from_text("MERGE INTO " + table + " USING '" + slice_path + "'"));
    tasks.push_back(std::move(task));
  }
  return tasks;
}

}  // namespace lsth
