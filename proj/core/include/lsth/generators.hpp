// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lsth/connector.hpp"
#include "lsth/task_library.hpp"
#include "lsth/workload.hpp"

namespace lsth {

// Parameterized custom tasks: user code that expands one workload entry into
// concrete tasks at run time, based on the data. Generators receive the
// target's catalog; targets whose catalog is unsupported disable generators.
class GeneratorRegistry {
 public:
  using GeneratorFn =
      std::function<std::vector<TaskTemplate>(const GeneratorRef&, CatalogView&)>;

  void register_generator(const std::string& name, GeneratorFn fn);
  bool contains(const std::string& name) const;

  // Throws GeneratorNotFound for unknown names and GeneratorError when the
  // catalog is unsupported or the generator itself fails.
  std::vector<TaskTemplate> expand(const GeneratorRef&, CatalogView* catalog) const;

  // Registry with the built-in generators (currently `batched_dm`).
  static GeneratorRegistry with_builtins();

 private:
  std::map<std::string, GeneratorFn> generators_;
};

// Built-in: splits a data-maintenance source CSV of R data rows into
// ceil(R/n) MERGE tasks of at most n rows each, writing one slice file per
// task next to the source. Params: `table`, `source`, `batch_rows`.
std::vector<TaskTemplate> batched_dm_generator(const GeneratorRef&, CatalogView&);

}  // namespace lsth
