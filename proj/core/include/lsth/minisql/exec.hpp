// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lsth/engine/engine.hpp"

namespace lsth {
namespace minisql {

struct ExecResult {
  int64_t row_count = 0;
  std::optional<double> scalar;
  std::vector<Row> rows;
};

// Parses and executes one statement against the engine. COPY/MERGE source
// paths are CSV files with a header row; MERGE sources may carry an `op`
// column (U = upsert, D = delete-by-key; default U).
ExecResult execute_statement(engine::Engine& eng, const std::string& sql, engine::IoContext io);

}  // namespace minisql
}  // namespace lsth
