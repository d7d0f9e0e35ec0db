// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lsth/engine/types.hpp"

namespace lsth {

// SQL text with ${name} placeholders; `variables` is exactly the set of
// placeholders occurring in raw_text.
struct StatementTemplate {
  std::string raw_text;
  std::set<std::string> variables;

  static StatementTemplate from_text(std::string text);
};

struct TaskTemplate {
  std::string name;
  std::vector<StatementTemplate> statements;  // executed in order
  std::string source_path;                    // resolved folder, "" for generated tasks
};

// Library lookup key. GENERIC is the fallback directory when no LST-specific
// template exists; resolution order is (dialect, lst) then (dialect, generic).
struct DialectKey {
  std::string dialect = "minisql";
  enum class Lst { kDeltaStyle, kIcebergStyle, kHudiStyle, kGeneric } lst = Lst::kGeneric;
};

const char* to_string(DialectKey::Lst lst);
DialectKey::Lst lst_from_string(const std::string& s);
DialectKey::Lst lst_of_layout(engine::Layout layout);

// Statement templates stored on disk as
//   <root>/<task>/<dialect>/<lst>/<NN_name>.sql
// Statements within one file are separated by top-level ';'; files resolve
// in lexicographic order. Read-only after construction.
class TaskLibrary {
 public:
  explicit TaskLibrary(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  bool has_task(const std::string& name) const;
  std::vector<std::string> task_names() const;

  // Most specific matching template. Throws TaskNotFound / EmptyTask.
  TaskTemplate resolve(const std::string& name, const DialectKey& key) const;

 private:
  std::filesystem::path root_;
};

// Replaces every ${name} with bindings.at(name). Throws MissingVariable on
// the first unbound name; the output never contains "${".
std::string substitute(const StatementTemplate& tpl,
                       const std::map<std::string, std::string>& bindings);

// Splits file text into statements at top-level ';' (quote-aware), dropping
// '--' comments and blank statements.
std::vector<std::string> split_statements(const std::string& file_text);

}  // namespace lsth
