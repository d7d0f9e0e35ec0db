// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "lsth/task_library.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "lsth/errors.hpp"

namespace lsth {

namespace fs = std::filesystem;

namespace {

bool is_var_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_var_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Finds ${name} at text[pos]; returns the name or empty if not a placeholder.
std::string placeholder_at(const std::string& text, size_t pos, size_t* end) {
  if (pos + 2 >= text.size() || text[pos] != '$' || text[pos + 1] != '{') return {};
  size_t i = pos + 2;
  if (!is_var_start(text[i])) return {};
  size_t start = i;
  while (i < text.size() && is_var_char(text[i])) ++i;
  if (i >= text.size() || text[i] != '}') return {};
  *end = i + 1;
  return text.substr(start, i - start);
}

std::string read_text_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IOFailure("cannot open " + p.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

StatementTemplate StatementTemplate::from_text(std::string text) {
  StatementTemplate tpl;
  tpl.raw_text = std::move(text);
  for (size_t i = 0; i + 1 < tpl.raw_text.size(); ++i) {
    size_t end = 0;
    std::string name = placeholder_at(tpl.raw_text, i, &end);
    if (!name.empty()) {
      tpl.variables.insert(std::move(name));
      i = end - 1;
    }
  }
  return tpl;
}

const char* to_string(DialectKey::Lst lst) {
  switch (lst) {
    case DialectKey::Lst::kDeltaStyle:
      return "delta_style";
    case DialectKey::Lst::kIcebergStyle:
      return "iceberg_style";
    case DialectKey::Lst::kHudiStyle:
      return "hudi_style";
    case DialectKey::Lst::kGeneric:
      return "generic";
  }
  return "?";
}

DialectKey::Lst lst_from_string(const std::string& s) {
  if (s == "delta_style" || s == "delta") return DialectKey::Lst::kDeltaStyle;
  if (s == "iceberg_style" || s == "iceberg") return DialectKey::Lst::kIcebergStyle;
  if (s == "hudi_style" || s == "hudi") return DialectKey::Lst::kHudiStyle;
  if (s == "generic") return DialectKey::Lst::kGeneric;
  throw ConfigError("unknown lst: " + s);
}

DialectKey::Lst lst_of_layout(engine::Layout layout) {
  switch (layout) {
    case engine::Layout::kDeltaStyle:
      return DialectKey::Lst::kDeltaStyle;
    case engine::Layout::kIcebergStyle:
      return DialectKey::Lst::kIcebergStyle;
    case engine::Layout::kHudiStyle:
      return DialectKey::Lst::kHudiStyle;
  }
  return DialectKey::Lst::kGeneric;
}

TaskLibrary::TaskLibrary(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  if (!fs::is_directory(root_, ec)) {
    throw IOFailure("task library root does not exist: " + root_.string());
  }
}

bool TaskLibrary::has_task(const std::string& name) const {
  std::error_code ec;
  return fs::is_directory(root_ / name, ec);
}

std::vector<std::string> TaskLibrary::task_names() const {
  std::vector<std::string> names;
  std::error_code ec;
  for (auto it = fs::directory_iterator(root_, ec); !ec && it != fs::directory_iterator(); ++it) {
    if (it->is_directory()) names.push_back(it->path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

TaskTemplate TaskLibrary::resolve(const std::string& name, const DialectKey& key) const {
  if (!has_task(name)) throw TaskNotFound("task '" + name + "' not in library " + root_.string());
  std::vector<fs::path> candidates;
  candidates.push_back(root_ / name / key.dialect / to_string(key.lst));
  if (key.lst != DialectKey::Lst::kGeneric) {
    candidates.push_back(root_ / name / key.dialect / "generic");
  }
  std::error_code ec;
  for (const auto& dir : candidates) {
    if (!fs::is_directory(dir, ec)) continue;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".sql") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    TaskTemplate task;
    task.name = name;
    task.source_path = dir.string();
    for (const auto& file : files) {
      for (auto& text : split_statements(read_text_file(file))) {
        task.statements.push_back(StatementTemplate::from_text(std::move(text)));
      }
    }
    if (task.statements.empty()) continue;  // empty dir: keep falling back
    return task;
  }
  // The task folder exists but no candidate directory yielded statements.
  throw EmptyTask("task '" + name + "' has no statements for dialect " + key.dialect + "/" +
                  to_string(key.lst));
}

std::string substitute(const StatementTemplate& tpl,
                       const std::map<std::string, std::string>& bindings) {
  std::string out;
  out.reserve(tpl.raw_text.size());
  const std::string& text = tpl.raw_text;
  for (size_t i = 0; i < text.size(); ++i) {
    size_t end = 0;
    std::string name = placeholder_at(text, i, &end);
    if (name.empty()) {
      out += text[i];
      continue;
    }
    auto it = bindings.find(name);
    if (it == bindings.end()) throw MissingVariable(name);
    out += it->second;
    i = end - 1;
  }
  // Fail fast rather than hand the engine text with live placeholders (a
  // binding value could smuggle one in).
  size_t leftover = out.find("${");
  if (leftover != std::string::npos) {
    size_t end = 0;
    std::string name = placeholder_at(out, leftover, &end);
    throw MissingVariable(name.empty() ? "?" : name);
  }
  return out;
}

std::vector<std::string> split_statements(const std::string& file_text) {
  std::vector<std::string> out;
  std::string cur;
  bool in_string = false;
  for (size_t i = 0; i < file_text.size(); ++i) {
    char c = file_text[i];
    if (in_string) {
      cur += c;
      if (c == '\'') in_string = false;
      continue;
    }
    if (c == '\'') {
      in_string = true;
      cur += c;
      continue;
    }
    if (c == '-' && i + 1 < file_text.size() && file_text[i + 1] == '-') {
      while (i < file_text.size() && file_text[i] != '\n') ++i;
      cur += '\n';
      continue;
    }
    if (c == ';') {
      out.push_back(cur);
      cur.clear();
      continue;
    }
    cur += c;
  }
  out.push_back(cur);
  std::vector<std::string> trimmed;
  for (auto& stmt : out) {
    size_t a = stmt.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) continue;
    size_t b = stmt.find_last_not_of(" \t\r\n");
    trimmed.push_back(stmt.substr(a, b - a + 1));
  }
  return trimmed;
}

}  // namespace lsth
