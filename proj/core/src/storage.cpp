// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "lsth/engine/storage.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <system_error>

#include "lsth/errors.hpp"

namespace lsth {
namespace engine {

namespace fs = std::filesystem;

namespace {

std::atomic<uint64_t> g_tmp_seq{0};

fs::path temp_sibling(const fs::path& p) {
  return p.parent_path() /
         (".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(g_tmp_seq.fetch_add(1)) +
          "-" + p.filename().string());
}

void write_raw(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IOFailure("cannot write " + p.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IOFailure("short write to " + p.string());
}

}  // namespace

std::string read_file(const fs::path& p, IoContext& io) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IOFailure("cannot open " + p.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  StorageCounters d;
  d.files_opened = 1;
  d.bytes_read = static_cast<int64_t>(content.size());
  io.charge(d);
  return content;
}

void write_file(const fs::path& p, const std::string& content, IoContext& io) {
  fs::path tmp = temp_sibling(p);
  write_raw(tmp, content);
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) {
    remove_file_quiet(tmp);
    throw IOFailure("cannot rename into " + p.string() + ": " + ec.message());
  }
  StorageCounters d;
  d.files_written = 1;
  d.bytes_written = static_cast<int64_t>(content.size());
  io.charge(d);
}

bool publish_exclusive(const fs::path& p, const std::string& content, IoContext& io) {
  fs::path tmp = temp_sibling(p);
  write_raw(tmp, content);
  StorageCounters d;
  d.files_written = 1;
  d.bytes_written = static_cast<int64_t>(content.size());
  io.charge(d);
  std::error_code ec;
  fs::create_hard_link(tmp, p, ec);
  remove_file_quiet(tmp);
  if (!ec) return true;
  if (ec == std::errc::file_exists) return false;
  throw IOFailure("cannot publish " + p.string() + ": " + ec.message());
}

std::vector<std::string> list_dir(const fs::path& p, IoContext& io) {
  StorageCounters d;
  d.list_calls = 1;
  io.charge(d);
  std::vector<std::string> names;
  std::error_code ec;
  for (auto it = fs::directory_iterator(p, ec); !ec && it != fs::directory_iterator(); ++it) {
    std::string name = it->path().filename().string();
    if (!name.empty() && name[0] == '.') continue;
    names.push_back(std::move(name));
  }
  std::sort(names.begin(), names.end());
  return names;
}

void remove_file_quiet(const fs::path& p) {
  std::error_code ec;
  fs::remove(p, ec);
}

}  // namespace engine
}  // namespace lsth
