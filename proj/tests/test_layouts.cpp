// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include <unistd.h>

#include <filesystem>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "lsth/engine/engine.hpp"
#include "lsth/engine/layout.hpp"
#include "lsth/errors.hpp"

using namespace lsth;
using namespace lsth::engine;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  fs::path dir =
      fs::temp_directory_path() / ("lsth_layout_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TableDescriptor table_of(const std::string& name, Layout layout, WriteMode mode) {
  TableDescriptor d;
  d.name = name;
  d.schema = {{"k", ColumnType::kInt64}, {"v", ColumnType::kInt64}};
  d.layout = layout;
  d.write_mode = mode;
  d.key_column = "k";
  d.target_file_rows = 10;
  return d;
}

std::vector<Row> rows_range(int64_t from, int64_t to) {
  std::vector<Row> rows;
  for (int64_t k = from; k <= to; ++k) rows.push_back({Value::int64(k), Value::int64(k)});
  return rows;
}

std::string slurp(const fs::path& p) {
  IoContext uncounted;
  return read_file(p, uncounted);
}

}  // namespace

TEST_CASE("delta-style checkpoints appear every 10 commits and bound log replay") {
  fs::path dir = fresh_dir("ckpt");
  Engine eng(dir);
  IoContext io;
  eng.create_table(table_of("t", Layout::kDeltaStyle, WriteMode::kCow), io);  // v0
  for (int i = 1; i <= 25; ++i) {
    eng.load_append("t", rows_range(i, i), io);  // v1..v25
  }
  CHECK(eng.current_version("t") == 25);
  CHECK(fs::exists(dir / "t" / "meta" / checkpoint_file_name(10)));
  CHECK(fs::exists(dir / "t" / "meta" / checkpoint_file_name(20)));
  CHECK(!fs::exists(dir / "t" / "meta" / checkpoint_file_name(25)));

  // Layout rule: 1 list + checkpoint(20) + commits 21..25 = 6 opens.
  StorageCounters delta;
  IoContext counted{&delta, nullptr};
  eng.read_metadata("t", std::nullopt, counted);
  CHECK(delta.list_calls == 1);
  CHECK(delta.files_opened == 1 + 5);
}

TEST_CASE("iceberg-style reads are top metadata + manifest list + manifests") {
  fs::path dir = fresh_dir("iceberg");
  Engine eng(dir);
  IoContext io;
  eng.create_table(table_of("t", Layout::kIcebergStyle, WriteMode::kCow), io);  // v0
  eng.load_append("t", rows_range(1, 10), io);                                  // v1
  eng.load_append("t", rows_range(11, 20), io);                                 // v2
  eng.load_append("t", rows_range(21, 30), io);                                 // v3

  // Oracle: count the manifests the snapshot's manifest list actually names.
  nlohmann::json top = nlohmann::json::parse(slurp(dir / "t" / "meta" / "current.metadata"));
  CHECK(top.at("version").get<int64_t>() == 3);
  std::string list_name;
  for (const auto& s : top.at("snapshots")) {
    if (s.at("version").get<int64_t>() == 3) list_name = s.at("manifest_list");
  }
  REQUIRE(!list_name.empty());
  nlohmann::json ml = nlohmann::json::parse(slurp(dir / "t" / "meta" / list_name));
  int64_t manifest_count = static_cast<int64_t>(ml.at("manifests").size());
  CHECK(manifest_count == 3);  // one appended manifest per load

  StorageCounters delta;
  IoContext counted{&delta, nullptr};
  eng.read_metadata("t", std::nullopt, counted);
  CHECK(delta.list_calls == 0);
  CHECK(delta.files_opened == 1 + 1 + manifest_count);
}

TEST_CASE("iceberg-style manifest rewrite drops removed files") {
  fs::path dir = fresh_dir("icebergrw");
  Engine eng(dir);
  IoContext io;
  eng.create_table(table_of("t", Layout::kIcebergStyle, WriteMode::kCow), io);
  eng.load_append("t", rows_range(1, 10), io);
  eng.load_append("t", rows_range(11, 20), io);
  eng.optimize("t", io);  // removes both files, adds packed ones

  StorageCounters delta;
  IoContext counted{&delta, nullptr};
  Snapshot snap = eng.read_metadata("t", std::nullopt, counted);
  CHECK(snap.live_files.size() == 2);  // 20 rows at target 10
  // Post-optimize snapshot references only the optimize commit's manifest.
  CHECK(delta.files_opened == 1 + 1 + 1);
}

TEST_CASE("hudi-style reads are one timeline list plus the index") {
  fs::path dir = fresh_dir("hudi");
  Engine eng(dir);
  IoContext io;
  eng.create_table(table_of("t", Layout::kHudiStyle, WriteMode::kMor), io);
  eng.load_append("t", rows_range(1, 10), io);
  eng.merge("t", rows_range(3, 5), {}, io);

  StorageCounters delta;
  IoContext counted{&delta, nullptr};
  eng.read_metadata("t", std::nullopt, counted);
  CHECK(delta.list_calls == 1);
  CHECK(delta.files_opened == 1);

  // Time travel goes through the same index.
  StorageCounters delta2;
  IoContext counted2{&delta2, nullptr};
  eng.read_metadata("t", 1, counted2);
  CHECK(delta2.list_calls == 1);
  CHECK(delta2.files_opened == 1);
}

TEST_CASE("layout equivalence: identical scans, differing counters only") {
  IoContext io;
  std::multiset<std::pair<int64_t, int64_t>> reference;
  bool first = true;
  for (Layout layout : {Layout::kDeltaStyle, Layout::kIcebergStyle, Layout::kHudiStyle}) {
    for (WriteMode mode : {WriteMode::kCow, WriteMode::kMor}) {
      fs::path dir = fresh_dir(std::string("equiv_") + to_string(layout) + "_" + to_string(mode));
      Engine eng(dir);
      eng.create_table(table_of("t", layout, mode), io);
      eng.load_append("t", rows_range(1, 37), io);
      eng.merge("t", rows_range(5, 9), {Value::int64(11), Value::int64(12)}, io);
      eng.merge("t", rows_range(36, 44), {Value::int64(1)}, io);
      ScanRequest all;
      ScanResult r = eng.scan("t", all, io);
      std::multiset<std::pair<int64_t, int64_t>> got;
      for (const auto& row : r.rows) got.insert({row[0].num, row[1].num});
      if (first) {
        reference = got;
        first = false;
      } else {
        CHECK(got == reference);
      }
    }
  }
}

TEST_CASE("vacuumed versions disappear from every layout's read path") {
  IoContext io;
  for (Layout layout : {Layout::kDeltaStyle, Layout::kIcebergStyle, Layout::kHudiStyle}) {
    CAPTURE(to_string(layout));
    fs::path dir = fresh_dir(std::string("vac_") + to_string(layout));
    Engine eng(dir);
    eng.create_table(table_of("t", layout, WriteMode::kCow), io);
    eng.load_append("t", rows_range(1, 10), io);   // v1
    eng.merge("t", rows_range(2, 4), {}, io);      // v2
    eng.optimize("t", io);                         // v3
    eng.vacuum("t", 0, io);                        // v4, floor 3
    ScanRequest old;
    old.asof = 2;
    CHECK_THROWS_AS(eng.scan("t", old, io), VersionNotFound);
    ScanRequest current;
    current.agg = ScanRequest::Agg::kCount;
    CHECK(eng.scan("t", current, io).scalar == 10.0);
  }
}

TEST_CASE("degradation mechanism: mergers monotonically grow full-scan opens") {
  IoContext io;
  for (WriteMode mode : {WriteMode::kCow, WriteMode::kMor}) {
    CAPTURE(to_string(mode));
    fs::path dir = fresh_dir(std::string("grow_") + to_string(mode));
    Engine eng(dir);
    eng.create_table(table_of("t", Layout::kDeltaStyle, mode), io);
    eng.load_append("t", rows_range(1, 40), io);
    int64_t prev = -1;
    for (int i = 0; i < 5; ++i) {
      // Each merge touches existing keys and inserts a brand-new one.
      std::vector<Row> ups = rows_range(1 + i * 3, 3 + i * 3);
      ups.push_back({Value::int64(100 + i), Value::int64(100 + i)});
      eng.merge("t", ups, {}, io);
      StorageCounters delta;
      IoContext counted{&delta, nullptr};
      ScanRequest all;
      all.agg = ScanRequest::Agg::kCount;
      eng.scan("t", all, counted);
      CHECK(delta.files_opened >= prev);
      prev = delta.files_opened;
    }
  }
}

TEST_CASE("cow reads never open delta files") {
  fs::path dir = fresh_dir("cownodelta");
  Engine eng(dir);
  IoContext io;
  eng.create_table(table_of("t", Layout::kDeltaStyle, WriteMode::kCow), io);
  eng.load_append("t", rows_range(1, 30), io);
  eng.merge("t", rows_range(2, 6), {Value::int64(9)}, io);
  Snapshot snap = eng.read_metadata("t", std::nullopt, io);
  CHECK(snap.pending_delta_count() == 0);
  // No physical delta file exists anywhere for a CoW table.
  for (auto it = fs::directory_iterator(dir / "t" / "data"); it != fs::directory_iterator(); ++it) {
    CHECK(it->path().filename().string()[0] == 'f');
  }
}
