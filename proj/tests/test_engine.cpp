// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "doctest.h"
#include "lsth/engine/engine.hpp"
#include "lsth/engine/layout.hpp"
#include "lsth/errors.hpp"

using namespace lsth;
using namespace lsth::engine;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  fs::path dir =
      fs::temp_directory_path() / ("lsth_engine_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TableDescriptor small_table(const std::string& name, Layout layout, WriteMode mode,
                            int64_t target_rows) {
  TableDescriptor d;
  d.name = name;
  d.schema = {{"k", ColumnType::kInt64}, {"v", ColumnType::kInt64}};
  d.layout = layout;
  d.write_mode = mode;
  d.key_column = "k";
  d.target_file_rows = target_rows;
  return d;
}

std::vector<Row> make_rows(int64_t from, int64_t to, int64_t v_offset = 0) {
  std::vector<Row> rows;
  for (int64_t k = from; k <= to; ++k) {
    rows.push_back({Value::int64(k), Value::int64(k * 10 + v_offset)});
  }
  return rows;
}

// Independent row-multiset oracle: sorted (k, v) pairs.
std::multiset<std::pair<int64_t, int64_t>> multiset_of(const ScanResult& r) {
  std::multiset<std::pair<int64_t, int64_t>> out;
  for (const auto& row : r.rows) out.insert({row[0].num, row[1].num});
  return out;
}

}  // namespace

TEST_CASE("load_append packs rows into target-sized files") {
  fs::path dir = fresh_dir("pack");
  Engine eng(dir);
  IoContext io;
  eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kCow, 40), io);
  Snapshot snap = eng.load_append("t", make_rows(1, 100), io);
  CHECK(snap.version == 1);
  REQUIRE(snap.live_files.size() == 3);
  std::vector<int64_t> sizes;
  for (const auto& [_, f] : snap.live_files) sizes.push_back(f.row_count);
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<int64_t>{20, 40, 40});
}

TEST_CASE("file stats bound the contained key values") {
  fs::path dir = fresh_dir("stats");
  Engine eng(dir);
  IoContext io;
  eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kCow, 40), io);
  Snapshot snap = eng.load_append("t", make_rows(1, 100), io);
  // Oracle: rescan each file's rows and compare to the recorded stats.
  for (const auto& [_, f] : snap.live_files) {
    ScanRequest req;
    req.predicate = Predicate{"k", Predicate::Op::kBetween, f.stats.min_max[0].first,
                              f.stats.min_max[0].second};
    ScanResult rows = eng.scan("t", req, io);
    int64_t mn = rows.rows.front()[0].num, mx = rows.rows.front()[0].num;
    for (const auto& r : rows.rows) {
      mn = std::min(mn, r[0].num);
      mx = std::max(mx, r[0].num);
    }
    CHECK(f.stats.min_max[0].first.num <= mn);
    CHECK(f.stats.min_max[0].second.num >= mx);
    CHECK(f.row_count >= 1);
  }
}

TEST_CASE("empty append still advances the version") {
  fs::path dir = fresh_dir("empty");
  Engine eng(dir);
  IoContext io;
  eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kCow, 40), io);
  CHECK(eng.current_version("t") == 0);
  Snapshot snap = eng.load_append("t", {}, io);
  CHECK(snap.version == 1);
  CHECK(snap.live_files.empty());
}

TEST_CASE("scan counts and predicate pruning") {
  fs::path dir = fresh_dir("prune");
  Engine eng(dir);
  IoContext io;
  eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kCow, 40), io);
  eng.load_append("t", make_rows(1, 100), io);

  ScanRequest count_all;
  count_all.agg = ScanRequest::Agg::kCount;
  ScanResult r = eng.scan("t", count_all, io);
  CHECK(r.row_count == 1);
  CHECK(r.scalar == 100.0);

  // Pruning oracle: with files of keys [1..40],[41..80],[81..100], the point
  // query k=5 must open exactly one data file. Metadata opens for a
  // delta-style read at v1 are the two commit files.
  StorageCounters delta;
  IoContext counted{&delta, nullptr};
  ScanRequest point;
  point.agg = ScanRequest::Agg::kCount;
  point.predicate = Predicate{"k", Predicate::Op::kEq, Value::int64(5), {}};
  r = eng.scan("t", point, counted);
  CHECK(r.scalar == 1.0);
  CHECK(delta.list_calls == 1);
  CHECK(delta.files_opened == 2 + 1);  // commits v0,v1 + one data file
}

TEST_CASE("cow merge rewrites affected files, mor attaches deltas") {
  IoContext io;
  SUBCASE("cow: delete one key rewrites the file without it") {
    fs::path dir = fresh_dir("cow");
    Engine eng(dir);
    eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kCow, 10), io);
    eng.load_append("t", make_rows(1, 10), io);
    Snapshot before = eng.read_metadata("t", std::nullopt, io);
    REQUIRE(before.live_files.size() == 1);
    std::string old_id = before.live_files.begin()->first;

    Snapshot after = eng.merge("t", {}, {Value::int64(5)}, io);
    REQUIRE(after.live_files.size() == 1);
    CHECK(after.live_files.begin()->first != old_id);
    CHECK(after.live_files.begin()->second.row_count == 9);
    CHECK(after.pending_deltas.empty());

    ScanRequest all;
    ScanResult rows = eng.scan("t", all, io);
    CHECK(rows.row_count == 9);
    for (const auto& row : rows.rows) CHECK(row[0].num != 5);
  }
  SUBCASE("mor: base file retained, one delta with the deleted key") {
    fs::path dir = fresh_dir("mor");
    Engine eng(dir);
    eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kMor, 10), io);
    eng.load_append("t", make_rows(1, 10), io);
    Snapshot before = eng.read_metadata("t", std::nullopt, io);
    std::string base_id = before.live_files.begin()->first;

    Snapshot after = eng.merge("t", {}, {Value::int64(5)}, io);
    REQUIRE(after.live_files.size() == 1);
    CHECK(after.live_files.begin()->first == base_id);
    REQUIRE(after.pending_deltas.count(base_id) == 1);
    REQUIRE(after.pending_deltas.at(base_id).size() == 1);
    const DeltaFile& d = after.pending_deltas.at(base_id)[0];
    REQUIRE(d.deleted_keys.size() == 1);
    CHECK(d.deleted_keys[0].num == 5);
    CHECK(d.upsert_count == 0);

    ScanRequest all;
    ScanResult rows = eng.scan("t", all, io);
    CHECK(rows.row_count == 9);
  }
}

TEST_CASE("mor scan opens base plus exactly its pending deltas") {
  fs::path dir = fresh_dir("morcount");
  Engine eng(dir);
  IoContext io;
  eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kMor, 100), io);
  eng.load_append("t", make_rows(1, 100), io);  // one base file
  eng.merge("t", make_rows(1, 3, 7), {}, io);   // delta 1
  eng.merge("t", make_rows(4, 5, 9), {}, io);   // delta 2

  // Counting oracle: full scan = 1 list + commits v0..v3 + 1 base + 2 deltas.
  StorageCounters delta;
  IoContext counted{&delta, nullptr};
  ScanRequest all;
  all.agg = ScanRequest::Agg::kCount;
  ScanResult r = eng.scan("t", all, counted);
  CHECK(r.scalar == 100.0);
  CHECK(delta.list_calls == 1);
  CHECK(delta.files_opened == 4 + 1 + 2);
}

TEST_CASE("merge routes unmatched upserts to new files and updates rows") {
  fs::path dir = fresh_dir("upsert");
  Engine eng(dir);
  IoContext io;
  eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kCow, 50), io);
  eng.load_append("t", make_rows(1, 50), io);

  std::vector<Row> upserts = make_rows(48, 52, 5);  // 48..50 exist, 51..52 are new
  Snapshot after = eng.merge("t", upserts, {}, io);
  CHECK(after.live_files.size() == 2);

  ScanRequest all;
  ScanResult rows = eng.scan("t", all, io);
  auto got = multiset_of(rows);
  std::multiset<std::pair<int64_t, int64_t>> want;
  for (int64_t k = 1; k <= 47; ++k) want.insert({k, k * 10});
  for (int64_t k = 48; k <= 52; ++k) want.insert({k, k * 10 + 5});
  CHECK(got == want);
}

TEST_CASE("a key in both upsert and delete sets is deleted") {
  fs::path dir = fresh_dir("updel");
  Engine eng(dir);
  IoContext io;
  eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kMor, 50), io);
  eng.load_append("t", make_rows(1, 10), io);
  eng.merge("t", make_rows(5, 5, 3), {Value::int64(5)}, io);
  ScanRequest all;
  ScanResult rows = eng.scan("t", all, io);
  CHECK(rows.row_count == 9);
  for (const auto& row : rows.rows) CHECK(row[0].num != 5);
}

TEST_CASE("optimize consolidates small files and clears deltas") {
  IoContext io;
  SUBCASE("4 files of 25 rows pack into 1 of 100") {
    fs::path dir = fresh_dir("opt1");
    Engine eng(dir);
    eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kCow, 100), io);
    for (int i = 0; i < 4; ++i) {
      eng.load_append("t", make_rows(1 + i * 25, 25 + i * 25), io);
    }
    CHECK(eng.read_metadata("t", std::nullopt, io).live_files.size() == 4);
    Snapshot after = eng.optimize("t", io);
    REQUIRE(after.live_files.size() == 1);
    CHECK(after.live_files.begin()->second.row_count == 100);
  }
  SUBCASE("post-optimize scans open zero delta files") {
    fs::path dir = fresh_dir("opt2");
    Engine eng(dir);
    eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kMor, 100), io);
    eng.load_append("t", make_rows(1, 100), io);
    eng.merge("t", make_rows(10, 20, 1), {Value::int64(1)}, io);
    Snapshot after = eng.optimize("t", io);
    CHECK(after.pending_delta_count() == 0);
    StorageCounters delta;
    IoContext counted{&delta, nullptr};
    ScanRequest all;
    all.agg = ScanRequest::Agg::kCount;
    ScanResult r = eng.scan("t", all, counted);
    CHECK(r.scalar == 99.0);
    // list + commits v0..v3 + exactly the packed data file(s), no deltas
    CHECK(delta.files_opened == 4 + static_cast<int64_t>(after.live_files.size()));
  }
}

TEST_CASE("optimize never increases live file count and preserves rows") {
  fs::path dir = fresh_dir("opt3");
  Engine eng(dir);
  IoContext io;
  eng.create_table(small_table("t", Layout::kIcebergStyle, WriteMode::kMor, 37), io);
  eng.load_append("t", make_rows(1, 90), io);
  eng.merge("t", make_rows(5, 40, 2), {Value::int64(77)}, io);
  ScanRequest all;
  auto before_rows = multiset_of(eng.scan("t", all, io));
  Snapshot pre = eng.read_metadata("t", std::nullopt, io);
  Snapshot post = eng.optimize("t", io);
  CHECK(post.live_files.size() <= pre.live_files.size());
  auto after_rows = multiset_of(eng.scan("t", all, io));
  CHECK(before_rows == after_rows);
}

TEST_CASE("vacuum deletes unreachable files and floors old versions") {
  fs::path dir = fresh_dir("vac");
  Engine eng(dir);
  IoContext io;
  eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kCow, 100), io);
  eng.load_append("t", make_rows(1, 50), io);    // v1
  eng.load_append("t", make_rows(51, 100), io);  // v2
  eng.optimize("t", io);                         // v3: rewrites both files

  size_t files_before = 0;
  for (auto it = fs::directory_iterator(dir / "t" / "data"); it != fs::directory_iterator(); ++it) {
    ++files_before;
  }
  CHECK(files_before == 3);  // two pre-optimize files + one packed file

  SUBCASE("retain 0 deletes the pre-optimize files") {
    eng.vacuum("t", 0, io);  // v4
    size_t files_after = 0;
    for (auto it = fs::directory_iterator(dir / "t" / "data"); it != fs::directory_iterator();
         ++it) {
      ++files_after;
    }
    CHECK(files_after == 1);
    ScanRequest all;
    all.agg = ScanRequest::Agg::kCount;
    CHECK(eng.scan("t", all, io).scalar == 100.0);
    ScanRequest old;
    old.asof = 1;
    CHECK_THROWS_AS(eng.scan("t", old, io), VersionNotFound);
  }
  SUBCASE("retain 1 keeps current-1 queryable") {
    eng.vacuum("t", 1, io);  // current was v3, floor 2
    ScanRequest prev;
    prev.asof = 2;
    prev.agg = ScanRequest::Agg::kCount;
    CHECK(eng.scan("t", prev, io).scalar == 100.0);
    ScanRequest gone;
    gone.asof = 1;
    CHECK_THROWS_AS(eng.scan("t", gone, io), VersionNotFound);
  }
}

TEST_CASE("vacuum never deletes a file reachable from a retained snapshot") {
  fs::path dir = fresh_dir("vacshare");
  Engine eng(dir);
  IoContext io;
  eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kCow, 10), io);
  eng.load_append("t", make_rows(1, 10), io);   // v1: file A
  eng.load_append("t", make_rows(11, 20), io);  // v2: file A + B
  Snapshot v2 = eng.read_metadata("t", std::nullopt, io);
  eng.vacuum("t", 1, io);  // window [1..2]: everything reachable
  for (const auto& [id, _] : v2.live_files) {
    CHECK(fs::exists(dir / "t" / "data" / id));
  }
  ScanRequest prev;
  prev.asof = 1;
  prev.agg = ScanRequest::Agg::kCount;
  CHECK(eng.scan("t", prev, io).scalar == 10.0);
}

TEST_CASE("snapshot reconstruction from the log matches the cached state") {
  fs::path dir = fresh_dir("replay");
  Engine eng(dir);
  IoContext io;
  eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kMor, 30), io);
  eng.load_append("t", make_rows(1, 60), io);
  Snapshot s1 = eng.merge("t", make_rows(3, 8, 4), {Value::int64(1)}, io);
  Snapshot s2 = eng.optimize("t", io);

  // A second engine instance rebuilds purely from storage.
  Engine other(dir);
  Snapshot r1 = other.read_metadata("t", s1.version, io);
  Snapshot r2 = other.read_metadata("t", s2.version, io);
  auto ids = [](const Snapshot& s) {
    std::set<std::string> out;
    for (const auto& [id, _] : s.live_files) out.insert(id);
    for (const auto& [_, ds] : s.pending_deltas) {
      for (const auto& d : ds) out.insert(d.file_id);
    }
    return out;
  };
  CHECK(ids(r1) == ids(s1));
  CHECK(ids(r2) == ids(s2));
  CHECK(r1.pending_delta_count() == s1.pending_delta_count());
}

TEST_CASE("error paths") {
  fs::path dir = fresh_dir("errors");
  Engine eng(dir);
  IoContext io;
  SUBCASE("unknown table") {
    ScanRequest all;
    CHECK_THROWS_AS(eng.scan("missing", all, io), UnknownTable);
  }
  SUBCASE("schema mismatch on load") {
    eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kCow, 10), io);
    std::vector<Row> bad = {{Value::int64(1)}};
    CHECK_THROWS_AS(eng.load_append("t", bad, io), SchemaMismatch);
    std::vector<Row> bad_type = {{Value::string("x"), Value::int64(1)}};
    CHECK_THROWS_AS(eng.load_append("t", bad_type, io), SchemaMismatch);
  }
  SUBCASE("version beyond latest") {
    eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kCow, 10), io);
    ScanRequest req;
    req.asof = 7;
    CHECK_THROWS_AS(eng.scan("t", req, io), VersionNotFound);
  }
  SUBCASE("duplicate create") {
    eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kCow, 10), io);
    CHECK_THROWS_AS(
        eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kCow, 10), io),
        ExecError);
  }
}

TEST_CASE("time travel returns the historical row set") {
  fs::path dir = fresh_dir("tt");
  Engine eng(dir);
  IoContext io;
  eng.create_table(small_table("t", Layout::kDeltaStyle, WriteMode::kCow, 50), io);
  eng.load_append("t", make_rows(1, 50), io);                  // v1
  eng.merge("t", make_rows(1, 5, 9), {Value::int64(50)}, io);  // v2

  ScanRequest at1;
  at1.asof = 1;
  auto v1_rows = multiset_of(eng.scan("t", at1, io));
  std::multiset<std::pair<int64_t, int64_t>> want;
  for (int64_t k = 1; k <= 50; ++k) want.insert({k, k * 10});
  CHECK(v1_rows == want);

  ScanRequest latest;
  auto v2_rows = multiset_of(eng.scan("t", latest, io));
  CHECK(v2_rows.size() == 49);
  CHECK(v2_rows.count({1, 19}) == 1);
}

TEST_CASE("hudi-style merge folds small insert files into existing groups") {
  fs::path dir = fresh_dir("hudipack");
  Engine eng(dir);
  IoContext io;
  eng.create_table(small_table("t", Layout::kHudiStyle, WriteMode::kCow, 100), io);
  eng.load_append("t", make_rows(1, 60), io);  // one file with room for 40 more
  Snapshot after = eng.merge("t", make_rows(61, 70), {}, io);
  // A delta/iceberg table would now have 2 files; hudi-style packing keeps 1.
  CHECK(after.live_files.size() == 1);
  CHECK(after.live_files.begin()->second.row_count == 70);
  ScanRequest all;
  all.agg = ScanRequest::Agg::kCount;
  CHECK(eng.scan("t", all, io).scalar == 70.0);
}
