// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lsth/value.hpp"

namespace lsth {
namespace datagen {

// Deterministic synthetic star schema: one fact table and two dimensions.
//   fact(key INT64, dim1_fk INT64, dim2_fk INT64, amount DECIMAL, event_date DATE)
//   dim1(key INT64, name STRING, band INT64)
//   dim2(key INT64, name STRING, region STRING)
// Dimension size is ceil(scale_rows / 100), at least 1. All values derive
// from the counter-based generator in lsth/rng.hpp, so output is
// byte-identical for identical (spec, format version).
struct GenSpec {
  int64_t scale_rows = 1000;
  uint64_t seed = 1;
  double refresh_fraction = 0.1;  // fraction of base keys upserted per refresh, in (0, 1]
  int refresh_count = 0;

  void validate() const;  // throws ConfigError
  int64_t dim_rows_count() const { return (scale_rows + 99) / 100; }
  int64_t upserts_per_refresh() const;  // round(refresh_fraction * scale_rows)
  int64_t inserts_per_refresh() const { return upserts_per_refresh() / 10; }
  int64_t deletes_per_refresh() const { return scale_rows / 20; }
};

TableSchema fact_schema();
TableSchema dim1_schema();
TableSchema dim2_schema();

std::vector<Row> base_fact_rows(const GenSpec&);
std::vector<Row> dim1_rows(const GenSpec&);
std::vector<Row> dim2_rows(const GenSpec&);

// One refresh stream: upserts of existing keys, brand-new keys (disjoint
// across streams), and a delete list disjoint from this stream's upserts.
struct RefreshChanges {
  std::vector<Row> upserts;
  std::vector<Row> inserts;
  std::vector<int64_t> delete_keys;
};
RefreshChanges refresh_changes(const GenSpec&, int stream /*1-based*/);

struct FileInfo {
  std::string name;
  int64_t rows = 0;
  std::string digest;  // fnv1a-64 of the file content, hex
};
struct GenManifest {
  std::vector<FileInfo> files;
};

// Writes fact.csv, dim1.csv, dim2.csv (RFC-4180, with header).
GenManifest generate_base(const GenSpec&, const std::filesystem::path& out_dir);
// Writes refresh_<i>.csv with an `op` column: U rows carry full columns,
// D rows carry the key only.
GenManifest generate_refresh(const GenSpec&, int stream, const std::filesystem::path& out_dir);
void append_manifest_json(const GenManifest&, const std::filesystem::path& file);

// The scan oracle: fact content keyed by `key` after replaying refreshes
// 1..upto (0 = just the base load) through a pure in-memory fold.
std::map<int64_t, Row> fold_fact(const GenSpec&, int upto);

uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

}  // namespace datagen
}  // namespace lsth
