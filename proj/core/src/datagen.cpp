// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "lsth/datagen.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "lsth/csv.hpp"
#include "lsth/errors.hpp"
#include "lsth/rng.hpp"

namespace lsth {
namespace datagen {

namespace fs = std::filesystem;

namespace {

// Independent sub-streams of the master seed; values never mix across
// streams, which keeps every column reproducible in isolation.
enum Stream : uint64_t {
  kDim1Fk = 1,
  kDim2Fk = 2,
  kAmount = 3,
  kEventDate = 4,
  kDimName = 5,
  kDimBand = 6,
  kDimRegion = 7,
  kRefreshShuffle = 100,  // + stream index
  kRefreshAmount = 200,   // + stream index
  kRefreshDate = 300,     // + stream index
};

uint64_t stream_seed(const GenSpec& spec, uint64_t stream) { return mix64(spec.seed, stream); }

// Days since 2020-01-01 -> ISO date, via the classic civil-date conversion.
std::string date_from_day(int64_t day_offset) {
  int64_t days = day_offset + 18262;  // 2020-01-01 as days since 1970-01-01
  int64_t z = days + 719468;
  int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  uint64_t doe = static_cast<uint64_t>(z - era * 146097);
  uint64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  int64_t y = static_cast<int64_t>(yoe) + era * 400;
  uint64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  uint64_t mp = (5 * doy + 2) / 153;
  uint64_t d = doy - (153 * mp + 2) / 5 + 1;
  uint64_t m = mp < 10 ? mp + 3 : mp - 9;
  if (m <= 2) ++y;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04lld-%02llu-%02llu", static_cast<long long>(y),
                static_cast<unsigned long long>(m), static_cast<unsigned long long>(d));
  return buf;
}

const char* kRegions[] = {"north", "south", "east", "west", "centre"};

Row fact_row(const GenSpec& spec, int64_t key, uint64_t amount_stream, uint64_t date_stream) {
  int64_t dims = spec.dim_rows_count();
  Row row;
  row.reserve(5);
  row.push_back(Value::int64(key));
  row.push_back(Value::int64(
      1 + static_cast<int64_t>(mix64_below(stream_seed(spec, kDim1Fk), static_cast<uint64_t>(key),
                                           static_cast<uint64_t>(dims)))));
  row.push_back(Value::int64(
      1 + static_cast<int64_t>(mix64_below(stream_seed(spec, kDim2Fk), static_cast<uint64_t>(key),
                                           static_cast<uint64_t>(dims)))));
  row.push_back(Value::decimal_cents(
      100 + static_cast<int64_t>(mix64_below(stream_seed(spec, amount_stream),
                                             static_cast<uint64_t>(key), 99900))));
  row.push_back(Value::date(date_from_day(static_cast<int64_t>(
      mix64_below(stream_seed(spec, date_stream), static_cast<uint64_t>(key), 730)))));
  return row;
}

std::string header_of(const TableSchema& schema) {
  std::vector<std::string> names;
  for (const auto& c : schema) names.push_back(c.name);
  return csv::encode_record(names);
}

std::string rows_csv(const std::vector<Row>& rows) {
  std::string out;
  std::vector<std::string> fields;
  for (const auto& r : rows) {
    fields.clear();
    for (const auto& v : r) fields.push_back(v.to_text());
    out += csv::encode_record(fields);
  }
  return out;
}

FileInfo write_csv(const fs::path& out_dir, const std::string& name, const std::string& content,
                   int64_t rows) {
  std::ofstream out(out_dir / name, std::ios::binary | std::ios::trunc);
  if (!out) throw IOFailure("cannot write " + (out_dir / name).string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IOFailure("short write to " + (out_dir / name).string());
  return {name, rows, fnv1a64_hex(content)};
}

// Partial Fisher-Yates over [1..n] keyed by the stream seed; the first
// `take` entries are a uniform distinct sample.
std::vector<int64_t> sampled_keys(uint64_t seed, int64_t n, int64_t take) {
  std::vector<int64_t> keys(static_cast<size_t>(n));
  std::iota(keys.begin(), keys.end(), 1);
  Rng rng(seed);
  int64_t limit = std::min(take, n);
  for (int64_t i = 0; i < limit; ++i) {
    int64_t j = i + static_cast<int64_t>(rng.below(static_cast<uint64_t>(n - i)));
    std::swap(keys[static_cast<size_t>(i)], keys[static_cast<size_t>(j)]);
  }
  keys.resize(static_cast<size_t>(limit));
  return keys;
}

}  // namespace

void GenSpec::validate() const {
  if (scale_rows < 1) throw ConfigError("scale_rows must be >= 1");
  if (!(refresh_fraction > 0.0) || refresh_fraction > 1.0) {
    throw ConfigError("refresh_fraction must be in (0, 1]");
  }
  if (refresh_count < 0) throw ConfigError("refresh_count must be >= 0");
}

int64_t GenSpec::upserts_per_refresh() const {
  return static_cast<int64_t>(std::llround(refresh_fraction * static_cast<double>(scale_rows)));
}

TableSchema fact_schema() {
  return {{"key", ColumnType::kInt64},
          {"dim1_fk", ColumnType::kInt64},
          {"dim2_fk", ColumnType::kInt64},
          {"amount", ColumnType::kDecimal},
          {"event_date", ColumnType::kDate}};
}

TableSchema dim1_schema() {
  return {{"key", ColumnType::kInt64}, {"name", ColumnType::kString}, {"band", ColumnType::kInt64}};
}

TableSchema dim2_schema() {
  return {{"key", ColumnType::kInt64},
          {"name", ColumnType::kString},
          {"region", ColumnType::kString}};
}

std::vector<Row> base_fact_rows(const GenSpec& spec) {
  spec.validate();
  std::vector<Row> rows;
  rows.reserve(static_cast<size_t>(spec.scale_rows));
  for (int64_t k = 1; k <= spec.scale_rows; ++k) {
    rows.push_back(fact_row(spec, k, kAmount, kEventDate));
  }
  return rows;
}

namespace {

std::vector<Row> dim_rows_impl(const GenSpec& spec, int which) {
  std::vector<Row> rows;
  int64_t n = spec.dim_rows_count();
  rows.reserve(static_cast<size_t>(n));
  uint64_t name_seed = stream_seed(spec, kDimName) + static_cast<uint64_t>(which);
  for (int64_t k = 1; k <= n; ++k) {
    Row row;
    row.push_back(Value::int64(k));
    char name[32];
    std::snprintf(name, sizeof(name), "d%d_%04llx", which,
                  static_cast<unsigned long long>(mix64(name_seed, static_cast<uint64_t>(k)) & 0xffff));
    row.push_back(Value::string(name));
    if (which == 1) {
      row.push_back(Value::int64(static_cast<int64_t>(
          mix64_below(stream_seed(spec, kDimBand), static_cast<uint64_t>(k), 10))));
    } else {
      row.push_back(Value::string(kRegions[mix64_below(stream_seed(spec, kDimRegion),
                                                       static_cast<uint64_t>(k), 5)]));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<Row> dim1_rows(const GenSpec& spec) { return dim_rows_impl(spec, 1); }
std::vector<Row> dim2_rows(const GenSpec& spec) { return dim_rows_impl(spec, 2); }

RefreshChanges refresh_changes(const GenSpec& spec, int stream) {
  spec.validate();
  if (stream < 1 || stream > spec.refresh_count) {
    throw ConfigError("refresh stream " + std::to_string(stream) + " out of range 1.." +
                      std::to_string(spec.refresh_count));
  }
  int64_t upserts = spec.upserts_per_refresh();
  int64_t inserts = spec.inserts_per_refresh();
  int64_t deletes = spec.deletes_per_refresh();

  // One shuffle yields disjoint upsert and delete key sets for this stream.
  std::vector<int64_t> picked =
      sampled_keys(stream_seed(spec, kRefreshShuffle + static_cast<uint64_t>(stream)),
                   spec.scale_rows, std::min(spec.scale_rows, upserts + deletes));
  RefreshChanges out;
  for (int64_t i = 0; i < upserts && i < static_cast<int64_t>(picked.size()); ++i) {
    out.upserts.push_back(fact_row(spec, picked[static_cast<size_t>(i)],
                                   kRefreshAmount + static_cast<uint64_t>(stream),
                                   kRefreshDate + static_cast<uint64_t>(stream)));
  }
  for (int64_t i = upserts; i < upserts + deletes && i < static_cast<int64_t>(picked.size()); ++i) {
    out.delete_keys.push_back(picked[static_cast<size_t>(i)]);
  }
  // New keys are consecutive beyond the base range, disjoint across streams.
  int64_t first = spec.scale_rows + (static_cast<int64_t>(stream) - 1) * inserts + 1;
  for (int64_t k = first; k < first + inserts; ++k) {
    out.inserts.push_back(fact_row(spec, k, kRefreshAmount + static_cast<uint64_t>(stream),
                                   kRefreshDate + static_cast<uint64_t>(stream)));
  }
  return out;
}

GenManifest generate_base(const GenSpec& spec, const fs::path& out_dir) {
  spec.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  GenManifest m;
  {
    std::vector<Row> rows = base_fact_rows(spec);
    m.files.push_back(write_csv(out_dir, "fact.csv", header_of(fact_schema()) + rows_csv(rows),
                                static_cast<int64_t>(rows.size())));
  }
  {
    std::vector<Row> rows = dim1_rows(spec);
    m.files.push_back(write_csv(out_dir, "dim1.csv", header_of(dim1_schema()) + rows_csv(rows),
                                static_cast<int64_t>(rows.size())));
  }
  {
    std::vector<Row> rows = dim2_rows(spec);
    m.files.push_back(write_csv(out_dir, "dim2.csv", header_of(dim2_schema()) + rows_csv(rows),
                                static_cast<int64_t>(rows.size())));
  }
  return m;
}

GenManifest generate_refresh(const GenSpec& spec, int stream, const fs::path& out_dir) {
  RefreshChanges ch = refresh_changes(spec, stream);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  std::string content = "op," + header_of(fact_schema());
  std::vector<std::string> fields;
  auto add_row = [&](const char* op, const Row& r) {
    fields.clear();
    fields.emplace_back(op);
    for (const auto& v : r) fields.push_back(v.to_text());
    content += csv::encode_record(fields);
  };
  for (const auto& r : ch.upserts) add_row("U", r);
  for (const auto& r : ch.inserts) add_row("U", r);
  for (int64_t k : ch.delete_keys) {
    fields.assign({"D", std::to_string(k), "", "", "", ""});
    content += csv::encode_record(fields);
  }
  GenManifest m;
  std::string name = "refresh_" + std::to_string(stream) + ".csv";
  m.files.push_back(write_csv(out_dir, name, content,
                              static_cast<int64_t>(ch.upserts.size() + ch.inserts.size() +
                                                   ch.delete_keys.size())));
  return m;
}

void append_manifest_json(const GenManifest& m, const fs::path& file) {
  nlohmann::json existing;
  {
    std::ifstream in(file);
    if (in) {
      existing = nlohmann::json::parse(in, nullptr, false);
    }
  }
  if (!existing.is_object() || !existing.contains("files")) {
    existing = nlohmann::json{{"files", nlohmann::json::array()}};
  }
  for (const auto& f : m.files) {
    existing["files"].push_back({{"name", f.name}, {"rows", f.rows}, {"digest", f.digest}});
  }
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw IOFailure("cannot write " + file.string());
  out << existing.dump(2) << "\n";
}

std::map<int64_t, Row> fold_fact(const GenSpec& spec, int upto) {
  std::map<int64_t, Row> table;
  for (auto& r : base_fact_rows(spec)) {
    table[r[0].num] = std::move(r);
  }
  for (int i = 1; i <= upto; ++i) {
    RefreshChanges ch = refresh_changes(spec, i);
    for (auto& r : ch.upserts) table[r[0].num] = std::move(r);
    for (auto& r : ch.inserts) table[r[0].num] = std::move(r);
    for (int64_t k : ch.delete_keys) table.erase(k);
  }
  return table;
}

uint64_t fnv1a64(std::string_view data) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view data) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

}  // namespace datagen
}  // namespace lsth
