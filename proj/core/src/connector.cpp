// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "lsth/connector.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>

#include "lsth/engine/engine.hpp"
#include "lsth/errors.hpp"
#include "lsth/minisql/exec.hpp"

namespace lsth {

namespace fs = std::filesystem;

TargetKind target_kind_from_string(const std::string& s) {
  if (s == "mini_lst" || s == "minilst") return TargetKind::kMiniLst;
  if (s == "dry_run" || s == "dryrun") return TargetKind::kDryRun;
  throw ConfigError("unknown target kind: " + s);
}

const char* to_string(TargetKind k) {
  return k == TargetKind::kMiniLst ? "mini_lst" : "dry_run";
}

namespace {

class MiniLstCatalog : public CatalogView {
 public:
  explicit MiniLstCatalog(engine::Engine& eng) : eng_(eng) {}
  bool supported() const override { return true; }
  std::vector<std::string> tables() override {
    engine::IoContext uncounted;
    return eng_.list_tables(uncounted);
  }
  int64_t row_count(const std::string& table) override {
    engine::IoContext uncounted;
    engine::ScanRequest req;
    req.agg = engine::ScanRequest::Agg::kCount;
    return static_cast<int64_t>(eng_.scan(table, req, uncounted).scalar.value_or(0));
  }
  int64_t current_version(const std::string& table) override {
    return eng_.current_version(table);
  }

 private:
  engine::Engine& eng_;
};

class MiniLstTarget;

class MiniLstConnection : public Connection {
 public:
  MiniLstConnection(std::shared_ptr<engine::Engine> eng, std::shared_ptr<Target> keepalive)
      : eng_(std::move(eng)), keepalive_(std::move(keepalive)) {}

  StatementResult execute(const std::string& sql) override {
    if (closed_) throw TargetUnreachable("connection is closed");
    StatementResult out;
    engine::IoContext io{&out.engine_counters_delta, &eng_->counter_sink()};
    minisql::ExecResult r = minisql::execute_statement(*eng_, sql, io);
    out.row_count = r.row_count;
    out.scalar = r.scalar;
    return out;
  }

  void close() override { closed_ = true; }

 private:
  std::shared_ptr<engine::Engine> eng_;
  std::shared_ptr<Target> keepalive_;
  bool closed_ = false;
};

class MiniLstTarget : public Target, public std::enable_shared_from_this<MiniLstTarget> {
 public:
  explicit MiniLstTarget(const ConnectionSpec& spec) {
    if (spec.storage_root.empty()) {
      throw TargetUnreachable("mini_lst target needs a storage_root");
    }
    int budget = engine::Engine::kDefaultRetryBudget;
    if (auto it = spec.options.find("retry_budget"); it != spec.options.end()) {
      budget = std::stoi(it->second);
    }
    eng_ = std::make_shared<engine::Engine>(spec.storage_root, budget);
    catalog_ = std::make_unique<MiniLstCatalog>(*eng_);
  }

  std::unique_ptr<Connection> open_session() override {
    return std::make_unique<MiniLstConnection>(eng_, shared_from_this());
  }
  CatalogView* catalog() override { return catalog_.get(); }
  StorageCounters cumulative() const override { return eng_->cumulative(); }

 private:
  std::shared_ptr<engine::Engine> eng_;
  std::unique_ptr<MiniLstCatalog> catalog_;
};

class UnsupportedCatalog : public CatalogView {
 public:
  bool supported() const override { return false; }
  std::vector<std::string> tables() override { return {}; }
  int64_t row_count(const std::string&) override { return 0; }
  int64_t current_version(const std::string&) override { return 0; }
};

class DryRunTarget;

class DryRunConnection : public Connection {
 public:
  DryRunConnection(fs::path script, std::shared_ptr<Target> keepalive)
      : path_(std::move(script)), keepalive_(std::move(keepalive)) {
    out_.open(path_, std::ios::trunc);
    if (!out_) throw TargetUnreachable("cannot write " + path_.string());
  }

  StatementResult execute(const std::string& sql) override {
    if (closed_) throw TargetUnreachable("connection is closed");
    out_ << sql;
    if (sql.empty() || sql.back() != ';') out_ << ';';
    out_ << '\n';
    out_.flush();
    return {};
  }

  void close() override { closed_ = true; }

 private:
  fs::path path_;
  std::ofstream out_;
  std::shared_ptr<Target> keepalive_;
  bool closed_ = false;
};

class DryRunTarget : public Target, public std::enable_shared_from_this<DryRunTarget> {
 public:
  explicit DryRunTarget(const ConnectionSpec& spec) : root_(spec.storage_root) {
    if (root_.empty()) throw TargetUnreachable("dry_run target needs a storage_root");
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec || !fs::is_directory(root_)) {
      throw TargetUnreachable("storage root not usable: " + root_.string());
    }
  }

  std::unique_ptr<Connection> open_session() override {
    int n = next_session_.fetch_add(1);
    return std::make_unique<DryRunConnection>(root_ / ("script_" + std::to_string(n) + ".sql"),
                                              shared_from_this());
  }
  CatalogView* catalog() override { return &catalog_; }
  StorageCounters cumulative() const override { return {}; }

 private:
  fs::path root_;
  std::atomic<int> next_session_{0};
  UnsupportedCatalog catalog_;
};

}  // namespace

std::shared_ptr<Target> Target::connect(const ConnectionSpec& spec) {
  switch (spec.kind) {
    case TargetKind::kMiniLst:
      return std::make_shared<MiniLstTarget>(spec);
    case TargetKind::kDryRun:
      return std::make_shared<DryRunTarget>(spec);
  }
  throw TargetUnreachable("unknown target kind");
}

std::unique_ptr<Connection> open_connection(const ConnectionSpec& spec) {
  return Target::connect(spec)->open_session();
}

}  // namespace lsth
