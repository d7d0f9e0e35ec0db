// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include <cstdio>
#include <fstream>

#include "lsth/errors.hpp"
#include "lsth/metrics.hpp"

namespace lsth {

namespace fs = std::filesystem;

namespace {

std::string num6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw IOFailure("cannot write " + p.string());
  return out;
}

}  // namespace

void emit_report(const std::vector<PhaseAggregate>& aggregates,
                 const std::vector<MetricSeries>& series, const std::vector<SdrCell>& sdr,
                 const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir / "plotdata", ec);

  {
    std::ofstream md = open_out(out_dir / "report.md");
    md << "# Experiment report\n\n";
    md << "## Phase aggregates\n\n";
    md << "| phase | type | statement_time_s | phase_span_s | statements | failures | "
          "files_opened | files_written | list_calls | bytes_read | bytes_written | "
          "throughput_stmts_per_s |\n";
    md << "|---|---|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& a : aggregates) {
      md << "| " << a.phase_id << " | " << to_string(a.phase_type) << " | "
         << num6(a.statement_time_s) << " | " << num6(a.phase_span_s) << " | " << a.statements
         << " | " << a.statement_failures << " | " << a.counters.files_opened << " | "
         << a.counters.files_written << " | " << a.counters.list_calls << " | "
         << a.counters.bytes_read << " | " << a.counters.bytes_written << " | "
         << num6(a.throughput_stmts_per_s) << " |\n";
    }
    md << "\n## Stability (S_DR by phase type and metric)\n\n";
    md << "S_DR is the mean of successive relative deltas across iterations of one\n"
          "phase type; lower means more stable. Series with a single iteration are\n"
          "reported as n/a. Throughput uses reciprocals (higher is better).\n\n";
    md << "| phase_type | metric | n | S_DR |\n|---|---|---|---|\n";
    double sum = 0;
    int count = 0;
    for (const auto& c : sdr) {
      md << "| " << to_string(c.phase_type) << " | " << c.metric << " | " << c.n << " | ";
      if (c.sdr) {
        md << num6(*c.sdr);
        sum += *c.sdr;
        ++count;
      } else {
        md << "n/a";
      }
      md << " |\n";
    }
    md << "| combined (mean) | all | - | " << (count ? num6(sum / count) : "n/a") << " |\n";
    md << "\nThe combined row is a plain mean across the defined cells, an\n"
          "interpretation rather than a standard aggregate.\n";
  }

  {
    std::ofstream csv = open_out(out_dir / "report.csv");
    csv << "phase_type,metric,n,sdr\n";
    for (const auto& c : sdr) {
      csv << to_string(c.phase_type) << "," << c.metric << "," << c.n << ","
          << (c.sdr ? num6(*c.sdr) : "n/a") << "\n";
    }
  }

  for (const auto& s : series) {
    std::string name = std::string(to_string(s.phase_type)) + "_" + s.metric_name + ".csv";
    std::ofstream csv = open_out(out_dir / "plotdata" / name);
    csv << "iteration,value\n";
    for (size_t i = 0; i < s.values.size(); ++i) {
      csv << i << "," << num6(s.values[i]) << "\n";
    }
  }
}

}  // namespace lsth
