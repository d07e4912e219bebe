#pragma once

#include <string>
#include <vector>

#include "threadreach/run.hpp"

namespace threadreach {

enum class BenchMatrix { Waitlist, Por, Partitioning, Full };

struct BenchOptions {
  std::string corpus_dir;
  BenchMatrix matrix = BenchMatrix::Waitlist;
  ExplorationConfig base;        // domain/property/clone defaults for every cell
  std::string out_csv;           // empty: stdout only
  bool quantiles = false;        // also write <out>.quantile.csv
};

struct BenchRow {
  RunReport report;
  std::string expected;  // from the .expect sidecar, or "?" when missing
  bool correct = false;
};

// Runs every .mtc task in the corpus directory against the configuration
// matrix; per-task timeouts become Unknown rows and never abort the batch.
std::vector<BenchRow> bench(const BenchOptions& opts);

std::string bench_csv(const std::vector<BenchRow>& rows);
// Per-config wall times of correct rows, sorted ascending (quantile data).
std::string bench_quantile_csv(const std::vector<BenchRow>& rows);

// Reads a `<task>.expect` sidecar: SAFE | VIOLATION | DEADLOCK.
std::string read_expected_verdict(const std::string& task_path);

}  // namespace threadreach
