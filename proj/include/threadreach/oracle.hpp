#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "threadreach/cfa.hpp"

namespace threadreach {

// Bounded brute-force ground truth: exhaustive concrete interpretation of
// every thread interleaving at statement granularity, enumerating nondet()
// over a finite value set. Intentionally independent of the CPA machinery
// it is used to cross-check; only the CFA substrate is shared.
struct OracleOptions {
  std::int64_t step_bound = 10000;       // max steps along one interleaving
  std::int64_t state_budget = 200000;    // max expansions before giving up
  std::vector<std::int64_t> nondet_values = {0, 1};
  bool track_tuples = false;             // per-location-tuple value ranges
};

enum class OracleVerdict { Safe, Violation, Deadlock, Unknown };

struct OracleResult {
  OracleVerdict verdict = OracleVerdict::Unknown;
  bool bound_exceeded = false;
  bool violation_found = false;
  bool deadlock_found = false;
  std::int64_t state_count = 0;
  std::map<std::string, std::int64_t> max_observed;  // global variable maxima
  // location-tuple key -> variable -> observed [min,max]
  std::map<std::string, std::map<std::string, std::pair<std::int64_t, std::int64_t>>> tuple_bounds;
  std::string diagnostic;
};

OracleResult run_oracle(const CfaSet& cfa, const OracleOptions& opts);

}  // namespace threadreach
