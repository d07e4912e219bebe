#pragma once

#include <variant>

#include "threadreach/domains.hpp"
#include "threadreach/threading.hpp"

namespace threadreach {

enum class Domain { None, Value, Interval };

struct UnitEnv {
  auto operator<=>(const UnitEnv&) const = default;
};

using DataState = std::variant<UnitEnv, ValueEnv, IntervalEnv>;

// Product of the threading component and one data component; the unit of
// exploration and the ARG node payload.
struct CompositeState {
  ThreadingState threading;
  DataState data;

  bool operator==(const CompositeState& other) const = default;
};

struct CompositeMove {
  ThreadId thread;
  EdgeId edge = -1;
  CompositeState state;
};

// The configurable-program-analysis surface used by reach(): initial
// state, transfer, merge, stop and the partition key.
class CompositeCpa {
 public:
  CompositeCpa(const CfaSet& cfa, Domain domain, bool por_enabled)
      : cfa_(&cfa), domain_(domain), por_(por_enabled) {}

  const CfaSet& cfa() const { return *cfa_; }
  Domain domain() const { return domain_; }
  bool por_enabled() const { return por_; }

  CompositeState initial() const;

  // All composite successors: threading moves whose edge operation is then
  // applied to the data component; a data result of zero states prunes the
  // move as infeasible.
  std::vector<CompositeMove> transfer(const CompositeState& s, Diagnostics* diags = nullptr) const;

  // Threading-level moves without the POR filter, for the deadlock observer.
  std::vector<EnabledMove> observer_moves(const CompositeState& s) const;

  // merge-sep for unit and value data; intervals join pointwise within an
  // equal threading part (visit_count drives widening). Returns the state
  // that replaces `existing` — `existing` itself when nothing merges.
  CompositeState merge(const CompositeState& next, const CompositeState& existing,
                       int visit_count) const;

  // Coverage: equal threading part and data coverage per the domain order.
  bool covers(const CompositeState& candidate, const CompositeState& s) const;

  std::string partition_key(const CompositeState& s) const;

 private:
  const CfaSet* cfa_;
  Domain domain_;
  bool por_;
};

// The non-combining merge operator: always returns the existing state.
inline const CompositeState& merge_sep(const CompositeState& /*next*/,
                                       const CompositeState& existing) {
  return existing;
}

// Termination check: some candidate covers s.
bool stop_sep(const CompositeCpa& cpa, const CompositeState& s,
              const std::vector<const CompositeState*>& candidates);

std::string data_state_label(const DataState& d);

}  // namespace threadreach
