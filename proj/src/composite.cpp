#include "threadreach/composite.hpp"

#include <sstream>

namespace threadreach {

CompositeState CompositeCpa::initial() const {
  CompositeState s;
  s.threading = threading_initial(*cfa_);
  switch (domain_) {
    case Domain::None:
      s.data = UnitEnv{};
      break;
    case Domain::Value: {
      ValueEnv env;
      for (const auto& g : cfa_->globals) env[g.name] = g.init.value_or(0);
      s.data = std::move(env);
      break;
    }
    case Domain::Interval: {
      IntervalEnv env;
      for (const auto& g : cfa_->globals) env[g.name] = Interval::point(g.init.value_or(0));
      s.data = std::move(env);
      break;
    }
  }
  return s;
}

std::vector<CompositeMove> CompositeCpa::transfer(const CompositeState& s,
                                                  Diagnostics* diags) const {
  std::vector<CompositeMove> out;
  for (EnabledMove& m : threading_transfer(s.threading, *cfa_, por_, diags)) {
    const Operation& op = cfa_->edge(m.edge).op;
    if (const auto* unit = std::get_if<UnitEnv>(&s.data)) {
      out.push_back(CompositeMove{m.thread, m.edge, CompositeState{std::move(m.successor), *unit}});
    } else if (const auto* value = std::get_if<ValueEnv>(&s.data)) {
      for (ValueEnv& d : value_transfer(*value, op))
        out.push_back(CompositeMove{m.thread, m.edge, CompositeState{m.successor, std::move(d)}});
    } else {
      const auto& iv = std::get<IntervalEnv>(s.data);
      for (IntervalEnv& d : interval_transfer(iv, op))
        out.push_back(CompositeMove{m.thread, m.edge, CompositeState{m.successor, std::move(d)}});
    }
  }
  return out;
}

std::vector<EnabledMove> CompositeCpa::observer_moves(const CompositeState& s) const {
  return threading_moves(s.threading, *cfa_);
}

CompositeState CompositeCpa::merge(const CompositeState& next, const CompositeState& existing,
                                   int visit_count) const {
  if (domain_ != Domain::Interval) return existing;  // merge-sep
  if (next.threading != existing.threading) return existing;
  const auto& a = std::get<IntervalEnv>(existing.data);
  const auto& b = std::get<IntervalEnv>(next.data);
  IntervalEnv joined = interval_widen(a, b, visit_count);
  if (joined == a) return existing;
  CompositeState merged = existing;
  merged.data = std::move(joined);
  return merged;
}

bool CompositeCpa::covers(const CompositeState& candidate, const CompositeState& s) const {
  if (candidate.threading != s.threading) return false;
  if (const auto* value = std::get_if<ValueEnv>(&s.data))
    return value_covers(std::get<ValueEnv>(candidate.data), *value);
  if (const auto* iv = std::get_if<IntervalEnv>(&s.data))
    return interval_covers(std::get<IntervalEnv>(candidate.data), *iv);
  return true;  // unit data: threading equality decides
}

std::string CompositeCpa::partition_key(const CompositeState& s) const {
  return threading_partition_key(s.threading);
}

bool stop_sep(const CompositeCpa& cpa, const CompositeState& s,
              const std::vector<const CompositeState*>& candidates) {
  for (const CompositeState* c : candidates)
    if (cpa.covers(*c, s)) return true;
  return false;
}

std::string data_state_label(const DataState& d) {
  std::ostringstream out;
  if (const auto* value = std::get_if<ValueEnv>(&d)) {
    out << "{";
    bool first = true;
    for (const auto& [var, val] : *value) {
      if (!first) out << ", ";
      first = false;
      out << var << "=" << val;
    }
    out << "}";
  } else if (const auto* iv = std::get_if<IntervalEnv>(&d)) {
    out << "{";
    bool first = true;
    for (const auto& [var, v] : *iv) {
      if (!first) out << ", ";
      first = false;
      out << var << "=" << v.text();
    }
    out << "}";
  }
  return out.str();
}

}  // namespace threadreach
