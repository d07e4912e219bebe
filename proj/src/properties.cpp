#include "threadreach/properties.hpp"

namespace threadreach {

bool check_error(const CompositeState& s, const CfaSet& cfa) {
  for (const auto& [tid, entry] : s.threading.threads)
    if (cfa.loc(entry.location).is_error) return true;
  return false;
}

bool check_deadlock(const ThreadingState& s, const std::vector<EnabledMove>& moves,
                    const CfaSet& cfa) {
  if (s.threads.empty() || !moves.empty()) return false;
  return blocked_at_lock_or_join(s, cfa);
}

}  // namespace threadreach
