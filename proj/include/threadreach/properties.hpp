#pragma once

#include "threadreach/composite.hpp"

namespace threadreach {

enum class PropertySpec { ErrorReachability, DeadlockFreedom, Both };

inline bool watches_error(PropertySpec p) { return p != PropertySpec::DeadlockFreedom; }
inline bool watches_deadlock(PropertySpec p) { return p != PropertySpec::ErrorReachability; }

// True iff any live thread sits on an error location.
bool check_error(const CompositeState& s, const CfaSet& cfa);

// Deadlock observer. `moves` must be the threading-level moves computed
// without the POR filter: a state is deadlocked when live threads exist,
// nothing can move, and at least one of the stuck threads waits at a Lock
// or Join edge (which tells a deadlock apart from normal termination).
bool check_deadlock(const ThreadingState& s, const std::vector<EnabledMove>& moves,
                    const CfaSet& cfa);

}  // namespace threadreach
