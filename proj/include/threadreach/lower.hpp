#pragma once

#include "threadreach/ast.hpp"
#include "threadreach/cfa.hpp"

namespace threadreach {

struct LowerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Builds one CFA per function. Locals are qualified as `f::x`, branches
// lower to complementary Assume pairs, `while` to a loop head, `assert`
// to an Assume pair whose negative branch targets a fresh error location,
// calls to CallPush edges whose target is the continuation. Rejects
// recursion.
CfaSet lower_to_cfa(const Ast& ast);

// Clones every function reachable as a thread start routine max_clones
// times as `<base>__<k>`, renaming `f::x` to `f__k::x` and retargeting
// calls within the clone family. Idempotent: a set that already carries
// clones is returned unchanged.
CfaSet clone_functions(CfaSet cfa, int max_clones);

// Marks each edge ThreadLocal or Global. Global: touches a global
// variable, is thread management (create/join/lock/unlock/atomic), or
// enters an error location.
void classify_edges(CfaSet& cfa);

}  // namespace threadreach
