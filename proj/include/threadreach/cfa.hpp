#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "threadreach/ast.hpp"

namespace threadreach {

using LocId = std::int32_t;
using EdgeId = std::int32_t;

constexpr LocId kNoLocation = -1;
// Distinguished unknown-location token; representable but never produced by
// the transfer relation.
constexpr LocId kUnknownLocation = -2;

struct Location {
  LocId id = kNoLocation;
  std::string function;   // owning function (clone name after cloning)
  int index = 0;          // position within the function, entry = 0
  bool is_error = false;
  bool is_function_exit = false;
};

// One CFA operation per edge; statement-level atomicity.
struct AssignOp { std::string var; ExprPtr value; bool is_decl = false; };
struct AssumeOp { ExprPtr cond; bool polarity = true; };
struct CreateOp { std::string thread_var; std::string function; };  // base function name
struct JoinOp { std::string thread_var; };
struct LockOp { std::string mutex; };
struct UnlockOp { std::string mutex; };
struct AtomicBeginOp {};
struct AtomicEndOp {};
struct CallPushOp { std::string callee; };  // edge target is the continuation
struct ReturnPopOp {};
struct SkipOp {};

using Operation = std::variant<AssignOp, AssumeOp, CreateOp, JoinOp, LockOp, UnlockOp,
                               AtomicBeginOp, AtomicEndOp, CallPushOp, ReturnPopOp, SkipOp>;

enum class EdgeScope { Unclassified, ThreadLocal, Global };

struct CfaEdge {
  EdgeId id = -1;
  LocId from = kNoLocation;
  LocId to = kNoLocation;
  Operation op;
  EdgeScope scope = EdgeScope::Unclassified;
};

struct Cfa {
  std::string name;
  LocId entry = kNoLocation;
  LocId exit = kNoLocation;
  std::vector<EdgeId> edges;
};

// The whole program as a set of per-function CFAs plus the symbol
// information the analyses need (global initializers, mutex names).
struct CfaSet {
  std::vector<Location> locations;
  std::vector<CfaEdge> edges;
  std::vector<std::vector<EdgeId>> out_edges;  // indexed by LocId
  std::map<std::string, Cfa> functions;
  LocId main_entry = kNoLocation;
  std::map<std::string, std::vector<std::string>> clone_index;  // base -> clone names
  std::vector<GlobalDecl> globals;
  std::set<std::string> mutexes;
  std::set<std::string> thread_vars;

  const Location& loc(LocId id) const { return locations[static_cast<size_t>(id)]; }
  const CfaEdge& edge(EdgeId id) const { return edges[static_cast<size_t>(id)]; }
  const std::vector<EdgeId>& outgoing(LocId id) const {
    return out_edges[static_cast<size_t>(id)];
  }
  // Display name in `function:index` form, used by ARG labels and DOT output.
  std::string loc_name(LocId id) const;
  bool has_thread_local_outgoing(LocId id) const;
};

// Human-readable operation text for edge labels and counterexamples.
std::string op_text(const Operation& op);

// Reserved lock names used by atomic sections and the POR encoding.
inline const std::string kAtomicLock = "__atomic__";
inline const std::string kLocalLock = "__local__";

}  // namespace threadreach
