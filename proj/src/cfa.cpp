#include "threadreach/cfa.hpp"

namespace threadreach {

std::string CfaSet::loc_name(LocId id) const {
  if (id == kUnknownLocation) return "T";
  const Location& l = loc(id);
  return l.function + ":" + std::to_string(l.index);
}

bool CfaSet::has_thread_local_outgoing(LocId id) const {
  for (EdgeId e : outgoing(id))
    if (edge(e).scope == EdgeScope::ThreadLocal) return true;
  return false;
}

std::string op_text(const Operation& op) {
  if (const auto* x = std::get_if<AssignOp>(&op)) {
    std::string head = x->is_decl ? "local int " : "";
    return head + x->var + " = " + expr_text(*x->value);
  }
  if (const auto* x = std::get_if<AssumeOp>(&op)) {
    std::string c = expr_text(*x->cond);
    return x->polarity ? "[" + c + "]" : "[!(" + c + ")]";
  }
  if (const auto* x = std::get_if<CreateOp>(&op))
    return "create(" + x->thread_var + ", " + x->function + ")";
  if (const auto* x = std::get_if<JoinOp>(&op)) return "join(" + x->thread_var + ")";
  if (const auto* x = std::get_if<LockOp>(&op)) return "lock(" + x->mutex + ")";
  if (const auto* x = std::get_if<UnlockOp>(&op)) return "unlock(" + x->mutex + ")";
  if (std::holds_alternative<AtomicBeginOp>(op)) return "atomic_begin";
  if (std::holds_alternative<AtomicEndOp>(op)) return "atomic_end";
  if (const auto* x = std::get_if<CallPushOp>(&op)) return "call " + x->callee + "()";
  if (std::holds_alternative<ReturnPopOp>(op)) return "return";
  return "skip";
}

}  // namespace threadreach
