#include "threadreach/lower.hpp"

#include <algorithm>
#include <functional>

namespace threadreach {

namespace {

struct Builder {
  CfaSet cfa;
  const Ast* ast = nullptr;

  LocId new_loc(const std::string& function, int index, bool is_error = false) {
    Location l;
    l.id = static_cast<LocId>(cfa.locations.size());
    l.function = function;
    l.index = index;
    l.is_error = is_error;
    cfa.locations.push_back(l);
    return l.id;
  }

  EdgeId add_edge(LocId from, LocId to, Operation op) {
    CfaEdge e;
    e.id = static_cast<EdgeId>(cfa.edges.size());
    e.from = from;
    e.to = to;
    e.op = std::move(op);
    cfa.edges.push_back(std::move(e));
    return cfa.edges.back().id;
  }
};

struct FunctionLowerer {
  Builder& b;
  const Function& fn;
  const std::set<std::string>& locals;
  int next_index = 0;
  std::vector<EdgeId> edges = {};
  std::vector<LocId> error_locs = {};

  LocId fresh(bool is_error = false) {
    if (is_error) {
      // numbered after the exit location once the body is lowered
      LocId id = b.new_loc(fn.name, -1, true);
      error_locs.push_back(id);
      return id;
    }
    return b.new_loc(fn.name, next_index++, false);
  }

  std::string qualify(const std::string& name) const {
    return locals.count(name) ? fn.name + "::" + name : name;
  }

  ExprPtr qualify_expr(const ExprPtr& e) const {
    if (!e) return e;
    switch (e->kind) {
      case Expr::Kind::Var: return Expr::var(qualify(e->name));
      case Expr::Kind::Unary: return Expr::unary(e->un_op, qualify_expr(e->lhs));
      case Expr::Kind::Binary:
        return Expr::binary(e->bin_op, qualify_expr(e->lhs), qualify_expr(e->rhs));
      default: return e;
    }
  }

  void edge(LocId from, LocId to, Operation op) { edges.push_back(b.add_edge(from, to, std::move(op))); }

  void lower_stmts(const std::vector<Stmt>& stmts, LocId from, LocId to) {
    if (stmts.empty()) {
      edge(from, to, SkipOp{});
      return;
    }
    LocId cur = from;
    for (size_t i = 0; i < stmts.size(); ++i) {
      LocId next = (i + 1 == stmts.size()) ? to : fresh();
      lower_stmt(stmts[i], cur, next);
      cur = next;
    }
  }

  // Lowers a branch body entered through an Assume edge; an empty body
  // collapses onto the Assume edge itself.
  void lower_branch(const ExprPtr& cond, bool polarity, const std::vector<Stmt>& body, LocId from,
                    LocId to) {
    if (body.empty()) {
      edge(from, to, AssumeOp{qualify_expr(cond), polarity});
      return;
    }
    LocId entry = fresh();
    edge(from, entry, AssumeOp{qualify_expr(cond), polarity});
    lower_stmts(body, entry, to);
  }

  void lower_stmt(const Stmt& s, LocId from, LocId to) {
    if (const auto* x = std::get_if<AssignStmt>(&s.node)) {
      edge(from, to, AssignOp{qualify(x->var), qualify_expr(x->value), false});
    } else if (const auto* x = std::get_if<LocalDeclStmt>(&s.node)) {
      ExprPtr init = x->init ? qualify_expr(x->init) : Expr::int_lit(0);
      edge(from, to, AssignOp{qualify(x->var), init, true});
    } else if (const auto* x = std::get_if<IfStmt>(&s.node)) {
      lower_branch(x->cond, true, x->then_body, from, to);
      lower_branch(x->cond, false, x->else_body, from, to);
    } else if (const auto* x = std::get_if<WhileStmt>(&s.node)) {
      lower_branch(x->cond, true, x->body, from, from);
      edge(from, to, AssumeOp{qualify_expr(x->cond), false});
    } else if (const auto* x = std::get_if<CreateStmt>(&s.node)) {
      edge(from, to, CreateOp{x->thread_var, x->function});
    } else if (const auto* x = std::get_if<JoinStmt>(&s.node)) {
      edge(from, to, JoinOp{x->thread_var});
    } else if (const auto* x = std::get_if<LockStmt>(&s.node)) {
      edge(from, to, LockOp{x->mutex});
    } else if (const auto* x = std::get_if<UnlockStmt>(&s.node)) {
      edge(from, to, UnlockOp{x->mutex});
    } else if (std::holds_alternative<AtomicBeginStmt>(s.node)) {
      edge(from, to, AtomicBeginOp{});
    } else if (std::holds_alternative<AtomicEndStmt>(s.node)) {
      edge(from, to, AtomicEndOp{});
    } else if (const auto* x = std::get_if<AssertStmt>(&s.node)) {
      edge(from, to, AssumeOp{qualify_expr(x->cond), true});
      LocId err = fresh(/*is_error=*/true);
      edge(from, err, AssumeOp{qualify_expr(x->cond), false});
    } else if (const auto* x = std::get_if<AssumeStmt>(&s.node)) {
      edge(from, to, AssumeOp{qualify_expr(x->cond), true});
    } else if (const auto* x = std::get_if<CallStmt>(&s.node)) {
      edge(from, to, CallPushOp{x->function});
    }
  }
};

void collect_local_names(const std::vector<Stmt>& stmts, std::set<std::string>& out) {
  for (const auto& s : stmts) {
    if (const auto* x = std::get_if<LocalDeclStmt>(&s.node)) out.insert(x->var);
    if (const auto* x = std::get_if<IfStmt>(&s.node)) {
      collect_local_names(x->then_body, out);
      collect_local_names(x->else_body, out);
    }
    if (const auto* x = std::get_if<WhileStmt>(&s.node)) collect_local_names(x->body, out);
  }
}

void collect_calls(const std::vector<Stmt>& stmts, std::set<std::string>& out) {
  for (const auto& s : stmts) {
    if (const auto* x = std::get_if<CallStmt>(&s.node)) out.insert(x->function);
    if (const auto* x = std::get_if<IfStmt>(&s.node)) {
      collect_calls(x->then_body, out);
      collect_calls(x->else_body, out);
    }
    if (const auto* x = std::get_if<WhileStmt>(&s.node)) collect_calls(x->body, out);
  }
}

void collect_create_targets(const std::vector<Stmt>& stmts, std::set<std::string>& out) {
  for (const auto& s : stmts) {
    if (const auto* x = std::get_if<CreateStmt>(&s.node)) out.insert(x->function);
    if (const auto* x = std::get_if<IfStmt>(&s.node)) {
      collect_create_targets(x->then_body, out);
      collect_create_targets(x->else_body, out);
    }
    if (const auto* x = std::get_if<WhileStmt>(&s.node)) collect_create_targets(x->body, out);
  }
}

void reject_recursion(const Ast& ast) {
  std::map<std::string, std::set<std::string>> callees;
  for (const auto& f : ast.functions) collect_calls(f.body, callees[f.name]);
  // Colors: 0 unvisited, 1 on stack, 2 done.
  std::map<std::string, int> color;
  std::function<void(const std::string&)> visit = [&](const std::string& f) {
    color[f] = 1;
    for (const auto& g : callees[f]) {
      if (color[g] == 1)
        throw LowerError("recursive call involving '" + g + "' is not supported");
      if (color[g] == 0) visit(g);
    }
    color[f] = 2;
  };
  for (const auto& f : ast.functions)
    if (color[f.name] == 0) visit(f.name);
}

void rebuild_out_edges(CfaSet& cfa) {
  cfa.out_edges.assign(cfa.locations.size(), {});
  for (const auto& e : cfa.edges) cfa.out_edges[static_cast<size_t>(e.from)].push_back(e.id);
}

ExprPtr rename_expr(const ExprPtr& e, const std::string& from_prefix,
                    const std::string& to_prefix) {
  if (!e) return e;
  switch (e->kind) {
    case Expr::Kind::Var:
      if (e->name.rfind(from_prefix, 0) == 0)
        return Expr::var(to_prefix + e->name.substr(from_prefix.size()));
      return e;
    case Expr::Kind::Unary:
      return Expr::unary(e->un_op, rename_expr(e->lhs, from_prefix, to_prefix));
    case Expr::Kind::Binary:
      return Expr::binary(e->bin_op, rename_expr(e->lhs, from_prefix, to_prefix),
                          rename_expr(e->rhs, from_prefix, to_prefix));
    default: return e;
  }
}

}  // namespace

CfaSet lower_to_cfa(const Ast& ast) {
  reject_recursion(ast);

  Builder b;
  b.ast = &ast;
  b.cfa.globals = ast.globals;
  b.cfa.mutexes.insert(ast.mutexes.begin(), ast.mutexes.end());
  b.cfa.thread_vars.insert(ast.thread_vars.begin(), ast.thread_vars.end());

  std::set<std::string> call_targets;
  for (const auto& f : ast.functions) collect_calls(f.body, call_targets);

  // main first so its entry chain occupies the lowest location ids.
  std::vector<const Function*> order;
  order.push_back(ast.find_function("main"));
  for (const auto& f : ast.functions)
    if (f.name != "main") order.push_back(&f);

  for (const Function* fp : order) {
    const Function& f = *fp;
    std::set<std::string> locals;
    collect_local_names(f.body, locals);
    FunctionLowerer fl{.b = b, .fn = f, .locals = locals};
    LocId entry = fl.fresh();
    // The exit location id is assigned after the body so intermediate
    // locations keep source order; its index is fixed afterwards.
    LocId exit = b.new_loc(f.name, -1);
    fl.lower_stmts(f.body, entry, exit);
    b.cfa.locations[static_cast<size_t>(exit)].index = fl.next_index++;
    b.cfa.locations[static_cast<size_t>(exit)].is_function_exit = true;
    for (LocId err : fl.error_locs)
      b.cfa.locations[static_cast<size_t>(err)].index = fl.next_index++;
    if (call_targets.count(f.name)) fl.edge(exit, exit, ReturnPopOp{});
    Cfa c;
    c.name = f.name;
    c.entry = entry;
    c.exit = exit;
    c.edges = std::move(fl.edges);
    b.cfa.functions[f.name] = std::move(c);
    if (f.name == "main") b.cfa.main_entry = entry;
  }

  rebuild_out_edges(b.cfa);
  return b.cfa;
}

namespace {

std::set<std::string> cloneable_functions(const CfaSet& cfa) {
  std::set<std::string> roots;
  for (const auto& e : cfa.edges)
    if (const auto* c = std::get_if<CreateOp>(&e.op)) roots.insert(c->function);
  // Closure over calls.
  std::set<std::string> result;
  std::vector<std::string> work(roots.begin(), roots.end());
  while (!work.empty()) {
    std::string f = work.back();
    work.pop_back();
    if (!result.insert(f).second) continue;
    auto it = cfa.functions.find(f);
    if (it == cfa.functions.end()) continue;
    for (EdgeId eid : it->second.edges)
      if (const auto* call = std::get_if<CallPushOp>(&cfa.edge(eid).op)) work.push_back(call->callee);
  }
  return result;
}

}  // namespace

CfaSet clone_functions(CfaSet cfa, int max_clones) {
  if (max_clones < 1) throw LowerError("max_clones must be >= 1");
  if (!cfa.clone_index.empty()) return cfa;  // already cloned

  std::set<std::string> cloneable = cloneable_functions(cfa);
  for (const auto& base : cloneable) {
    const Cfa source = cfa.functions.at(base);
    std::string src_prefix = base + "::";
    std::vector<std::string> clone_names;
    for (int k = 1; k <= max_clones; ++k) {
      std::string clone_name = base + "__" + std::to_string(k);
      std::string dst_prefix = clone_name + "::";
      std::map<LocId, LocId> loc_map;
      auto map_loc = [&](LocId old_id) {
        auto it = loc_map.find(old_id);
        if (it != loc_map.end()) return it->second;
        const Location& old_l = cfa.loc(old_id);
        Location l = old_l;
        l.id = static_cast<LocId>(cfa.locations.size());
        l.function = clone_name;
        cfa.locations.push_back(l);
        loc_map[old_id] = l.id;
        return l.id;
      };
      Cfa clone;
      clone.name = clone_name;
      clone.entry = map_loc(source.entry);
      clone.exit = map_loc(source.exit);
      for (EdgeId eid : source.edges) {
        const CfaEdge src_edge = cfa.edge(eid);
        CfaEdge e;
        e.id = static_cast<EdgeId>(cfa.edges.size());
        e.from = map_loc(src_edge.from);
        e.to = map_loc(src_edge.to);
        e.op = src_edge.op;
        if (auto* a = std::get_if<AssignOp>(&e.op)) {
          if (a->var.rfind(src_prefix, 0) == 0)
            a->var = dst_prefix + a->var.substr(src_prefix.size());
          a->value = rename_expr(a->value, src_prefix, dst_prefix);
        } else if (auto* as = std::get_if<AssumeOp>(&e.op)) {
          as->cond = rename_expr(as->cond, src_prefix, dst_prefix);
        } else if (auto* call = std::get_if<CallPushOp>(&e.op)) {
          call->callee = call->callee + "__" + std::to_string(k);
        }
        cfa.edges.push_back(std::move(e));
        clone.edges.push_back(cfa.edges.back().id);
      }
      clone_names.push_back(clone_name);
      cfa.functions[clone_name] = std::move(clone);
    }
    cfa.clone_index[base] = std::move(clone_names);
  }

  rebuild_out_edges(cfa);
  return cfa;
}

void classify_edges(CfaSet& cfa) {
  auto is_global_var = [](const std::string& name) { return name.find("::") == std::string::npos; };
  auto expr_touches_global = [&](const ExprPtr& e) {
    if (!e) return false;
    std::vector<std::string> vars;
    expr_vars(*e, vars);
    for (const auto& v : vars)
      if (is_global_var(v)) return true;
    return false;
  };
  for (auto& e : cfa.edges) {
    bool global = false;
    if (cfa.loc(e.to).is_error) {
      global = true;  // property-relevant edges must stay visible to POR
    } else if (const auto* a = std::get_if<AssignOp>(&e.op)) {
      global = is_global_var(a->var) || expr_touches_global(a->value);
    } else if (const auto* as = std::get_if<AssumeOp>(&e.op)) {
      global = expr_touches_global(as->cond);
    } else if (std::holds_alternative<CreateOp>(e.op) || std::holds_alternative<JoinOp>(e.op) ||
               std::holds_alternative<LockOp>(e.op) || std::holds_alternative<UnlockOp>(e.op) ||
               std::holds_alternative<AtomicBeginOp>(e.op) ||
               std::holds_alternative<AtomicEndOp>(e.op)) {
      global = true;
    }
    e.scope = global ? EdgeScope::Global : EdgeScope::ThreadLocal;
  }
}

}  // namespace threadreach
