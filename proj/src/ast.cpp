#include "threadreach/ast.hpp"

#include <sstream>

namespace threadreach {

ExprPtr Expr::int_lit(std::int64_t v) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::IntLit;
  e->value = v;
  return e;
}

ExprPtr Expr::var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Var;
  e->name = std::move(name);
  return e;
}

ExprPtr Expr::nondet() {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Nondet;
  return e;
}

ExprPtr Expr::unary(UnOp op, ExprPtr inner) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Unary;
  e->un_op = op;
  e->lhs = std::move(inner);
  return e;
}

ExprPtr Expr::binary(BinOp op, ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Binary;
  e->bin_op = op;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::IntLit: return a.value == b.value;
    case Expr::Kind::Var: return a.name == b.name;
    case Expr::Kind::Nondet: return true;
    case Expr::Kind::Unary: return a.un_op == b.un_op && expr_equal(*a.lhs, *b.lhs);
    case Expr::Kind::Binary:
      return a.bin_op == b.bin_op && expr_equal(*a.lhs, *b.lhs) && expr_equal(*a.rhs, *b.rhs);
  }
  return false;
}

namespace {

const char* bin_op_text(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
  }
  return "?";
}

int precedence(BinOp op) {
  switch (op) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Eq:
    case BinOp::Ne: return 3;
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge: return 4;
    case BinOp::Add:
    case BinOp::Sub: return 5;
    case BinOp::Mul: return 6;
  }
  return 0;
}

void render(const Expr& e, int parent_prec, std::ostream& out) {
  switch (e.kind) {
    case Expr::Kind::IntLit:
      out << e.value;
      return;
    case Expr::Kind::Var:
      out << e.name;
      return;
    case Expr::Kind::Nondet:
      out << "nondet()";
      return;
    case Expr::Kind::Unary:
      out << (e.un_op == UnOp::Neg ? "-" : "!");
      render(*e.lhs, 7, out);
      return;
    case Expr::Kind::Binary: {
      int prec = precedence(e.bin_op);
      bool paren = prec < parent_prec;
      if (paren) out << "(";
      render(*e.lhs, prec, out);
      out << " " << bin_op_text(e.bin_op) << " ";
      render(*e.rhs, prec + 1, out);
      if (paren) out << ")";
      return;
    }
  }
}

}  // namespace

std::string expr_text(const Expr& e) {
  std::ostringstream out;
  render(e, 0, out);
  return out.str();
}

bool expr_is_const(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::IntLit: return true;
    case Expr::Kind::Var:
    case Expr::Kind::Nondet: return false;
    case Expr::Kind::Unary: return expr_is_const(*e.lhs);
    case Expr::Kind::Binary: return expr_is_const(*e.lhs) && expr_is_const(*e.rhs);
  }
  return false;
}

void expr_vars(const Expr& e, std::vector<std::string>& out) {
  switch (e.kind) {
    case Expr::Kind::Var: out.push_back(e.name); return;
    case Expr::Kind::Unary: expr_vars(*e.lhs, out); return;
    case Expr::Kind::Binary:
      expr_vars(*e.lhs, out);
      expr_vars(*e.rhs, out);
      return;
    default: return;
  }
}

const Function* Ast::find_function(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

namespace {

bool stmts_have_loops(const std::vector<Stmt>& stmts) {
  for (const auto& s : stmts) {
    if (std::holds_alternative<WhileStmt>(s.node)) return true;
    if (const auto* ifs = std::get_if<IfStmt>(&s.node)) {
      if (stmts_have_loops(ifs->then_body) || stmts_have_loops(ifs->else_body)) return true;
    }
  }
  return false;
}

bool stmt_equal(const Stmt& a, const Stmt& b);

bool stmts_equal(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!stmt_equal(a[i], b[i])) return false;
  return true;
}

bool opt_expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return expr_equal(*a, *b);
}

bool stmt_equal(const Stmt& a, const Stmt& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* x = std::get_if<AssignStmt>(&a.node)) {
    const auto& y = std::get<AssignStmt>(b.node);
    return x->var == y.var && expr_equal(*x->value, *y.value);
  }
  if (const auto* x = std::get_if<IfStmt>(&a.node)) {
    const auto& y = std::get<IfStmt>(b.node);
    return expr_equal(*x->cond, *y.cond) && stmts_equal(x->then_body, y.then_body) &&
           stmts_equal(x->else_body, y.else_body);
  }
  if (const auto* x = std::get_if<WhileStmt>(&a.node)) {
    const auto& y = std::get<WhileStmt>(b.node);
    return expr_equal(*x->cond, *y.cond) && stmts_equal(x->body, y.body);
  }
  if (const auto* x = std::get_if<CreateStmt>(&a.node)) {
    const auto& y = std::get<CreateStmt>(b.node);
    return x->thread_var == y.thread_var && x->function == y.function;
  }
  if (const auto* x = std::get_if<JoinStmt>(&a.node))
    return x->thread_var == std::get<JoinStmt>(b.node).thread_var;
  if (const auto* x = std::get_if<LockStmt>(&a.node))
    return x->mutex == std::get<LockStmt>(b.node).mutex;
  if (const auto* x = std::get_if<UnlockStmt>(&a.node))
    return x->mutex == std::get<UnlockStmt>(b.node).mutex;
  if (std::holds_alternative<AtomicBeginStmt>(a.node)) return true;
  if (std::holds_alternative<AtomicEndStmt>(a.node)) return true;
  if (const auto* x = std::get_if<AssertStmt>(&a.node))
    return expr_equal(*x->cond, *std::get<AssertStmt>(b.node).cond);
  if (const auto* x = std::get_if<AssumeStmt>(&a.node))
    return expr_equal(*x->cond, *std::get<AssumeStmt>(b.node).cond);
  if (const auto* x = std::get_if<LocalDeclStmt>(&a.node)) {
    const auto& y = std::get<LocalDeclStmt>(b.node);
    return x->var == y.var && opt_expr_equal(x->init, y.init);
  }
  if (const auto* x = std::get_if<CallStmt>(&a.node))
    return x->function == std::get<CallStmt>(b.node).function;
  return false;
}

void render_stmts(const std::vector<Stmt>& stmts, int indent, std::ostream& out);

void render_stmt(const Stmt& s, int indent, std::ostream& out) {
  std::string pad(static_cast<size_t>(indent) * 2, ' ');
  out << pad;
  if (const auto* x = std::get_if<AssignStmt>(&s.node)) {
    out << x->var << " = " << expr_text(*x->value) << ";\n";
  } else if (const auto* x = std::get_if<IfStmt>(&s.node)) {
    out << "if (" << expr_text(*x->cond) << ") {\n";
    render_stmts(x->then_body, indent + 1, out);
    out << pad << "}";
    if (!x->else_body.empty()) {
      out << " else {\n";
      render_stmts(x->else_body, indent + 1, out);
      out << pad << "}";
    }
    out << "\n";
  } else if (const auto* x = std::get_if<WhileStmt>(&s.node)) {
    out << "while (" << expr_text(*x->cond) << ") {\n";
    render_stmts(x->body, indent + 1, out);
    out << pad << "}\n";
  } else if (const auto* x = std::get_if<CreateStmt>(&s.node)) {
    out << "create(" << x->thread_var << ", " << x->function << ");\n";
  } else if (const auto* x = std::get_if<JoinStmt>(&s.node)) {
    out << "join(" << x->thread_var << ");\n";
  } else if (const auto* x = std::get_if<LockStmt>(&s.node)) {
    out << "lock(" << x->mutex << ");\n";
  } else if (const auto* x = std::get_if<UnlockStmt>(&s.node)) {
    out << "unlock(" << x->mutex << ");\n";
  } else if (std::holds_alternative<AtomicBeginStmt>(s.node)) {
    out << "atomic_begin;\n";
  } else if (std::holds_alternative<AtomicEndStmt>(s.node)) {
    out << "atomic_end;\n";
  } else if (const auto* x = std::get_if<AssertStmt>(&s.node)) {
    out << "assert(" << expr_text(*x->cond) << ");\n";
  } else if (const auto* x = std::get_if<AssumeStmt>(&s.node)) {
    out << "assume(" << expr_text(*x->cond) << ");\n";
  } else if (const auto* x = std::get_if<LocalDeclStmt>(&s.node)) {
    out << "local int " << x->var;
    if (x->init) out << " = " << expr_text(*x->init);
    out << ";\n";
  } else if (const auto* x = std::get_if<CallStmt>(&s.node)) {
    out << x->function << "();\n";
  }
}

void render_stmts(const std::vector<Stmt>& stmts, int indent, std::ostream& out) {
  for (const auto& s : stmts) render_stmt(s, indent, out);
}

}  // namespace

bool Ast::has_loops() const {
  for (const auto& f : functions)
    if (stmts_have_loops(f.body)) return true;
  return false;
}

bool ast_equal(const Ast& a, const Ast& b) {
  if (a.globals.size() != b.globals.size() || a.mutexes != b.mutexes ||
      a.thread_vars != b.thread_vars || a.functions.size() != b.functions.size())
    return false;
  for (size_t i = 0; i < a.globals.size(); ++i) {
    if (a.globals[i].name != b.globals[i].name || a.globals[i].init != b.globals[i].init)
      return false;
  }
  for (size_t i = 0; i < a.functions.size(); ++i) {
    if (a.functions[i].name != b.functions[i].name ||
        !stmts_equal(a.functions[i].body, b.functions[i].body))
      return false;
  }
  return true;
}

std::string unparse(const Ast& ast) {
  std::ostringstream out;
  for (const auto& g : ast.globals) {
    out << "int " << g.name;
    if (g.init) out << " = " << *g.init;
    out << ";\n";
  }
  for (const auto& m : ast.mutexes) out << "mutex " << m << ";\n";
  for (const auto& t : ast.thread_vars) out << "thread " << t << ";\n";
  for (const auto& f : ast.functions) {
    out << "\nvoid " << f.name << "() {\n";
    render_stmts(f.body, 1, out);
    out << "}\n";
  }
  return out.str();
}

}  // namespace threadreach
