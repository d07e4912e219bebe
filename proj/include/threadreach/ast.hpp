#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace threadreach {

// Expressions are linear integer arithmetic over declared variables,
// comparisons, boolean connectives and the nondet() leaf.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinOp { Add, Sub, Mul, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnOp { Neg, Not };

struct Expr {
  enum class Kind { IntLit, Var, Nondet, Unary, Binary };
  Kind kind = Kind::IntLit;
  std::int64_t value = 0;   // IntLit
  std::string name;         // Var (unqualified in the AST, qualified in CFA operations)
  UnOp un_op = UnOp::Neg;
  BinOp bin_op = BinOp::Add;
  ExprPtr lhs, rhs;         // Unary uses lhs only

  static ExprPtr int_lit(std::int64_t v);
  static ExprPtr var(std::string name);
  static ExprPtr nondet();
  static ExprPtr unary(UnOp op, ExprPtr e);
  static ExprPtr binary(BinOp op, ExprPtr l, ExprPtr r);
};

bool expr_equal(const Expr& a, const Expr& b);
std::string expr_text(const Expr& e);
// True iff e is a constant expression (no variables, no nondet).
bool expr_is_const(const Expr& e);
// Collects variable names referenced by e into out (with duplicates).
void expr_vars(const Expr& e, std::vector<std::string>& out);

struct Stmt;

struct AssignStmt { std::string var; ExprPtr value; };
struct IfStmt { ExprPtr cond; std::vector<Stmt> then_body; std::vector<Stmt> else_body; };
struct WhileStmt { ExprPtr cond; std::vector<Stmt> body; };
struct CreateStmt { std::string thread_var; std::string function; };
struct JoinStmt { std::string thread_var; };
struct LockStmt { std::string mutex; };
struct UnlockStmt { std::string mutex; };
struct AtomicBeginStmt {};
struct AtomicEndStmt {};
struct AssertStmt { ExprPtr cond; };
struct AssumeStmt { ExprPtr cond; };
struct LocalDeclStmt { std::string var; ExprPtr init; /* may be null: zero-initialized */ };
struct CallStmt { std::string function; };

struct Stmt {
  std::variant<AssignStmt, IfStmt, WhileStmt, CreateStmt, JoinStmt, LockStmt, UnlockStmt,
               AtomicBeginStmt, AtomicEndStmt, AssertStmt, AssumeStmt, LocalDeclStmt, CallStmt>
      node;
};

struct GlobalDecl {
  std::string name;
  std::optional<std::int64_t> init;  // missing initializer means 0
};

struct Function {
  std::string name;
  std::vector<Stmt> body;
};

// Parsed program: integer globals, mutex and thread-variable declarations,
// and a set of functions containing exactly one `main`.
struct Ast {
  std::vector<GlobalDecl> globals;
  std::vector<std::string> mutexes;
  std::vector<std::string> thread_vars;
  std::vector<Function> functions;

  const Function* find_function(const std::string& name) const;
  bool has_loops() const;
};

bool ast_equal(const Ast& a, const Ast& b);

// Renders the Ast back to source text; reparsing the result yields a
// structurally equal Ast.
std::string unparse(const Ast& ast);

}  // namespace threadreach
