#include "threadreach/parser.hpp"

#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace threadreach {

std::string ParseError::format(ParseErrorKind kind, int line, int column,
                               const std::string& message) {
  const char* tag = kind == ParseErrorKind::SyntaxError      ? "syntax error"
                    : kind == ParseErrorKind::DuplicateName ? "duplicate name"
                                                            : "unknown identifier";
  std::ostringstream out;
  out << line << ":" << column << ": " << tag << ": " << message;
  return out.str();
}

namespace {

enum class Tok {
  End, Ident, Int,
  KwInt, KwMutex, KwThread, KwVoid, KwIf, KwElse, KwWhile, KwCreate, KwJoin, KwLock, KwUnlock,
  KwAtomicBegin, KwAtomicEnd, KwAssert, KwAssume, KwLocal, KwNondet,
  LParen, RParen, LBrace, RBrace, Semi, Comma,
  Assign, Plus, Minus, Star, Eq, Ne, Lt, Le, Gt, Ge, AndAnd, OrOr, Bang,
};

struct Token {
  Tok kind;
  std::string text;
  std::int64_t value = 0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  Token next() {
    skip_ws_and_comments();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= src_.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        advance();
      t.text = src_.substr(start, pos_ - start);
      t.kind = keyword(t.text);
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      t.text = src_.substr(start, pos_ - start);
      try {
        t.value = std::stoll(t.text);
      } catch (const std::out_of_range&) {
        throw ParseError(ParseErrorKind::SyntaxError, t.line, t.col,
                         "integer literal out of 64-bit range");
      }
      t.kind = Tok::Int;
      return t;
    }
    auto two = [&](char a, char b) {
      return c == a && pos_ + 1 < src_.size() && src_[pos_ + 1] == b;
    };
    if (two('=', '=')) { advance(); advance(); t.kind = Tok::Eq; return t; }
    if (two('!', '=')) { advance(); advance(); t.kind = Tok::Ne; return t; }
    if (two('<', '=')) { advance(); advance(); t.kind = Tok::Le; return t; }
    if (two('>', '=')) { advance(); advance(); t.kind = Tok::Ge; return t; }
    if (two('&', '&')) { advance(); advance(); t.kind = Tok::AndAnd; return t; }
    if (two('|', '|')) { advance(); advance(); t.kind = Tok::OrOr; return t; }
    advance();
    switch (c) {
      case '(': t.kind = Tok::LParen; return t;
      case ')': t.kind = Tok::RParen; return t;
      case '{': t.kind = Tok::LBrace; return t;
      case '}': t.kind = Tok::RBrace; return t;
      case ';': t.kind = Tok::Semi; return t;
      case ',': t.kind = Tok::Comma; return t;
      case '=': t.kind = Tok::Assign; return t;
      case '+': t.kind = Tok::Plus; return t;
      case '-': t.kind = Tok::Minus; return t;
      case '*': t.kind = Tok::Star; return t;
      case '<': t.kind = Tok::Lt; return t;
      case '>': t.kind = Tok::Gt; return t;
      case '!': t.kind = Tok::Bang; return t;
      default:
        throw ParseError(ParseErrorKind::SyntaxError, t.line, t.col,
                         std::string("unexpected character '") + c + "'");
    }
  }

 private:
  static Tok keyword(const std::string& s) {
    static const std::map<std::string, Tok> kw = {
        {"int", Tok::KwInt},       {"mutex", Tok::KwMutex},   {"thread", Tok::KwThread},
        {"void", Tok::KwVoid},     {"if", Tok::KwIf},         {"else", Tok::KwElse},
        {"while", Tok::KwWhile},   {"create", Tok::KwCreate}, {"join", Tok::KwJoin},
        {"lock", Tok::KwLock},     {"unlock", Tok::KwUnlock}, {"atomic_begin", Tok::KwAtomicBegin},
        {"atomic_end", Tok::KwAtomicEnd}, {"assert", Tok::KwAssert}, {"assume", Tok::KwAssume},
        {"local", Tok::KwLocal},   {"nondet", Tok::KwNondet},
    };
    auto it = kw.find(s);
    return it == kw.end() ? Tok::Ident : it->second;
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws_and_comments() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
      if (pos_ + 1 < src_.size() && src_[pos_] == '/' && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        continue;
      }
      if (pos_ + 1 < src_.size() && src_[pos_] == '/' && src_[pos_ + 1] == '*') {
        int line = line_, col = col_;
        advance();
        advance();
        while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) advance();
        if (pos_ + 1 >= src_.size())
          throw ParseError(ParseErrorKind::SyntaxError, line, col, "unterminated comment");
        advance();
        advance();
        continue;
      }
      return;
    }
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lexer_(src) { cur_ = lexer_.next(); }

  Ast parse_program() {
    Ast ast;
    for (;;) {
      if (cur_.kind == Tok::KwInt) {
        eat();
        Token name = expect(Tok::Ident, "global variable name");
        GlobalDecl g{name.text, std::nullopt};
        if (cur_.kind == Tok::Assign) {
          eat();
          bool neg = false;
          if (cur_.kind == Tok::Minus) {
            neg = true;
            eat();
          }
          Token v = expect(Tok::Int, "integer initializer");
          g.init = neg ? -v.value : v.value;
        }
        expect(Tok::Semi, "';'");
        ast.globals.push_back(std::move(g));
      } else if (cur_.kind == Tok::KwMutex) {
        eat();
        Token name = expect(Tok::Ident, "mutex name");
        expect(Tok::Semi, "';'");
        ast.mutexes.push_back(name.text);
      } else if (cur_.kind == Tok::KwThread) {
        eat();
        Token name = expect(Tok::Ident, "thread variable name");
        expect(Tok::Semi, "';'");
        ast.thread_vars.push_back(name.text);
      } else {
        break;
      }
    }
    while (cur_.kind == Tok::KwVoid) ast.functions.push_back(parse_function());
    if (cur_.kind != Tok::End)
      error_here("expected declaration or function definition");
    validate(ast);
    return ast;
  }

 private:
  Function parse_function() {
    expect(Tok::KwVoid, "'void'");
    Token name = expect(Tok::Ident, "function name");
    expect(Tok::LParen, "'('");
    expect(Tok::RParen, "')'");
    Function f;
    f.name = name.text;
    f.body = parse_block();
    return f;
  }

  std::vector<Stmt> parse_block() {
    expect(Tok::LBrace, "'{'");
    std::vector<Stmt> stmts;
    while (cur_.kind != Tok::RBrace) stmts.push_back(parse_stmt());
    eat();
    return stmts;
  }

  Stmt parse_stmt() {
    Stmt s;
    switch (cur_.kind) {
      case Tok::KwIf: {
        eat();
        expect(Tok::LParen, "'('");
        IfStmt node;
        node.cond = parse_expr();
        expect(Tok::RParen, "')'");
        node.then_body = parse_block();
        if (cur_.kind == Tok::KwElse) {
          eat();
          node.else_body = parse_block();
        }
        s.node = std::move(node);
        return s;
      }
      case Tok::KwWhile: {
        eat();
        expect(Tok::LParen, "'('");
        WhileStmt node;
        node.cond = parse_expr();
        expect(Tok::RParen, "')'");
        node.body = parse_block();
        s.node = std::move(node);
        return s;
      }
      case Tok::KwCreate: {
        eat();
        expect(Tok::LParen, "'('");
        Token tv = expect(Tok::Ident, "thread variable");
        expect(Tok::Comma, "','");
        Token fn = expect(Tok::Ident, "function name");
        expect(Tok::RParen, "')'");
        expect(Tok::Semi, "';'");
        s.node = CreateStmt{tv.text, fn.text};
        return s;
      }
      case Tok::KwJoin: {
        eat();
        expect(Tok::LParen, "'('");
        Token tv = expect(Tok::Ident, "thread variable");
        expect(Tok::RParen, "')'");
        expect(Tok::Semi, "';'");
        s.node = JoinStmt{tv.text};
        return s;
      }
      case Tok::KwLock:
      case Tok::KwUnlock: {
        bool is_lock = cur_.kind == Tok::KwLock;
        eat();
        expect(Tok::LParen, "'('");
        Token m = expect(Tok::Ident, "mutex name");
        expect(Tok::RParen, "')'");
        expect(Tok::Semi, "';'");
        if (is_lock)
          s.node = LockStmt{m.text};
        else
          s.node = UnlockStmt{m.text};
        return s;
      }
      case Tok::KwAtomicBegin:
        eat();
        expect(Tok::Semi, "';'");
        s.node = AtomicBeginStmt{};
        return s;
      case Tok::KwAtomicEnd:
        eat();
        expect(Tok::Semi, "';'");
        s.node = AtomicEndStmt{};
        return s;
      case Tok::KwAssert:
      case Tok::KwAssume: {
        bool is_assert = cur_.kind == Tok::KwAssert;
        eat();
        expect(Tok::LParen, "'('");
        ExprPtr cond = parse_expr();
        expect(Tok::RParen, "')'");
        expect(Tok::Semi, "';'");
        if (is_assert)
          s.node = AssertStmt{cond};
        else
          s.node = AssumeStmt{cond};
        return s;
      }
      case Tok::KwLocal: {
        eat();
        expect(Tok::KwInt, "'int'");
        Token name = expect(Tok::Ident, "local variable name");
        LocalDeclStmt node{name.text, nullptr};
        if (cur_.kind == Tok::Assign) {
          eat();
          node.init = parse_expr();
        }
        expect(Tok::Semi, "';'");
        s.node = std::move(node);
        return s;
      }
      case Tok::Ident: {
        Token name = cur_;
        eat();
        if (cur_.kind == Tok::LParen) {
          eat();
          expect(Tok::RParen, "')'");
          expect(Tok::Semi, "';'");
          s.node = CallStmt{name.text};
          return s;
        }
        expect(Tok::Assign, "'=' or '(' after identifier");
        AssignStmt node;
        node.var = name.text;
        node.value = parse_expr();
        expect(Tok::Semi, "';'");
        s.node = std::move(node);
        return s;
      }
      default:
        error_here("expected statement");
    }
    return s;  // unreachable
  }

  // expr := or
  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    ExprPtr e = parse_and();
    while (cur_.kind == Tok::OrOr) {
      eat();
      e = Expr::binary(BinOp::Or, e, parse_and());
    }
    return e;
  }

  ExprPtr parse_and() {
    ExprPtr e = parse_cmp();
    while (cur_.kind == Tok::AndAnd) {
      eat();
      e = Expr::binary(BinOp::And, e, parse_cmp());
    }
    return e;
  }

  ExprPtr parse_cmp() {
    ExprPtr e = parse_add();
    for (;;) {
      BinOp op;
      switch (cur_.kind) {
        case Tok::Eq: op = BinOp::Eq; break;
        case Tok::Ne: op = BinOp::Ne; break;
        case Tok::Lt: op = BinOp::Lt; break;
        case Tok::Le: op = BinOp::Le; break;
        case Tok::Gt: op = BinOp::Gt; break;
        case Tok::Ge: op = BinOp::Ge; break;
        default: return e;
      }
      eat();
      e = Expr::binary(op, e, parse_add());
    }
  }

  ExprPtr parse_add() {
    ExprPtr e = parse_mul();
    for (;;) {
      if (cur_.kind == Tok::Plus) {
        eat();
        e = Expr::binary(BinOp::Add, e, parse_mul());
      } else if (cur_.kind == Tok::Minus) {
        eat();
        e = Expr::binary(BinOp::Sub, e, parse_mul());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_mul() {
    ExprPtr e = parse_unary();
    while (cur_.kind == Tok::Star) {
      Token star = cur_;
      eat();
      ExprPtr rhs = parse_unary();
      // Linear arithmetic: one factor of a product must be constant.
      if (!expr_is_const(*e) && !expr_is_const(*rhs))
        throw ParseError(ParseErrorKind::SyntaxError, star.line, star.col,
                         "non-linear multiplication: one factor must be constant");
      e = Expr::binary(BinOp::Mul, e, rhs);
    }
    return e;
  }

  ExprPtr parse_unary() {
    if (cur_.kind == Tok::Minus) {
      eat();
      return Expr::unary(UnOp::Neg, parse_unary());
    }
    if (cur_.kind == Tok::Bang) {
      eat();
      return Expr::unary(UnOp::Not, parse_unary());
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    switch (cur_.kind) {
      case Tok::Int: {
        std::int64_t v = cur_.value;
        eat();
        return Expr::int_lit(v);
      }
      case Tok::KwNondet: {
        eat();
        expect(Tok::LParen, "'('");
        expect(Tok::RParen, "')'");
        return Expr::nondet();
      }
      case Tok::Ident: {
        Token t = cur_;
        eat();
        return Expr::var(t.text);
      }
      case Tok::LParen: {
        eat();
        ExprPtr e = parse_expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      default:
        error_here("expected expression");
    }
    return nullptr;  // unreachable
  }

  // Name resolution and well-formedness checks. Integer variables live in one
  // namespace with mutexes, thread variables and functions: no shadowing.
  void validate(const Ast& ast) {
    std::set<std::string> taken;
    auto declare = [&](const std::string& name, const char* what) {
      if (!taken.insert(name).second)
        throw ParseError(ParseErrorKind::DuplicateName, 1, 1,
                         std::string(what) + " '" + name + "' redeclares an existing name");
    };
    std::set<std::string> globals, mutexes, threads, funcs;
    for (const auto& g : ast.globals) {
      declare(g.name, "global");
      globals.insert(g.name);
    }
    for (const auto& m : ast.mutexes) {
      declare(m, "mutex");
      mutexes.insert(m);
    }
    for (const auto& t : ast.thread_vars) {
      declare(t, "thread variable");
      threads.insert(t);
    }
    int mains = 0;
    for (const auto& f : ast.functions) {
      declare(f.name, "function");
      funcs.insert(f.name);
      if (f.name == "main") ++mains;
    }
    if (mains != 1)
      throw ParseError(ParseErrorKind::SyntaxError, 1, 1,
                       "program must define exactly one function named 'main'");

    for (const auto& f : ast.functions) {
      std::set<std::string> locals;
      check_stmts(f.body, f, locals, globals, mutexes, threads, funcs, taken);
    }
  }

  void check_int_var(const std::string& name, const std::set<std::string>& locals,
                     const std::set<std::string>& globals) {
    if (!locals.count(name) && !globals.count(name))
      throw ParseError(ParseErrorKind::UnknownIdentifier, 1, 1,
                       "'" + name + "' is not a declared integer variable in scope");
  }

  void check_expr(const Expr& e, const std::set<std::string>& locals,
                  const std::set<std::string>& globals) {
    std::vector<std::string> vars;
    expr_vars(e, vars);
    for (const auto& v : vars) check_int_var(v, locals, globals);
  }

  void check_stmts(const std::vector<Stmt>& stmts, const Function& f,
                   std::set<std::string>& locals, const std::set<std::string>& globals,
                   const std::set<std::string>& mutexes, const std::set<std::string>& threads,
                   const std::set<std::string>& funcs, std::set<std::string>& taken) {
    for (const auto& s : stmts) {
      if (const auto* x = std::get_if<AssignStmt>(&s.node)) {
        check_int_var(x->var, locals, globals);
        check_expr(*x->value, locals, globals);
      } else if (const auto* x = std::get_if<IfStmt>(&s.node)) {
        check_expr(*x->cond, locals, globals);
        check_stmts(x->then_body, f, locals, globals, mutexes, threads, funcs, taken);
        check_stmts(x->else_body, f, locals, globals, mutexes, threads, funcs, taken);
      } else if (const auto* x = std::get_if<WhileStmt>(&s.node)) {
        check_expr(*x->cond, locals, globals);
        check_stmts(x->body, f, locals, globals, mutexes, threads, funcs, taken);
      } else if (const auto* x = std::get_if<CreateStmt>(&s.node)) {
        if (!threads.count(x->thread_var))
          throw ParseError(ParseErrorKind::UnknownIdentifier, 1, 1,
                           "'" + x->thread_var + "' is not a declared thread variable");
        if (!funcs.count(x->function))
          throw ParseError(ParseErrorKind::UnknownIdentifier, 1, 1,
                           "'" + x->function + "' is not a defined function");
        if (x->function == "main")
          throw ParseError(ParseErrorKind::SyntaxError, 1, 1,
                           "'main' cannot be started as a thread");
      } else if (const auto* x = std::get_if<JoinStmt>(&s.node)) {
        if (!threads.count(x->thread_var))
          throw ParseError(ParseErrorKind::UnknownIdentifier, 1, 1,
                           "'" + x->thread_var + "' is not a declared thread variable");
      } else if (const auto* x = std::get_if<LockStmt>(&s.node)) {
        if (!mutexes.count(x->mutex))
          throw ParseError(ParseErrorKind::UnknownIdentifier, 1, 1,
                           "'" + x->mutex + "' is not a declared mutex");
      } else if (const auto* x = std::get_if<UnlockStmt>(&s.node)) {
        if (!mutexes.count(x->mutex))
          throw ParseError(ParseErrorKind::UnknownIdentifier, 1, 1,
                           "'" + x->mutex + "' is not a declared mutex");
      } else if (const auto* x = std::get_if<AssertStmt>(&s.node)) {
        check_expr(*x->cond, locals, globals);
      } else if (const auto* x = std::get_if<AssumeStmt>(&s.node)) {
        check_expr(*x->cond, locals, globals);
      } else if (const auto* x = std::get_if<LocalDeclStmt>(&s.node)) {
        if (taken.count(x->var) || locals.count(x->var))
          throw ParseError(ParseErrorKind::DuplicateName, 1, 1,
                           "local '" + x->var + "' redeclares an existing name");
        if (x->init) check_expr(*x->init, locals, globals);
        locals.insert(x->var);
      } else if (const auto* x = std::get_if<CallStmt>(&s.node)) {
        if (!funcs.count(x->function))
          throw ParseError(ParseErrorKind::UnknownIdentifier, 1, 1,
                           "'" + x->function + "' is not a defined function");
        if (x->function == "main")
          throw ParseError(ParseErrorKind::SyntaxError, 1, 1, "'main' cannot be called");
      }
    }
  }

  [[noreturn]] void error_here(const std::string& message) {
    throw ParseError(ParseErrorKind::SyntaxError, cur_.line, cur_.col,
                     message + " (got '" + (cur_.kind == Tok::End ? "<eof>" : cur_.text) + "')");
  }

  Token expect(Tok kind, const std::string& what) {
    if (cur_.kind != kind) error_here("expected " + what);
    Token t = cur_;
    eat();
    return t;
  }

  void eat() { cur_ = lexer_.next(); }

  Lexer lexer_;
  Token cur_;
};

}  // namespace

Ast parse(const std::string& source_text) {
  Parser p(source_text);
  return p.parse_program();
}

}  // namespace threadreach
