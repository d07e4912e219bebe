#pragma once

#include <stdexcept>
#include <string>

#include "threadreach/ast.hpp"

namespace threadreach {

enum class ParseErrorKind { SyntaxError, DuplicateName, UnknownIdentifier };

struct ParseError : std::runtime_error {
  ParseError(ParseErrorKind kind, int line, int column, const std::string& message)
      : std::runtime_error(format(kind, line, column, message)),
        kind(kind), line(line), column(column), detail(message) {}

  static std::string format(ParseErrorKind kind, int line, int column, const std::string& message);

  ParseErrorKind kind;
  int line;
  int column;
  std::string detail;
};

// Parses program text (UTF-8/ASCII .mtc source) and validates identifiers:
// unique declarations, exactly one main, declared-before-use variables,
// linear arithmetic only. Throws ParseError on any defect.
Ast parse(const std::string& source_text);

}  // namespace threadreach
