#pragma once

#include <stdexcept>

#include "codescope/codeprops/ast.hpp"
#include "codescope/codeprops/lexer.hpp"

namespace codescope::props {

struct SyntaxError : std::runtime_error {
  size_t line;
  size_t col;
  std::string expected;
  SyntaxError(const std::string& msg, size_t ln, size_t c, std::string exp)
      : std::runtime_error(msg + " at line " + std::to_string(ln) + ", col " +
                           std::to_string(c) + " (expected " + exp + ")"),
        line(ln), col(c), expected(std::move(exp)) {}
};

/// Parses MiniPy source into a Module AST (one or more function defs, or
/// bare statements). Throws SyntaxError with position and expected-token set.
AstPtr parse(const std::string& source);

/// Parses and returns the first FunctionDef in the module.
AstPtr parse_function(const std::string& source);

}  // namespace codescope::props
