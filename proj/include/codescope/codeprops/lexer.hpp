#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace codescope::props {

/// The five lexical classes. Punctuation and delimiters are folded into
/// Operator; unknown words are Identifier unless in the keyword table.
enum class TokenClass { Identifier, Keyword, Operator, Number, String };

const char* token_class_name(TokenClass c);

struct LexToken {
  std::string text;
  TokenClass cls;
  size_t begin = 0;  // byte offsets into the source
  size_t end = 0;
};

struct LexicalError : std::runtime_error {
  size_t offset;
  LexicalError(const std::string& msg, size_t off)
      : std::runtime_error(msg), offset(off) {}
};

bool is_keyword(const std::string& word);

/// Tokenizes source text. Strict on MiniPy; best-effort on arbitrary text
/// (unknown punctuation becomes Operator). Whitespace and comments are not
/// emitted. Throws LexicalError on an unterminated string.
std::vector<LexToken> lex_classify(const std::string& source);

/// Lexer with line structure, for the parser and the word-level tokenizer:
/// emits NEWLINE / INDENT / DEDENT pseudo-tokens in addition to lex tokens.
struct LineToken {
  enum Kind { Tok, Newline, Indent, Dedent, End } kind = Tok;
  LexToken tok;  // valid when kind == Tok
  size_t line = 0;
  size_t col = 0;
};

std::vector<LineToken> lex_lines(const std::string& source);

}  // namespace codescope::props
