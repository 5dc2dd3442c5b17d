#include "codescope/codeprops/lexer.hpp"

#include <array>
#include <cctype>
#include <set>

namespace codescope::props {

const char* token_class_name(TokenClass c) {
  switch (c) {
    case TokenClass::Identifier: return "Identifier";
    case TokenClass::Keyword: return "Keyword";
    case TokenClass::Operator: return "Operator";
    case TokenClass::Number: return "Number";
    case TokenClass::String: return "String";
  }
  return "?";
}

bool is_keyword(const std::string& word) {
  static const std::set<std::string> kw = {"def",  "return", "if",  "elif",
                                           "else", "while",  "for", "in",
                                           "and",  "or",     "not", "pass"};
  return kw.count(word) > 0;
}

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Longest-match punctuation. Two-char operators first.
size_t match_operator(const std::string& s, size_t i) {
  static const std::array<const char*, 6> two = {"==", "!=", "<=", ">=", "//", "**"};
  if (i + 1 < s.size()) {
    for (const char* op : two)
      if (s[i] == op[0] && s[i + 1] == op[1]) return 2;
  }
  return 1;  // any single punctuation char is an Operator
}

}  // namespace

std::vector<LexToken> lex_classify(const std::string& source) {
  std::vector<LexToken> out;
  size_t i = 0, n = source.size();
  while (i < n) {
    char c = source[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    if (c == '#') {  // comment to end of line
      while (i < n && source[i] != '\n') ++i;
      continue;
    }
    size_t begin = i;
    if (is_ident_start(c)) {
      while (i < n && is_ident_char(source[i])) ++i;
      std::string text = source.substr(begin, i - begin);
      TokenClass cls = is_keyword(text) ? TokenClass::Keyword : TokenClass::Identifier;
      out.push_back({std::move(text), cls, begin, i});
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < n && (std::isdigit(static_cast<unsigned char>(source[i])) ||
                       source[i] == '.'))
        ++i;
      out.push_back({source.substr(begin, i - begin), TokenClass::Number, begin, i});
    } else if (c == '"' || c == '\'') {
      char quote = c;
      ++i;
      while (i < n && source[i] != quote && source[i] != '\n') {
        if (source[i] == '\\' && i + 1 < n) ++i;
        ++i;
      }
      if (i >= n || source[i] != quote)
        throw LexicalError("unterminated string literal", begin);
      ++i;
      out.push_back({source.substr(begin, i - begin), TokenClass::String, begin, i});
    } else {
      size_t len = match_operator(source, i);
      i += len;
      out.push_back({source.substr(begin, len), TokenClass::Operator, begin, i});
    }
  }
  return out;
}

std::vector<LineToken> lex_lines(const std::string& source) {
  std::vector<LineToken> out;
  std::vector<size_t> indents = {0};
  size_t pos = 0, line_no = 0;
  size_t n = source.size();
  while (pos < n) {
    ++line_no;
    size_t line_end = source.find('\n', pos);
    if (line_end == std::string::npos) line_end = n;
    std::string line = source.substr(pos, line_end - pos);

    size_t indent = 0;
    while (indent < line.size() && line[indent] == ' ') ++indent;
    bool blank = true;
    for (size_t k = indent; k < line.size(); ++k) {
      if (line[k] == '#') break;
      if (!std::isspace(static_cast<unsigned char>(line[k]))) {
        blank = false;
        break;
      }
    }
    if (!blank) {
      if (indent > indents.back()) {
        indents.push_back(indent);
        out.push_back({LineToken::Indent, {}, line_no, 0});
      }
      while (indent < indents.back()) {
        indents.pop_back();
        out.push_back({LineToken::Dedent, {}, line_no, 0});
      }
      if (indent != indents.back())
        throw LexicalError("inconsistent indentation", pos + indent);

      auto toks = lex_classify(line);
      for (auto& t : toks) {
        LineToken lt;
        lt.kind = LineToken::Tok;
        lt.tok = t;
        lt.tok.begin += pos;
        lt.tok.end += pos;
        lt.line = line_no;
        lt.col = t.begin;
        out.push_back(std::move(lt));
      }
      out.push_back({LineToken::Newline, {}, line_no, line.size()});
    }
    pos = line_end + 1;
    if (line_end == n) break;
  }
  while (indents.size() > 1) {
    indents.pop_back();
    out.push_back({LineToken::Dedent, {}, line_no + 1, 0});
  }
  out.push_back({LineToken::End, {}, line_no + 1, 0});
  return out;
}

}  // namespace codescope::props
