#include "codescope/codeprops/parser.hpp"

namespace codescope::props {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& source) : toks_(lex_lines(source)) {}

  AstPtr parse_module() {
    auto mod = make_node("Module");
    while (!at_end()) {
      if (peek_kind() == LineToken::Newline) {
        advance();
        continue;
      }
      mod->add(parse_statement());
    }
    return mod;
  }

 private:
  std::vector<LineToken> toks_;
  size_t pos_ = 0;

  const LineToken& peek() const { return toks_[pos_]; }
  LineToken::Kind peek_kind() const { return toks_[pos_].kind; }
  bool at_end() const { return peek_kind() == LineToken::End; }
  void advance() { if (!at_end()) ++pos_; }

  [[noreturn]] void fail(const std::string& expected) const {
    const LineToken& t = peek();
    std::string got = t.kind == LineToken::Tok ? "'" + t.tok.text + "'"
                      : t.kind == LineToken::Newline ? "end of line"
                      : t.kind == LineToken::Indent  ? "indent"
                      : t.kind == LineToken::Dedent  ? "dedent"
                                                     : "end of input";
    throw SyntaxError("unexpected " + got, t.line, t.col, expected);
  }

  bool is_tok(const std::string& text) const {
    return peek_kind() == LineToken::Tok && peek().tok.text == text;
  }

  bool accept(const std::string& text) {
    if (is_tok(text)) {
      advance();
      return true;
    }
    return false;
  }

  void expect(const std::string& text) {
    if (!accept(text)) fail("'" + text + "'");
  }

  void expect_newline() {
    if (peek_kind() != LineToken::Newline) fail("end of line");
    advance();
  }

  std::string expect_identifier() {
    if (peek_kind() == LineToken::Tok && peek().tok.cls == TokenClass::Identifier) {
      std::string t = peek().tok.text;
      advance();
      return t;
    }
    fail("identifier");
  }

  AstPtr parse_statement() {
    if (is_tok("def")) return parse_funcdef();
    if (is_tok("if")) return parse_if();
    if (is_tok("while")) return parse_while();
    if (is_tok("for")) return parse_for();
    if (is_tok("return")) return parse_return();
    if (is_tok("pass")) {
      advance();
      expect_newline();
      return make_node("Pass");
    }
    // assignment or bare expression
    if (peek_kind() == LineToken::Tok && peek().tok.cls == TokenClass::Identifier &&
        pos_ + 1 < toks_.size() && toks_[pos_ + 1].kind == LineToken::Tok &&
        toks_[pos_ + 1].tok.text == "=") {
      auto st = make_node("Assign");
      st->add(make_terminal("Identifier", expect_identifier()));
      expect("=");
      st->add(parse_expr());
      expect_newline();
      return st;
    }
    auto st = make_node("ExprStmt");
    st->add(parse_expr());
    expect_newline();
    return st;
  }

  AstPtr parse_funcdef() {
    expect("def");
    auto fn = make_node("FunctionDef");
    fn->add(make_terminal("Identifier", expect_identifier()));
    expect("(");
    auto params = make_node("Params");
    if (!is_tok(")")) {
      params->add(make_terminal("Identifier", expect_identifier()));
      while (accept(",")) params->add(make_terminal("Identifier", expect_identifier()));
    }
    expect(")");
    expect(":");
    fn->add(std::move(params));
    fn->add(parse_suite());
    return fn;
  }

  AstPtr parse_suite() {
    expect_newline();
    if (peek_kind() != LineToken::Indent) fail("indented block");
    advance();
    auto block = make_node("Block");
    while (peek_kind() != LineToken::Dedent && !at_end()) {
      if (peek_kind() == LineToken::Newline) {
        advance();
        continue;
      }
      block->add(parse_statement());
    }
    if (peek_kind() == LineToken::Dedent) advance();
    return block;
  }

  AstPtr parse_if() {
    expect("if");
    auto node = make_node("If");
    node->add(parse_expr());
    expect(":");
    node->add(parse_suite());
    if (is_tok("elif")) {
      // desugar "elif" into a nested If in the else slot
      advance();
      auto nested = make_node("If");
      nested->add(parse_expr());
      expect(":");
      nested->add(parse_suite());
      AstNode* tail = nested.get();
      while (is_tok("elif")) {
        advance();
        auto deeper = make_node("If");
        deeper->add(parse_expr());
        expect(":");
        deeper->add(parse_suite());
        tail = tail->add(std::move(deeper));
      }
      if (accept("else")) {
        expect(":");
        tail->add(parse_suite());
      }
      node->add(std::move(nested));
    } else if (accept("else")) {
      expect(":");
      node->add(parse_suite());
    }
    return node;
  }

  AstPtr parse_while() {
    expect("while");
    auto node = make_node("While");
    node->add(parse_expr());
    expect(":");
    node->add(parse_suite());
    return node;
  }

  AstPtr parse_for() {
    expect("for");
    auto node = make_node("For");
    node->add(make_terminal("Identifier", expect_identifier()));
    expect("in");
    expect("range");
    expect("(");
    node->add(parse_expr());
    expect(",");
    node->add(parse_expr());
    expect(")");
    expect(":");
    node->add(parse_suite());
    return node;
  }

  AstPtr parse_return() {
    expect("return");
    auto node = make_node("Return");
    if (peek_kind() != LineToken::Newline) node->add(parse_expr());
    expect_newline();
    return node;
  }

  AstPtr parse_expr() { return parse_or(); }

  AstPtr parse_or() {
    auto lhs = parse_and();
    while (accept("or")) {
      auto n = make_node("Or");
      n->add(std::move(lhs));
      n->add(parse_and());
      lhs = std::move(n);
    }
    return lhs;
  }

  AstPtr parse_and() {
    auto lhs = parse_not();
    while (accept("and")) {
      auto n = make_node("And");
      n->add(std::move(lhs));
      n->add(parse_not());
      lhs = std::move(n);
    }
    return lhs;
  }

  AstPtr parse_not() {
    if (accept("not")) {
      auto n = make_node("Not");
      n->add(parse_not());
      return n;
    }
    return parse_compare();
  }

  AstPtr parse_compare() {
    auto lhs = parse_arith();
    static const std::pair<const char*, const char*> ops[] = {
        {"<=", "Le"}, {">=", "Ge"}, {"==", "Eq"}, {"!=", "Ne"}, {"<", "Lt"}, {">", "Gt"}};
    for (const auto& [text, kind] : ops) {
      if (is_tok(text)) {
        advance();
        auto n = make_node(kind);
        n->add(std::move(lhs));
        n->add(parse_arith());
        return n;
      }
    }
    return lhs;
  }

  AstPtr parse_arith() {
    auto lhs = parse_term();
    for (;;) {
      if (accept("+")) {
        auto n = make_node("Add");
        n->add(std::move(lhs));
        n->add(parse_term());
        lhs = std::move(n);
      } else if (accept("-")) {
        auto n = make_node("Sub");
        n->add(std::move(lhs));
        n->add(parse_term());
        lhs = std::move(n);
      } else {
        return lhs;
      }
    }
  }

  AstPtr parse_term() {
    auto lhs = parse_factor();
    for (;;) {
      const char* kind = nullptr;
      if (is_tok("*")) kind = "Mul";
      else if (is_tok("//")) kind = "FloorDiv";
      else if (is_tok("/")) kind = "Div";
      else if (is_tok("%")) kind = "Mod";
      if (!kind) return lhs;
      advance();
      auto n = make_node(kind);
      n->add(std::move(lhs));
      n->add(parse_factor());
      lhs = std::move(n);
    }
  }

  AstPtr parse_factor() {
    if (accept("-")) {
      auto n = make_node("Neg");
      n->add(parse_factor());
      return n;
    }
    return parse_atom();
  }

  AstPtr parse_atom() {
    if (peek_kind() != LineToken::Tok) fail("expression");
    const LexToken& t = peek().tok;
    if (t.cls == TokenClass::Number) {
      advance();
      return make_terminal("Number", t.text);
    }
    if (t.cls == TokenClass::String) {
      advance();
      return make_terminal("String", t.text);
    }
    if (t.text == "(") {
      advance();
      auto e = parse_expr();
      expect(")");
      return e;
    }
    if (t.cls == TokenClass::Identifier) {
      std::string name = t.text;
      advance();
      if (accept("(")) {
        auto call = make_node("Call");
        call->add(make_terminal("Identifier", name));
        auto args = make_node("Args");
        if (!is_tok(")")) {
          args->add(parse_expr());
          while (accept(",")) args->add(parse_expr());
        }
        expect(")");
        call->add(std::move(args));
        return call;
      }
      return make_terminal("Identifier", name);
    }
    fail("expression");
  }
};

}  // namespace

AstPtr parse(const std::string& source) {
  Parser p(source);
  return p.parse_module();
}

AstPtr parse_function(const std::string& source) {
  auto mod = parse(source);
  for (auto& ch : mod->children)
    if (ch->kind == "FunctionDef") return std::move(ch);
  throw SyntaxError("no function definition found", 1, 0, "def");
}

}  // namespace codescope::props
