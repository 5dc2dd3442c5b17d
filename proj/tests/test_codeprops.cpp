#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "codescope/codeprops/ast.hpp"
#include "codescope/codeprops/cfg.hpp"
#include "codescope/codeprops/lexer.hpp"
#include "codescope/codeprops/parser.hpp"

using namespace codescope::props;

namespace {

const char* kIfElse =
    "def f(x):\n"
    "    y = 0\n"
    "    if x > 0:\n"
    "        y = 1\n"
    "    else:\n"
    "        y = 2\n"
    "    return y\n";

}  // namespace

TEST_CASE("lexer classifies the five token classes") {
  auto toks = lex_classify("while x != 42: s = \"hi\" + name");
  REQUIRE(toks.size() >= 8);
  CHECK(toks[0].cls == TokenClass::Keyword);
  CHECK(toks[1].cls == TokenClass::Identifier);
  CHECK(toks[2].cls == TokenClass::Operator);
  CHECK(toks[3].cls == TokenClass::Number);
  CHECK(toks[4].cls == TokenClass::Operator);  // colon folds into Operator
  auto str = lex_classify("s = \"hi\"")[2];
  CHECK(str.cls == TokenClass::String);
}

TEST_CASE("lexer byte offsets slice the source exactly") {
  std::string src = "abc = de + 19";
  for (const auto& t : lex_classify(src))
    CHECK(src.substr(t.begin, t.end - t.begin) == t.text);
}

TEST_CASE("lexer rejects an unterminated string with its offset") {
  CHECK_THROWS_AS(lex_classify("x = \"oops"), LexicalError);
}

TEST_CASE("comments and whitespace are not emitted") {
  auto toks = lex_classify("x = 1  # trailing note");
  CHECK(toks.size() == 3);
}

TEST_CASE("line lexer emits balanced indent structure") {
  auto lts = lex_lines("def f():\n    if x:\n        y = 1\n    return y\n");
  int depth = 0, max_depth = 0, newlines = 0;
  for (const auto& lt : lts) {
    if (lt.kind == LineToken::Indent) depth++;
    if (lt.kind == LineToken::Dedent) depth--;
    if (lt.kind == LineToken::Newline) newlines++;
    max_depth = std::max(max_depth, depth);
    CHECK(depth >= 0);
  }
  CHECK(depth == 0);
  CHECK(max_depth == 2);
  CHECK(newlines == 4);
}

TEST_CASE("parse -> unparse -> parse is a fixed point") {
  auto ast = parse(kIfElse);
  std::string out = unparse(*ast);
  auto ast2 = parse(out);
  CHECK(equal(*ast, *ast2));
  CHECK(unparse(*ast2) == out);
}

TEST_CASE("syntax errors carry position and expectation") {
  try {
    parse("def f(:\n    return 1\n");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line >= 1);
    CHECK(!e.expected.empty());
  }
  CHECK_THROWS_AS(parse("def f():\nreturn 1\n"), SyntaxError);   // missing indent
  CHECK_THROWS_AS(parse("x = (1 + 2\n"), SyntaxError);           // unclosed paren
}

TEST_CASE("elif desugars to a nested conditional") {
  auto a = parse(
      "def f(x):\n"
      "    if x > 1:\n"
      "        return 1\n"
      "    elif x > 0:\n"
      "        return 2\n"
      "    else:\n"
      "        return 3\n");
  // the else-arm of the outer If is itself an If node
  int nested_ifs = 0;
  visit(*a, [&](const AstNode& n) {
    if (n.kind == "If" && n.children.size() > 2 && n.children[2]->kind == "If")
      ++nested_ifs;
  });
  CHECK(nested_ifs == 1);
  auto fn = parse_function(
      "def f(x):\n"
      "    if x > 1:\n"
      "        return 1\n"
      "    elif x > 0:\n"
      "        return 2\n"
      "    else:\n"
      "        return 3\n");
  CHECK(cyclomatic(build_cfg(*fn)) == 3);
}

TEST_CASE("ast clone/equal and shape stripping") {
  auto ast = parse(kIfElse);
  auto copy = clone(*ast);
  CHECK(equal(*ast, *copy));
  auto shape = ast_only(*ast);
  CHECK(node_count(*shape) == node_count(*ast));
  CHECK(equal(*ast_only(*shape), *shape));  // idempotent
  bool any_value = false;
  visit(*shape, [&](const AstNode& n) { any_value = any_value || !n.value.empty(); });
  CHECK(!any_value);
}

TEST_CASE("serialized shape round-trips") {
  auto shape = ast_only(*parse(kIfElse));
  std::string s = serialize_ast(*shape);
  auto back = parse_serialized(s);
  CHECK(equal(*back, *shape));
  CHECK(serialize_ast(*back) == s);
}

TEST_CASE("rename_identifiers touches definitions and uses consistently") {
  auto ast = parse("def f(a):\n    b = a + 1\n    return b\n");
  auto renamed = rename_identifiers(*ast, {{"a", "left"}, {"b", "right"}});
  std::string out = unparse(*renamed);
  CHECK(out.find("left") != std::string::npos);
  CHECK(out.find("right") != std::string::npos);
  CHECK(out.find(" a ") == std::string::npos);
  // renaming back restores the original
  auto restored = rename_identifiers(*renamed, {{"left", "a"}, {"right", "b"}});
  CHECK(equal(*restored, *ast));
}

TEST_CASE("single-conditional example: 7 nodes, 7 edges, M = 7-7+2 = 2") {
  auto cfg = build_cfg(*parse_function(kIfElse));
  CHECK(cfg.node_count() == 7);
  CHECK(cfg.edge_count() == 7);
  CHECK(connected_components(cfg) == 1);
  CHECK(cyclomatic(cfg) == 2);
}

TEST_CASE("cyclomatic equals predicate count + 1 on hand-built programs") {
  struct Case {
    const char* src;
    int m;
  } cases[] = {
      {"def f(x):\n    return x\n", 1},
      {kIfElse, 2},
      {"def f(x):\n    while x > 0:\n        x = x - 1\n    return x\n", 2},
      {"def f(n):\n"
       "    s = 0\n"
       "    for i in range(0, n):\n"
       "        if i > 2:\n"
       "            s = s + i\n"
       "    return s\n",
       3},
      {"def f(x):\n"
       "    if x > 10:\n"
       "        return 2\n"
       "    elif x > 5:\n"
       "        return 1\n"
       "    else:\n"
       "        return 0\n",
       3},
  };
  for (const auto& c : cases) {
    auto fn = parse_function(c.src);
    CHECK(cyclomatic(build_cfg(*fn)) == c.m);
    CHECK(decision_points(*fn) == c.m);  // already predicates + 1
  }
}

TEST_CASE("cfg entry and exit are synthetic and connected") {
  auto cfg = build_cfg(*parse_function(kIfElse));
  CHECK(cfg.entry >= 0);
  CHECK(cfg.exit >= 0);
  CHECK(cfg.entry != cfg.exit);
  bool entry_out = false, exit_in = false;
  for (auto [a, b] : cfg.edges) {
    entry_out = entry_out || a == cfg.entry;
    exit_in = exit_in || b == cfg.exit;
    CHECK(a != cfg.exit);   // exit has no successors
    CHECK(b != cfg.entry);  // entry has no predecessors
  }
  CHECK(entry_out);
  CHECK(exit_in);
}
