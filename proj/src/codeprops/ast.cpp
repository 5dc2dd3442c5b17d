#include "codescope/codeprops/ast.hpp"

#include <sstream>
#include <stdexcept>

namespace codescope::props {

AstPtr make_terminal(const std::string& kind, const std::string& value) {
  auto n = std::make_unique<AstNode>(kind, true);
  n->value = value;
  return n;
}

AstPtr make_node(const std::string& kind) {
  return std::make_unique<AstNode>(kind, false);
}

AstPtr clone(const AstNode& n) {
  auto c = std::make_unique<AstNode>(n.kind, n.terminal);
  c->value = n.value;
  for (const auto& ch : n.children) c->children.push_back(clone(*ch));
  return c;
}

bool equal(const AstNode& a, const AstNode& b) {
  if (a.kind != b.kind || a.terminal != b.terminal || a.value != b.value) return false;
  if (a.children.size() != b.children.size()) return false;
  for (size_t i = 0; i < a.children.size(); ++i)
    if (!equal(*a.children[i], *b.children[i])) return false;
  return true;
}

size_t node_count(const AstNode& n) {
  size_t c = 1;
  for (const auto& ch : n.children) c += node_count(*ch);
  return c;
}

AstPtr ast_only(const AstNode& n) {
  auto c = std::make_unique<AstNode>(n.kind, n.terminal);
  for (const auto& ch : n.children) c->children.push_back(ast_only(*ch));
  return c;
}

namespace {
void serialize_rec(const AstNode& n, std::string& out) {
  out += '(';
  out += n.kind;
  for (const auto& ch : n.children) {
    out += ' ';
    serialize_rec(*ch, out);
  }
  out += ')';
}
}  // namespace

std::string serialize_ast(const AstNode& stripped) {
  std::string out;
  serialize_rec(stripped, out);
  return out;
}

namespace {
AstPtr parse_serialized_rec(const std::string& s, size_t& i) {
  if (i >= s.size() || s[i] != '(')
    throw std::runtime_error("serialized AST: expected '(' at " + std::to_string(i));
  ++i;
  size_t start = i;
  while (i < s.size() && s[i] != ' ' && s[i] != ')' && s[i] != '(') ++i;
  auto node = std::make_unique<AstNode>(s.substr(start, i - start), false);
  while (i < s.size() && s[i] == ' ') {
    ++i;
    node->children.push_back(parse_serialized_rec(s, i));
  }
  if (i >= s.size() || s[i] != ')')
    throw std::runtime_error("serialized AST: expected ')' at " + std::to_string(i));
  ++i;
  // leaves of a stripped tree are terminals by construction
  node->terminal = node->children.empty() &&
                   (node->kind == "Identifier" || node->kind == "Number" ||
                    node->kind == "String");
  return node;
}
}  // namespace

AstPtr parse_serialized(const std::string& s) {
  size_t i = 0;
  auto n = parse_serialized_rec(s, i);
  if (i != s.size()) throw std::runtime_error("serialized AST: trailing input");
  return n;
}

std::vector<std::string> serialize_ast_tokens(const AstNode& stripped) {
  std::vector<std::string> toks;
  std::function<void(const AstNode&)> rec = [&](const AstNode& n) {
    toks.push_back("(");
    toks.push_back(n.kind);
    for (const auto& ch : n.children) rec(*ch);
    toks.push_back(")");
  };
  rec(stripped);
  return toks;
}

namespace {

int prec(const std::string& k) {
  if (k == "Or") return 1;
  if (k == "And") return 2;
  if (k == "Not") return 3;
  if (k == "Lt" || k == "Gt" || k == "Le" || k == "Ge" || k == "Eq" || k == "Ne")
    return 4;
  if (k == "Add" || k == "Sub") return 5;
  if (k == "Mul" || k == "Div" || k == "FloorDiv" || k == "Mod") return 6;
  if (k == "Neg") return 7;
  return 8;  // atoms
}

const char* op_text(const std::string& k) {
  if (k == "Or") return "or";
  if (k == "And") return "and";
  if (k == "Lt") return "<";
  if (k == "Gt") return ">";
  if (k == "Le") return "<=";
  if (k == "Ge") return ">=";
  if (k == "Eq") return "==";
  if (k == "Ne") return "!=";
  if (k == "Add") return "+";
  if (k == "Sub") return "-";
  if (k == "Mul") return "*";
  if (k == "Div") return "/";
  if (k == "FloorDiv") return "//";
  if (k == "Mod") return "%";
  return "?";
}

bool is_binop(const std::string& k) {
  return k == "Or" || k == "And" || k == "Lt" || k == "Gt" || k == "Le" ||
         k == "Ge" || k == "Eq" || k == "Ne" || k == "Add" || k == "Sub" ||
         k == "Mul" || k == "Div" || k == "FloorDiv" || k == "Mod";
}

void unparse_expr(const AstNode& n, std::ostringstream& os, int parent_prec,
                  bool right_side) {
  int p = prec(n.kind);
  bool need_parens =
      is_binop(n.kind) && (p < parent_prec || (p == parent_prec && right_side));
  if (need_parens) os << "(";
  if (n.terminal) {
    os << n.value;
  } else if (is_binop(n.kind)) {
    unparse_expr(*n.children[0], os, p, false);
    os << " " << op_text(n.kind) << " ";
    unparse_expr(*n.children[1], os, p, true);
  } else if (n.kind == "Neg") {
    os << "-";
    unparse_expr(*n.children[0], os, prec("Neg"), true);
  } else if (n.kind == "Not") {
    os << "not ";
    unparse_expr(*n.children[0], os, prec("Not"), true);
  } else if (n.kind == "Call") {
    os << n.children[0]->value << "(";
    const AstNode& args = *n.children[1];
    for (size_t i = 0; i < args.children.size(); ++i) {
      if (i) os << ", ";
      unparse_expr(*args.children[i], os, 0, false);
    }
    os << ")";
  } else {
    throw std::runtime_error("unparse: unexpected expression kind " + n.kind);
  }
  if (need_parens) os << ")";
}

void indent_to(std::ostringstream& os, int depth) {
  for (int i = 0; i < depth; ++i) os << "    ";
}

void unparse_stmt(const AstNode& n, std::ostringstream& os, int depth);

void unparse_block(const AstNode& block, std::ostringstream& os, int depth) {
  for (const auto& st : block.children) unparse_stmt(*st, os, depth);
}

void unparse_stmt(const AstNode& n, std::ostringstream& os, int depth) {
  if (n.kind == "FunctionDef") {
    indent_to(os, depth);
    os << "def " << n.children[0]->value << "(";
    const AstNode& params = *n.children[1];
    for (size_t i = 0; i < params.children.size(); ++i) {
      if (i) os << ", ";
      os << params.children[i]->value;
    }
    os << "):\n";
    unparse_block(*n.children[2], os, depth + 1);
  } else if (n.kind == "Assign") {
    indent_to(os, depth);
    os << n.children[0]->value << " = ";
    unparse_expr(*n.children[1], os, 0, false);
    os << "\n";
  } else if (n.kind == "Return") {
    indent_to(os, depth);
    os << "return";
    if (!n.children.empty()) {
      os << " ";
      unparse_expr(*n.children[0], os, 0, false);
    }
    os << "\n";
  } else if (n.kind == "ExprStmt") {
    indent_to(os, depth);
    unparse_expr(*n.children[0], os, 0, false);
    os << "\n";
  } else if (n.kind == "Pass") {
    indent_to(os, depth);
    os << "pass\n";
  } else if (n.kind == "If") {
    indent_to(os, depth);
    os << "if ";
    unparse_expr(*n.children[0], os, 0, false);
    os << ":\n";
    unparse_block(*n.children[1], os, depth + 1);
    const AstNode* els = n.children.size() > 2 ? n.children[2].get() : nullptr;
    // elif chains are nested If nodes in the else slot
    while (els) {
      if (els->kind == "If") {
        indent_to(os, depth);
        os << "elif ";
        unparse_expr(*els->children[0], os, 0, false);
        os << ":\n";
        unparse_block(*els->children[1], os, depth + 1);
        els = els->children.size() > 2 ? els->children[2].get() : nullptr;
      } else {
        indent_to(os, depth);
        os << "else:\n";
        unparse_block(*els, os, depth + 1);
        els = nullptr;
      }
    }
  } else if (n.kind == "While") {
    indent_to(os, depth);
    os << "while ";
    unparse_expr(*n.children[0], os, 0, false);
    os << ":\n";
    unparse_block(*n.children[1], os, depth + 1);
  } else if (n.kind == "For") {
    indent_to(os, depth);
    os << "for " << n.children[0]->value << " in range(";
    unparse_expr(*n.children[1], os, 0, false);
    os << ", ";
    unparse_expr(*n.children[2], os, 0, false);
    os << "):\n";
    unparse_block(*n.children[3], os, depth + 1);
  } else {
    throw std::runtime_error("unparse: unexpected statement kind " + n.kind);
  }
}

}  // namespace

std::string unparse(const AstNode& n) {
  std::ostringstream os;
  if (n.kind == "Module") {
    for (const auto& ch : n.children) unparse_stmt(*ch, os, 0);
  } else {
    unparse_stmt(n, os, 0);
  }
  return os.str();
}

AstPtr rename_identifiers(const AstNode& n,
                          const std::map<std::string, std::string>& mapping) {
  auto c = std::make_unique<AstNode>(n.kind, n.terminal);
  c->value = n.value;
  if (n.terminal && n.kind == "Identifier") {
    auto it = mapping.find(n.value);
    if (it != mapping.end()) c->value = it->second;
  }
  for (const auto& ch : n.children)
    c->children.push_back(rename_identifiers(*ch, mapping));
  return c;
}

void visit(const AstNode& n, const std::function<void(const AstNode&)>& fn) {
  fn(n);
  for (const auto& ch : n.children) visit(*ch, fn);
}

}  // namespace codescope::props
