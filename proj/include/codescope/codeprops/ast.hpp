#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace codescope::props {

/// AST node. Nonterminal kinds carry no value; terminal kinds (Identifier,
/// Number, String) carry the token text until stripped by ast_only.
struct AstNode {
  std::string kind;
  std::string value;  // terminals only; empty after ast_only
  bool terminal = false;
  std::vector<std::unique_ptr<AstNode>> children;

  AstNode(std::string k, bool term = false) : kind(std::move(k)), terminal(term) {}

  AstNode* add(std::unique_ptr<AstNode> child) {
    children.push_back(std::move(child));
    return children.back().get();
  }
};

using AstPtr = std::unique_ptr<AstNode>;

AstPtr make_terminal(const std::string& kind, const std::string& value);
AstPtr make_node(const std::string& kind);

AstPtr clone(const AstNode& n);
bool equal(const AstNode& a, const AstNode& b);
size_t node_count(const AstNode& n);

/// Removes terminal values, keeping tree shape and kinds. Idempotent.
AstPtr ast_only(const AstNode& n);

/// Bracketed pre-order serialization: "(Kind child ...)". Injective over
/// stripped tree shapes.
std::string serialize_ast(const AstNode& stripped);

/// Inverse of serialize_ast.
AstPtr parse_serialized(const std::string& s);

/// Token sequence of the serialization, for feeding the encoder.
std::vector<std::string> serialize_ast_tokens(const AstNode& stripped);

/// Source reconstruction; token-identical to the input for canonically
/// parenthesized MiniPy.
std::string unparse(const AstNode& n);

/// Applies an identifier rename map everywhere (definitions and uses).
AstPtr rename_identifiers(const AstNode& n,
                          const std::map<std::string, std::string>& mapping);

void visit(const AstNode& n, const std::function<void(const AstNode&)>& fn);

}  // namespace codescope::props
