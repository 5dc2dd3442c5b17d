#pragma once

#include <string>
#include <utility>
#include <vector>

#include "codescope/codeprops/ast.hpp"

namespace codescope::props {

/// Control-flow graph over maximal basic blocks. Synthetic entry and exit
/// blocks are always present. For-loops desugar to test+body+step blocks;
/// boolean short-circuit operators do not add branches.
struct Cfg {
  struct Block {
    int id;
    std::vector<std::string> stmts;  // statement summaries, for inspection
    bool is_predicate = false;
  };
  std::vector<Block> nodes;
  std::vector<std::pair<int, int>> edges;  // directed
  int entry = -1;
  int exit = -1;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  bool has_edge(int a, int b) const;
};

/// Builds the CFG of one function-level AST (FunctionDef or a Block).
Cfg build_cfg(const AstNode& function);

/// Undirected connected-component count.
int connected_components(const Cfg& cfg);

/// M = E - N + 2P, with P computed from the graph.
int cyclomatic(const Cfg& cfg);

/// Independent oracle for structured programs: number of decision
/// predicates (if/elif/while/for) + 1.
int decision_points(const AstNode& function);

}  // namespace codescope::props
