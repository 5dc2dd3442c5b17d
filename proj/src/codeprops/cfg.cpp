#include "codescope/codeprops/cfg.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace codescope::props {

bool Cfg::has_edge(int a, int b) const {
  return std::find(edges.begin(), edges.end(), std::make_pair(a, b)) != edges.end();
}

namespace {

class CfgBuilder {
 public:
  Cfg build(const AstNode& body) {
    cfg_.entry = new_block("<entry>");
    cfg_.exit = new_block("<exit>");
    std::vector<int> ends = emit_block(body, {cfg_.entry});
    for (int e : ends) edge(e, cfg_.exit);
    return std::move(cfg_);
  }

 private:
  Cfg cfg_;
  int appendable_ = -1;

  int new_block(const std::string& label = "") {
    int id = cfg_.node_count();
    cfg_.nodes.push_back({id, {}, false});
    if (!label.empty()) cfg_.nodes.back().stmts.push_back(label);
    return id;
  }

  void edge(int a, int b) { cfg_.edges.emplace_back(a, b); }

  // Ensures there is a block receiving control from `ends` that simple
  // statements can be appended to.
  int ensure_block(std::vector<int>& ends) {
    if (appendable_ >= 0) return appendable_;
    int b = new_block();
    for (int e : ends) edge(e, b);
    ends = {b};
    appendable_ = b;
    return b;
  }

  std::vector<int> emit_block(const AstNode& block, std::vector<int> ends) {
    appendable_ = -1;
    for (const auto& stp : block.children) {
      const AstNode& st = *stp;
      if (st.kind == "Assign" || st.kind == "ExprStmt" || st.kind == "Pass") {
        int b = ensure_block(ends);
        cfg_.nodes[static_cast<size_t>(b)].stmts.push_back(st.kind);
      } else if (st.kind == "Return") {
        int b = ensure_block(ends);
        cfg_.nodes[static_cast<size_t>(b)].stmts.push_back("Return");
        edge(b, cfg_.exit);
        ends.clear();
        appendable_ = -1;
      } else if (st.kind == "If") {
        ends = emit_if(st, std::move(ends));
      } else if (st.kind == "While") {
        int t = new_block();
        cfg_.nodes[static_cast<size_t>(t)].is_predicate = true;
        cfg_.nodes[static_cast<size_t>(t)].stmts.push_back("WhileTest");
        for (int e : ends) edge(e, t);
        appendable_ = -1;
        std::vector<int> body_ends = emit_block(*st.children[1], {t});
        for (int e : body_ends) edge(e, t);
        ends = {t};
        appendable_ = -1;
      } else if (st.kind == "For") {
        // desugar: init lives with the preceding straight-line code,
        // then test -> body -> step -> test
        int ib = ensure_block(ends);
        cfg_.nodes[static_cast<size_t>(ib)].stmts.push_back("ForInit");
        int t = new_block();
        cfg_.nodes[static_cast<size_t>(t)].is_predicate = true;
        cfg_.nodes[static_cast<size_t>(t)].stmts.push_back("ForTest");
        for (int e : ends) edge(e, t);
        appendable_ = -1;
        std::vector<int> body_ends = emit_block(*st.children[3], {t});
        int s = new_block("ForStep");
        for (int e : body_ends) edge(e, s);
        edge(s, t);
        ends = {t};
        appendable_ = -1;
      } else if (st.kind == "FunctionDef") {
        // nested defs are not part of this function's flow
        continue;
      } else {
        int b = ensure_block(ends);
        cfg_.nodes[static_cast<size_t>(b)].stmts.push_back(st.kind);
      }
    }
    return ends;
  }

  std::vector<int> emit_if(const AstNode& st, std::vector<int> ends) {
    // Branch tests are dedicated predicate nodes, as in the usual
    // flow-graph presentation of complexity counting.
    int c = new_block();
    cfg_.nodes[static_cast<size_t>(c)].is_predicate = true;
    cfg_.nodes[static_cast<size_t>(c)].stmts.push_back("IfTest");
    for (int e : ends) edge(e, c);
    ends = {c};
    appendable_ = -1;
    std::vector<int> out = emit_block(*st.children[1], {c});
    if (st.children.size() > 2) {
      const AstNode& els = *st.children[2];
      std::vector<int> else_ends;
      if (els.kind == "If") {
        // elif: its predicate needs a dedicated block reached on the false edge
        appendable_ = -1;
        else_ends = emit_if(els, {c});
      } else {
        appendable_ = -1;
        else_ends = emit_block(els, {c});
      }
      out.insert(out.end(), else_ends.begin(), else_ends.end());
    } else {
      out.push_back(c);  // false edge falls through
    }
    appendable_ = -1;
    return out;
  }
};

void count_predicates(const AstNode& n, int& count) {
  if (n.kind == "If" || n.kind == "While" || n.kind == "For") ++count;
  for (const auto& ch : n.children) count_predicates(*ch, count);
}

}  // namespace

Cfg build_cfg(const AstNode& function) {
  const AstNode* body = &function;
  if (function.kind == "FunctionDef") body = function.children[2].get();
  CfgBuilder builder;
  return builder.build(*body);
}

int connected_components(const Cfg& cfg) {
  int n = cfg.node_count();
  if (n == 0) return 0;
  std::vector<int> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] =
          parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  };
  for (auto [a, b] : cfg.edges) {
    int ra = find(a), rb = find(b);
    if (ra != rb) parent[static_cast<size_t>(ra)] = rb;
  }
  int comps = 0;
  for (int i = 0; i < n; ++i)
    if (find(i) == i) ++comps;
  return comps;
}

int cyclomatic(const Cfg& cfg) {
  int p = connected_components(cfg);
  return cfg.edge_count() - cfg.node_count() + 2 * p;
}

int decision_points(const AstNode& function) {
  int count = 0;
  count_predicates(function, count);
  return count + 1;
}

}  // namespace codescope::props
