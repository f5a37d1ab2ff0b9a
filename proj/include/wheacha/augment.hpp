#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "wheacha/ast.hpp"

namespace wheacha {

enum class EdgeKind {
  LastRead, LastWrite, ComputedFrom, LastLexicalUse, GuardedBy, GuardedByNegation,
  FormalArgName
};

inline const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::LastRead: return "LastRead";
    case EdgeKind::LastWrite: return "LastWrite";
    case EdgeKind::ComputedFrom: return "ComputedFrom";
    case EdgeKind::LastLexicalUse: return "LastLexicalUse";
    case EdgeKind::GuardedBy: return "GuardedBy";
    case EdgeKind::GuardedByNegation: return "GuardedByNegation";
    case EdgeKind::FormalArgName: return "FormalArgName";
  }
  return "?";
}

inline bool edge_kind_from_string(const std::string& s, EdgeKind& out) {
  if (s == "LastRead") out = EdgeKind::LastRead;
  else if (s == "LastWrite") out = EdgeKind::LastWrite;
  else if (s == "ComputedFrom") out = EdgeKind::ComputedFrom;
  else if (s == "LastLexicalUse") out = EdgeKind::LastLexicalUse;
  else if (s == "GuardedBy") out = EdgeKind::GuardedBy;
  else if (s == "GuardedByNegation") out = EdgeKind::GuardedByNegation;
  else if (s == "FormalArgName") out = EdgeKind::FormalArgName;
  else return false;
  return true;
}

struct SemanticEdge {
  EdgeKind kind;
  int from;
  int to;
  bool operator<(const SemanticEdge& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (from != o.from) return from < o.from;
    return to < o.to;
  }
  bool operator==(const SemanticEdge& o) const {
    return kind == o.kind && from == o.from && to == o.to;
  }
};

namespace detail {

// Variable occurrences: identifier leaves that name values, i.e. everything
// except type names, call callees and field names.
struct Occurrence {
  const Node* node;
  std::string name;
  bool is_write;
};

struct FlowState {
  std::map<std::string, std::set<int>> last_writes;
  std::map<std::string, std::set<int>> last_reads;

  static FlowState merged(const FlowState& a, const FlowState& b) {
    FlowState m = a;
    for (const auto& [k, v] : b.last_writes) m.last_writes[k].insert(v.begin(), v.end());
    for (const auto& [k, v] : b.last_reads) m.last_reads[k].insert(v.begin(), v.end());
    return m;
  }
};

class EdgeBuilder {
 public:
  explicit EdgeBuilder(const Node& method) : method_(method) {}

  std::vector<SemanticEdge> build() {
    // parameter names are declaration writes
    const Node& params = method_.children[1];
    for (const Node& p : params.children) {
      if (p.children.size() == 2) {
        param_names_.push_back(&p.children[1]);
        record(state_, Occurrence{&p.children[1], p.children[1].value, true});
      }
    }
    walk_block(method_.children[2], state_);
    return std::vector<SemanticEdge>(edges_.begin(), edges_.end());
  }

 private:
  const Node& method_;
  FlowState state_;
  std::set<SemanticEdge> edges_;
  std::map<std::string, int> last_lexical_;
  std::vector<const Node*> param_names_;
  struct Guard { int expr_id; std::set<std::string> vars; bool negated; };
  std::vector<Guard> guards_;

  void add(EdgeKind k, int from, int to) { edges_.insert(SemanticEdge{k, from, to}); }

  void record(FlowState& st, const Occurrence& occ) {
    const std::string& v = occ.name;
    int id = occ.node->id;
    if (auto it = st.last_reads.find(v); it != st.last_reads.end())
      for (int prev : it->second) add(EdgeKind::LastRead, id, prev);
    if (auto it = st.last_writes.find(v); it != st.last_writes.end())
      for (int prev : it->second) add(EdgeKind::LastWrite, id, prev);
    if (auto it = last_lexical_.find(v); it != last_lexical_.end())
      add(EdgeKind::LastLexicalUse, id, it->second);
    last_lexical_[v] = id;
    for (const Guard& g : guards_)
      if (g.vars.count(v))
        add(g.negated ? EdgeKind::GuardedByNegation : EdgeKind::GuardedBy, id, g.expr_id);
    if (occ.is_write)
      st.last_writes[v] = {id};
    else
      st.last_reads[v] = {id};
  }

  // Collect variable occurrences of an expression in source order.
  void collect_reads(const Node& e, std::vector<const Node*>& out) const {
    switch (e.kind) {
      case NodeKind::Identifier:
        out.push_back(&e);
        return;
      case NodeKind::Call:
        // callee identifier is a method name, not a variable; its object is
        if (!e.children.empty()) {
          const Node& callee = e.children[0];
          if (callee.kind == NodeKind::FieldAccess && !callee.children.empty())
            collect_reads(callee.children[0], out);
          if (e.children.size() > 1)
            for (const Node& a : e.children[1].children) collect_reads(a, out);
        }
        return;
      case NodeKind::FieldAccess:
        if (!e.children.empty()) collect_reads(e.children[0], out);
        return;
      case NodeKind::Literal:
        return;
      default:
        for (const Node& c : e.children) collect_reads(c, out);
        return;
    }
  }

  void read_expr(const Node& e, FlowState& st) {
    std::vector<const Node*> reads;
    collect_reads(e, reads);
    for (const Node* r : reads) record(st, Occurrence{r, r->value, false});
    link_formal_args(e);
  }

  void link_formal_args(const Node& e) {
    if (e.kind == NodeKind::Call && !e.children.empty() &&
        e.children[0].kind == NodeKind::Identifier && e.children[0].value == method_.value &&
        e.children.size() > 1) {
      const auto& args = e.children[1].children;
      for (std::size_t i = 0; i < args.size() && i < param_names_.size(); ++i)
        if (args[i].kind == NodeKind::Identifier)
          add(EdgeKind::FormalArgName, args[i].id, param_names_[i]->id);
    }
    for (const Node& c : e.children) link_formal_args(c);
  }

  void computed_from(const Node& target, const Node& rhs) {
    std::vector<const Node*> reads;
    collect_reads(rhs, reads);
    for (const Node* r : reads) add(EdgeKind::ComputedFrom, target.id, r->id);
  }

  std::set<std::string> expr_vars(const Node& e) const {
    std::vector<const Node*> reads;
    collect_reads(e, reads);
    std::set<std::string> vars;
    for (const Node* r : reads) vars.insert(r->value);
    return vars;
  }

  void walk_stmt(const Node& s, FlowState& st) {
    switch (s.kind) {
      case NodeKind::VarDecl: {
        if (s.children.size() >= 3) {
          read_expr(s.children[2], st);
          computed_from(s.children[1], s.children[2]);
        }
        if (s.children.size() >= 2)
          record(st, Occurrence{&s.children[1], s.children[1].value, true});
        return;
      }
      case NodeKind::Assign: {
        read_expr(s.children[1], st);
        if (s.children[0].kind == NodeKind::Identifier) {
          computed_from(s.children[0], s.children[1]);
          record(st, Occurrence{&s.children[0], s.children[0].value, true});
        } else {
          read_expr(s.children[0], st);
        }
        return;
      }
      case NodeKind::ExprStmt:
        if (!s.children.empty()) read_expr(s.children[0], st);
        return;
      case NodeKind::Return:
        if (!s.children.empty()) read_expr(s.children[0], st);
        return;
      case NodeKind::If: {
        read_expr(s.children[0], st);
        Guard g{s.children[0].id, expr_vars(s.children[0]), false};
        FlowState then_state = st;
        guards_.push_back(g);
        walk_block(s.children[1], then_state);
        guards_.pop_back();
        if (s.children.size() > 2) {
          FlowState else_state = st;
          g.negated = true;
          guards_.push_back(g);
          walk_block(s.children[2], else_state);
          guards_.pop_back();
          st = FlowState::merged(then_state, else_state);
        } else {
          st = FlowState::merged(st, then_state);
        }
        return;
      }
      case NodeKind::While: {
        read_expr(s.children[0], st);
        FlowState body_state = st;
        walk_block(s.children[1], body_state);
        st = FlowState::merged(st, body_state);  // single pass, no loop fixpoint
        return;
      }
      case NodeKind::For: {
        walk_stmt(s.children[0], st);
        read_expr(s.children[1], st);
        FlowState body_state = st;
        walk_block(s.children[3], body_state);
        walk_stmt(s.children[2], body_state);
        st = FlowState::merged(st, body_state);
        return;
      }
      case NodeKind::Switch: {
        read_expr(s.children[0], st);
        FlowState merged = st;
        for (std::size_t i = 1; i < s.children.size(); ++i) {
          const Node& cs = s.children[i];
          FlowState case_state = st;
          std::size_t first = cs.value == "default" ? 0 : 1;
          for (std::size_t j = first; j < cs.children.size(); ++j)
            walk_stmt(cs.children[j], case_state);
          merged = FlowState::merged(merged, case_state);
        }
        st = merged;
        return;
      }
      default:
        if (!is_statement_kind(s.kind)) read_expr(s, st);  // bare expression statement
        return;
    }
  }

  void walk_block(const Node& block, FlowState& st) {
    for (const Node& s : block.children) walk_stmt(s, st);
  }
};

}  // namespace detail

struct AugmentedAst {
  Node ast;
  std::vector<SemanticEdge> edges;
};

inline std::vector<SemanticEdge> semantic_edges(const Node& method) {
  return detail::EdgeBuilder(method).build();
}

inline AugmentedAst augment(const Node& method) {
  return AugmentedAst{method, semantic_edges(method)};
}

}  // namespace wheacha
