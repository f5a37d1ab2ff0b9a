#pragma once

#include <functional>
#include <string>
#include <vector>

namespace wheacha {

enum class NodeKind {
  Method, ParamList, Param, Block, If, While, For, Switch, Case, Return,
  ExprStmt, VarDecl, Assign, Call, ArgList, FieldAccess, Identifier, Literal,
  BinaryOp, UnaryOp
};

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Method: return "Method";
    case NodeKind::ParamList: return "ParamList";
    case NodeKind::Param: return "Param";
    case NodeKind::Block: return "Block";
    case NodeKind::If: return "If";
    case NodeKind::While: return "While";
    case NodeKind::For: return "For";
    case NodeKind::Switch: return "Switch";
    case NodeKind::Case: return "Case";
    case NodeKind::Return: return "Return";
    case NodeKind::ExprStmt: return "ExprStmt";
    case NodeKind::VarDecl: return "VarDecl";
    case NodeKind::Assign: return "Assign";
    case NodeKind::Call: return "Call";
    case NodeKind::ArgList: return "ArgList";
    case NodeKind::FieldAccess: return "FieldAccess";
    case NodeKind::Identifier: return "Identifier";
    case NodeKind::Literal: return "Literal";
    case NodeKind::BinaryOp: return "BinaryOp";
    case NodeKind::UnaryOp: return "UnaryOp";
  }
  return "?";
}

// Ordered tree of typed nodes; value semantics, so sharing and cycles are
// impossible by construction. Ids are unique within a tree and survive the
// algebra operations (subtraction, projection, mutation).
struct Node {
  int id = 0;
  NodeKind kind = NodeKind::Identifier;
  std::string value;           // identifier text, literal text, or operator symbol
  std::vector<Node> children;

  bool is_leaf() const { return children.empty(); }
  bool has_value() const { return !value.empty(); }
};

// Node layout used throughout:
//   Method       value=name, children=[Identifier(returnType), ParamList, Block]
//   Param        children=[Identifier(type), Identifier(name)]
//   If           children=[predExpr, Block] or [predExpr, Block, Block] (else)
//   While        children=[predExpr, Block]
//   For          children=[initStmt, condExpr, updateStmt, Block]
//   Switch       children=[scrutineeExpr, Case...]
//   Case         value="default" for default labels, children=[labelExpr?, stmt...]
//   Return       children=[expr?]
//   ExprStmt     children=[expr]
//   VarDecl      children=[Identifier(type), Identifier(name), initExpr?]
//                (reduced forms [name, init], [init], [name] arise from deletions)
//   Assign       children=[lhs, rhs]
//   Call         children=[calleeExpr, ArgList]
//   FieldAccess  children=[objectExpr, Identifier(field)]
//   BinaryOp     value=op, children=[lhs, rhs]; UnaryOp value=op, children=[operand]
// Type identifiers may carry a generic text like "List<Obj>" in a single leaf.

class IdGen {
 public:
  explicit IdGen(int next = 1) : next_(next) {}
  int operator()() { return next_++; }

 private:
  int next_;
};

inline Node make_node(NodeKind kind, IdGen& ids, std::string value = "",
                      std::vector<Node> children = {}) {
  Node n;
  n.id = ids();
  n.kind = kind;
  n.value = std::move(value);
  n.children = std::move(children);
  return n;
}

inline int node_count(const Node& n) {
  int c = 1;
  for (const Node& ch : n.children) c += node_count(ch);
  return c;
}

inline int max_id(const Node& n) {
  int m = n.id;
  for (const Node& ch : n.children) m = std::max(m, max_id(ch));
  return m;
}

inline const Node* find_node(const Node& root, int id) {
  if (root.id == id) return &root;
  for (const Node& ch : root.children) {
    if (const Node* f = find_node(ch, id)) return f;
  }
  return nullptr;
}

inline Node* find_node(Node& root, int id) {
  return const_cast<Node*>(find_node(static_cast<const Node&>(root), id));
}

inline void visit_preorder(const Node& n, const std::function<void(const Node&)>& fn) {
  fn(n);
  for (const Node& ch : n.children) visit_preorder(ch, fn);
}

inline void collect_postorder_leaves(const Node& n, std::vector<int>& out) {
  for (const Node& ch : n.children) collect_postorder_leaves(ch, out);
  if (n.is_leaf()) out.push_back(n.id);
}

inline bool same_shape(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.value != b.value || a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!same_shape(a.children[i], b.children[i])) return false;
  return true;
}

inline bool is_statement_kind(NodeKind k) {
  switch (k) {
    case NodeKind::If: case NodeKind::While: case NodeKind::For: case NodeKind::Switch:
    case NodeKind::Return: case NodeKind::ExprStmt: case NodeKind::VarDecl:
    case NodeKind::Assign:
      return true;
    default:
      return false;
  }
}

inline bool is_control_kind(NodeKind k) {
  return k == NodeKind::If || k == NodeKind::While || k == NodeKind::For ||
         k == NodeKind::Switch;
}

// Accessors for the fixed Method layout.
inline const Node& method_body(const Node& method) { return method.children.back(); }
inline Node& method_body(Node& method) { return method.children.back(); }

}  // namespace wheacha
