#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wheacha/ast.hpp"
#include "wheacha/errors.hpp"
#include "wheacha/serializer.hpp"
#include "wheacha/terminals.hpp"
#include "wheacha/token.hpp"

namespace wheacha {

// A flattened statement: non-control statements verbatim, control statements as
// their predicate with an emptied body (a Switch keeps its case labels). origin
// is the node id in the parent program's tree.
struct Statement {
  Node ast;
  int origin;
};

namespace detail {

inline Node emptied_control(const Node& ctrl) {
  Node c = ctrl;
  switch (ctrl.kind) {
    case NodeKind::If:
      c.children[1].children.clear();
      if (c.children.size() > 2) c.children[2].children.clear();
      return c;
    case NodeKind::While:
    case NodeKind::For:
      c.children.back().children.clear();
      return c;
    case NodeKind::Switch:
      for (std::size_t i = 1; i < c.children.size(); ++i) {
        Node& cs = c.children[i];
        cs.children.resize(cs.value == "default" ? 0 : 1);  // keep label, drop body
      }
      return c;
    default:
      return c;
  }
}

inline void flatten_into(const Node& block, std::vector<Statement>& out);

inline void flatten_statement(const Node& s, std::vector<Statement>& out) {
  if (!is_control_kind(s.kind)) {
    out.push_back(Statement{s, s.id});
    return;
  }
  out.push_back(Statement{emptied_control(s), s.id});
  switch (s.kind) {
    case NodeKind::If:
      flatten_into(s.children[1], out);
      if (s.children.size() > 2) flatten_into(s.children[2], out);
      break;
    case NodeKind::While:
    case NodeKind::For:
      flatten_into(s.children.back(), out);
      break;
    case NodeKind::Switch:
      for (std::size_t i = 1; i < s.children.size(); ++i) {
        const Node& cs = s.children[i];
        std::size_t first = cs.value == "default" ? 0 : 1;
        for (std::size_t j = first; j < cs.children.size(); ++j)
          flatten_statement(cs.children[j], out);
      }
      break;
    default:
      break;
  }
}

inline void flatten_into(const Node& block, std::vector<Statement>& out) {
  for (const Node& s : block.children) flatten_statement(s, out);
}

}  // namespace detail

inline std::vector<Statement> flatten(const Node& method) {
  std::vector<Statement> out;
  detail::flatten_into(method_body(method), out);
  return out;
}

// ---------------------------------------------------------------------------
// Structural embedding and subtraction (P \ fragment).
// ---------------------------------------------------------------------------

namespace detail {

inline bool root_kind_compatible(NodeKind frag, NodeKind prog) {
  if (frag == prog) return true;
  // a declaration reduced to its assignment part keeps matching the declaration
  return frag == NodeKind::Assign && prog == NodeKind::VarDecl;
}

inline bool value_matches(const Node& frag, const Node& prog) {
  return frag.value == prog.value || frag.value == "oov";  // oov: erased value
}

// Order-preserving top-down embedding: the fragment's children map into an
// increasing subsequence of the program node's children, recursively. Program
// nodes outside the image are the dangling nodes. Greedy leftmost placement is
// complete for ordered embeddings.
inline bool embed(const Node& frag, const Node& prog, bool root, std::set<int>& ids) {
  bool kinds_ok = root ? root_kind_compatible(frag.kind, prog.kind) : frag.kind == prog.kind;
  if (!kinds_ok || !value_matches(frag, prog)) return false;
  std::set<int> local;
  local.insert(prog.id);
  std::size_t pi = 0;
  for (const Node& fc : frag.children) {
    bool placed = false;
    while (pi < prog.children.size()) {
      std::set<int> sub;
      if (embed(fc, prog.children[pi], false, sub)) {
        local.insert(sub.begin(), sub.end());
        ++pi;
        placed = true;
        break;
      }
      ++pi;
    }
    if (!placed) return false;
  }
  ids.insert(local.begin(), local.end());
  return true;
}

// Root-level embedding is insensitive to the ExprStmt wrapper: a statement
// reduced to a bare expression still matches its wrapped original (claiming
// the wrapper), and a wrapped fragment matches a re-homed bare expression.
inline bool embed_root(const Node& frag, const Node& prog, std::set<int>& ids) {
  if (embed(frag, prog, true, ids)) return true;
  const Node* f = &frag;
  if (frag.kind == NodeKind::ExprStmt && frag.children.size() == 1) f = &frag.children[0];
  std::set<int> local;
  if (f != &frag && embed(*f, prog, true, local)) {
    ids = std::move(local);
    return true;
  }
  if (prog.kind == NodeKind::ExprStmt && prog.children.size() == 1 &&
      f->kind != NodeKind::ExprStmt) {
    local.clear();
    if (embed(*f, prog.children[0], true, local)) {
      local.insert(prog.id);
      ids = std::move(local);
      return true;
    }
  }
  return false;
}

// Leftmost preorder match within the method body whose image avoids `claimed`.
inline bool locate(const Node& scope, const Node& frag, const std::set<int>& claimed,
                   std::set<int>& ids) {
  std::set<int> local;
  if (embed_root(frag, scope, local)) {
    bool disjoint = true;
    for (int id : local)
      if (claimed.count(id)) { disjoint = false; break; }
    if (disjoint) {
      ids = std::move(local);
      return true;
    }
  }
  for (const Node& c : scope.children)
    if (locate(c, frag, claimed, ids)) return true;
  return false;
}

inline std::vector<const Node*> fragment_statements(const Node& fragment) {
  std::vector<const Node*> out;
  if (fragment.kind == NodeKind::Method) {
    for (const Node& s : method_body(fragment).children) out.push_back(&s);
  } else if (fragment.kind == NodeKind::Block) {
    for (const Node& s : fragment.children) out.push_back(&s);
  } else {
    out.push_back(&fragment);
  }
  return out;
}

}  // namespace detail

// Subtraction: for each fragment statement, locate the equivalent subtree
// (leftmost in preorder when several match), remove the located image, and let
// orphaned nodes reattach to the enclosing statement context in source order.
inline Node subtract(const Node& program_method, const Node& fragment) {
  std::set<int> claimed;
  for (const Node* frag : detail::fragment_statements(fragment)) {
    std::set<int> ids;
    bool found = false;
    for (const Node& s : method_body(program_method).children) {
      if (detail::locate(s, *frag, claimed, ids)) { found = true; break; }
    }
    if (!found) throw SubtreeNotFound(serialize(*frag));
    claimed.insert(ids.begin(), ids.end());
  }
  Projector pr([&claimed](int id, int) { return claimed.count(id) == 0; });
  Node out = program_method;
  Node& body = method_body(out);
  std::vector<Node> stmts;
  for (const Node& s : method_body(program_method).children) {
    for (Node& r : pr.project(s)) stmts.push_back(std::move(r));
  }
  body.children = std::move(stmts);
  return out;
}

// Claimed-image size of a fragment against a program, for node accounting.
inline int matched_image_size(const Node& program_method, const Node& fragment) {
  std::set<int> claimed;
  for (const Node* frag : detail::fragment_statements(fragment)) {
    std::set<int> ids;
    bool found = false;
    for (const Node& s : method_body(program_method).children)
      if (detail::locate(s, *frag, claimed, ids)) { found = true; break; }
    if (!found) throw SubtreeNotFound(serialize(*frag));
    claimed.insert(ids.begin(), ids.end());
  }
  return static_cast<int>(claimed.size());
}

}  // namespace wheacha
