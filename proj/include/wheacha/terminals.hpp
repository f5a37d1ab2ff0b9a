#pragma once

#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wheacha/ast.hpp"

namespace wheacha {

// A terminal is a contentful token owned by an AST node: identifiers, literals,
// operator symbols and control keywords. Structural punctuation (parens, braces,
// semicolons, commas, dots, generic angle brackets) is serialization sugar and
// owns no terminal. A generic type leaf like "List<Obj>" owns two terminals
// (slots 0 and 1).
struct Terminal {
  std::string text;
  int node_id;
  int slot;
};

namespace detail {

inline bool generic_ident(const Node& n) {
  return n.kind == NodeKind::Identifier && n.value.find('<') != std::string::npos;
}

inline std::pair<std::string, std::string> split_generic(const std::string& v) {
  auto lt = v.find('<');
  auto gt = v.rfind('>');
  return {v.substr(0, lt), v.substr(lt + 1, gt - lt - 1)};
}

inline void walk_terminals(const Node& n, const std::function<void(const Node&, int, const std::string&)>& emit) {
  switch (n.kind) {
    case NodeKind::Identifier:
      if (generic_ident(n)) {
        auto [base, arg] = split_generic(n.value);
        emit(n, 0, base);
        emit(n, 1, arg);
      } else {
        emit(n, 0, n.value);
      }
      return;
    case NodeKind::Literal:
      emit(n, 0, n.value);
      return;
    case NodeKind::BinaryOp:
      if (!n.children.empty()) walk_terminals(n.children[0], emit);
      emit(n, 0, n.value);
      if (n.children.size() > 1) walk_terminals(n.children[1], emit);
      return;
    case NodeKind::UnaryOp:
      emit(n, 0, n.value);
      if (!n.children.empty()) walk_terminals(n.children[0], emit);
      return;
    case NodeKind::Assign:
      if (!n.children.empty()) walk_terminals(n.children[0], emit);
      emit(n, 0, "=");
      if (n.children.size() > 1) walk_terminals(n.children[1], emit);
      return;
    case NodeKind::VarDecl:
      if (n.children.size() >= 2) {
        walk_terminals(n.children[0], emit);
        walk_terminals(n.children[1], emit);
        if (n.children.size() >= 3) {
          emit(n, 0, "=");
          walk_terminals(n.children[2], emit);
        }
      } else if (!n.children.empty()) {
        walk_terminals(n.children[0], emit);
      }
      return;
    case NodeKind::Return:
      emit(n, 0, "return");
      if (!n.children.empty()) walk_terminals(n.children[0], emit);
      return;
    case NodeKind::If:
      emit(n, 0, "if");
      if (!n.children.empty()) walk_terminals(n.children[0], emit);
      if (n.children.size() > 1) walk_terminals(n.children[1], emit);
      if (n.children.size() > 2) {
        emit(n, 1, "else");
        walk_terminals(n.children[2], emit);
      }
      return;
    case NodeKind::While:
      emit(n, 0, "while");
      for (const Node& c : n.children) walk_terminals(c, emit);
      return;
    case NodeKind::For:
      emit(n, 0, "for");
      for (const Node& c : n.children) walk_terminals(c, emit);
      return;
    case NodeKind::Switch:
      emit(n, 0, "switch");
      for (const Node& c : n.children) walk_terminals(c, emit);
      return;
    case NodeKind::Case:
      emit(n, 0, n.value == "default" ? "default" : "case");
      for (const Node& c : n.children) walk_terminals(c, emit);
      return;
    case NodeKind::Method:
      walk_terminals(n.children[0], emit);
      emit(n, 0, n.value);
      walk_terminals(n.children[1], emit);
      walk_terminals(n.children[2], emit);
      return;
    default:  // ParamList, Param, Block, ExprStmt, Call, ArgList, FieldAccess
      for (const Node& c : n.children) walk_terminals(c, emit);
      return;
  }
}

}  // namespace detail

inline std::vector<Terminal> terminal_tokens(const Node& n) {
  std::vector<Terminal> out;
  detail::walk_terminals(n, [&](const Node& owner, int slot, const std::string& text) {
    out.push_back(Terminal{text, owner.id, slot});
  });
  return out;
}

// ---------------------------------------------------------------------------
// Projection: prune a tree onto a surviving set of terminals. Nodes whose
// terminals vanish dissolve; their surviving pieces hoist to the enclosing
// statement context, in source order. This is the shared materialization rule
// for delta-debugging candidates, oracle candidates, and single-leaf deletion.
// ---------------------------------------------------------------------------

class Projector {
 public:
  using Kept = std::function<bool(int node_id, int slot)>;

  explicit Projector(Kept kept) : kept_(std::move(kept)) {}

  // Remnants of one node: zero or more expressions/statements, source order.
  std::vector<Node> project(const Node& n) {
    switch (n.kind) {
      case NodeKind::Identifier: return project_identifier(n);
      case NodeKind::Literal:
        return kept_(n.id, 0) ? one(n) : none();
      case NodeKind::BinaryOp: {
        auto l = project(n.children[0]);
        auto r = project(n.children[1]);
        if (kept_(n.id, 0) && !l.empty() && !r.empty()) {
          Node b = shell(n);
          b.children.push_back(take(l));
          b.children.push_back(take(r));
          return merge(one_node(std::move(b)), rest(l), rest(r));
        }
        return merge(l, r);
      }
      case NodeKind::UnaryOp: {
        auto c = project(n.children[0]);
        if (kept_(n.id, 0) && !c.empty()) {
          Node u = shell(n);
          u.children.push_back(take(c));
          return merge(one_node(std::move(u)), rest(c));
        }
        return c;
      }
      case NodeKind::FieldAccess: {
        auto o = project(n.children[0]);
        auto f = n.children.size() > 1 ? project(n.children[1]) : none();
        if (!f.empty()) {
          if (!o.empty()) {
            Node fa = shell(n);
            fa.children.push_back(take(o));
            fa.children.push_back(take(f));
            return merge(one_node(std::move(fa)), rest(o), rest(f));
          }
          return f;
        }
        return o;
      }
      case NodeKind::Call: {
        auto callee = project(n.children[0]);
        std::vector<Node> args;
        if (n.children.size() > 1)
          for (const Node& a : n.children[1].children) append(args, project(a));
        if (!callee.empty()) {
          Node list = n.children.size() > 1 ? shell(n.children[1]) : Node{};
          if (n.children.size() <= 1) { list.kind = NodeKind::ArgList; list.id = n.id; }
          list.children = std::move(args);
          Node call = shell(n);
          call.children.push_back(take(callee));
          call.children.push_back(std::move(list));
          return merge(one_node(std::move(call)), rest(callee));
        }
        return args;
      }
      case NodeKind::ExprStmt: {
        auto e = project(n.children[0]);
        if (e.size() == 1) {
          Node s = shell(n);
          s.children.push_back(std::move(e[0]));
          return one_node(std::move(s));
        }
        return e;  // empty, or split into bare pieces
      }
      case NodeKind::VarDecl: return project_vardecl(n);
      case NodeKind::Assign: {
        auto l = project(n.children[0]);
        auto r = project(n.children[1]);
        if (kept_(n.id, 0) && !l.empty() && !r.empty()) {
          Node a = shell(n);
          a.children.push_back(take(l));
          a.children.push_back(take(r));
          return merge(one_node(std::move(a)), rest(l), rest(r));
        }
        return merge(l, r);
      }
      case NodeKind::Return: {
        auto e = n.children.empty() ? none() : project(n.children[0]);
        if (kept_(n.id, 0)) {
          Node ret = shell(n);
          if (!e.empty()) ret.children.push_back(take(e));
          return merge(one_node(std::move(ret)), rest(e));
        }
        return e;
      }
      case NodeKind::If: return project_if(n);
      case NodeKind::While: {
        auto p = project(n.children[0]);
        auto body = project_block(n.children[1]);
        if (kept_(n.id, 0) && !p.empty()) {
          Node w = shell(n);
          w.children.push_back(take(p));
          w.children.push_back(block_of(n.children[1], std::move(body)));
          return merge(one_node(std::move(w)), rest(p));
        }
        return merge(p, body);
      }
      case NodeKind::For: return project_for(n);
      case NodeKind::Switch: return project_switch(n);
      case NodeKind::Block: return project_block(n);
      default:
        return one(n);
    }
  }

  // Project a method body onto a kept set; header untouched.
  static Node project_method(const Node& method, const std::set<int>& kept_indices) {
    std::vector<Terminal> terms = terminal_tokens(method_body(method));
    std::set<std::pair<int, int>> keep;
    for (std::size_t i = 0; i < terms.size(); ++i)
      if (kept_indices.count(static_cast<int>(i)))
        keep.insert({terms[i].node_id, terms[i].slot});
    Projector pr([keep](int id, int slot) { return keep.count({id, slot}) > 0; });
    Node out = method;
    Node body = method_body(method);
    Node& dst = method_body(out);
    dst.children.clear();
    for (const Node& s : body.children) append(dst.children, pr.project(s));
    return out;
  }

 private:
  Kept kept_;

  static std::vector<Node> none() { return {}; }
  static std::vector<Node> one(const Node& n) { return {n}; }
  static std::vector<Node> one_node(Node&& n) {
    std::vector<Node> v;
    v.push_back(std::move(n));
    return v;
  }
  static Node shell(const Node& n) {
    Node s;
    s.id = n.id;
    s.kind = n.kind;
    s.value = n.value;
    return s;
  }
  static Node take(std::vector<Node>& v) { return std::move(v[0]); }
  static std::vector<Node> rest(std::vector<Node>& v) {
    std::vector<Node> out;
    for (std::size_t i = 1; i < v.size(); ++i) out.push_back(std::move(v[i]));
    return out;
  }
  static void append(std::vector<Node>& dst, std::vector<Node> src) {
    for (Node& n : src) dst.push_back(std::move(n));
  }
  template <typename... Rest>
  static std::vector<Node> merge(std::vector<Node> first, Rest... rests) {
    (append(first, std::move(rests)), ...);
    return first;
  }
  static Node block_of(const Node& original, std::vector<Node> stmts) {
    Node b = shell(original);
    b.children = std::move(stmts);
    return b;
  }

  std::vector<Node> project_identifier(const Node& n) {
    if (!detail::generic_ident(n))
      return kept_(n.id, 0) ? one(n) : none();
    auto [base, arg] = detail::split_generic(n.value);
    bool k0 = kept_(n.id, 0), k1 = kept_(n.id, 1);
    if (k0 && k1) return one(n);
    if (k0 || k1) {
      Node part = shell(n);
      part.value = k0 ? base : arg;
      return one_node(std::move(part));
    }
    return none();
  }

  std::vector<Node> project_vardecl(const Node& n) {
    if (n.children.size() < 2) {
      return n.children.empty() ? none() : project(n.children[0]);
    }
    auto t = project(n.children[0]);
    auto name = project(n.children[1]);
    bool eq = n.children.size() >= 3 && kept_(n.id, 0);
    auto init = n.children.size() >= 3 ? project(n.children[2]) : none();
    if (!name.empty() && !t.empty()) {
      Node d = shell(n);
      d.children.push_back(take(t));
      d.children.push_back(take(name));
      if (eq && !init.empty()) {
        d.children.push_back(take(init));
        return merge(one_node(std::move(d)), rest(init));
      }
      return merge(one_node(std::move(d)), init);
    }
    if (!name.empty()) {  // type gone: the assignment part survives on its own
      if (eq && !init.empty()) {
        Node a = shell(n);
        a.kind = NodeKind::Assign;
        a.children.push_back(take(name));
        a.children.push_back(take(init));
        return merge(one_node(std::move(a)), rest(init));
      }
      return merge(name, init);
    }
    return merge(t, init);
  }

  std::vector<Node> project_if(const Node& n) {
    auto p = project(n.children[0]);
    auto then_stmts = project_block(n.children[1]);
    bool has_else = n.children.size() > 2;
    auto else_stmts = has_else ? project_block(n.children[2]) : none();
    if (kept_(n.id, 0) && !p.empty()) {
      Node f = shell(n);
      f.children.push_back(take(p));
      f.children.push_back(block_of(n.children[1], std::move(then_stmts)));
      if (has_else && kept_(n.id, 1)) {
        f.children.push_back(block_of(n.children[2], std::move(else_stmts)));
        return merge(one_node(std::move(f)), rest(p));
      }
      return merge(one_node(std::move(f)), rest(p), else_stmts);
    }
    return merge(p, then_stmts, else_stmts);
  }

  std::vector<Node> project_for(const Node& n) {
    auto init = project(n.children[0]);
    auto cond = project(n.children[1]);
    auto update = project(n.children[2]);
    auto body = project_block(n.children[3]);
    if (kept_(n.id, 0) && !init.empty() && !cond.empty() && !update.empty()) {
      Node f = shell(n);
      f.children.push_back(take(init));
      f.children.push_back(take(cond));
      f.children.push_back(take(update));
      f.children.push_back(block_of(n.children[3], std::move(body)));
      return merge(one_node(std::move(f)), rest(init), rest(cond), rest(update));
    }
    return merge(init, cond, update, body);
  }

  std::vector<Node> project_switch(const Node& n) {
    auto s = project(n.children[0]);
    if (kept_(n.id, 0) && !s.empty()) {
      Node sw = shell(n);
      sw.children.push_back(take(s));
      std::vector<Node> floated;
      for (std::size_t i = 1; i < n.children.size(); ++i) {
        const Node& c = n.children[i];
        bool is_default = c.value == "default";
        std::size_t first = is_default ? 0 : 1;
        auto label = is_default ? none() : project(c.children[0]);
        std::vector<Node> stmts;
        for (std::size_t j = first; j < c.children.size(); ++j)
          append(stmts, project(c.children[j]));
        if (kept_(c.id, 0) && (is_default || !label.empty())) {
          Node kc = shell(c);
          if (!is_default) kc.children.push_back(take(label));
          append(kc.children, std::move(stmts));
          sw.children.push_back(std::move(kc));
          append(floated, rest(label));
        } else {
          append(floated, std::move(label));
          append(floated, std::move(stmts));
        }
      }
      return merge(one_node(std::move(sw)), rest(s), std::move(floated));
    }
    std::vector<Node> out = std::move(s);
    for (std::size_t i = 1; i < n.children.size(); ++i) {
      const Node& c = n.children[i];
      std::size_t first = c.value == "default" ? 0 : 1;
      if (first == 1 && !c.children.empty()) append(out, project(c.children[0]));
      for (std::size_t j = first; j < c.children.size(); ++j) append(out, project(c.children[j]));
    }
    return out;
  }

  std::vector<Node> project_block(const Node& b) {
    std::vector<Node> out;
    for (const Node& s : b.children) append(out, project(s));
    return out;
  }
};

// Terminals of a method body (the token universe for DD and the oracle).
inline std::vector<Terminal> body_terminals(const Node& method) {
  return terminal_tokens(method_body(method));
}

}  // namespace wheacha
