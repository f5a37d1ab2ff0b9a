#pragma once

#include <string>
#include <vector>

#include "wheacha/ast.hpp"

namespace wheacha {

// Canonical rendering: one statement per line, no indentation, single spaces
// around binary operators and '=', tight control-keyword parens ("if(..)"),
// empty control bodies as ';'. Whitespace is semantically irrelevant to every
// operation here; round trips are checked at token level.
namespace detail {

inline int precedence(const Node& e) {
  if (e.kind == NodeKind::BinaryOp) {
    const std::string& op = e.value;
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<" || op == ">" || op == "<=" || op == ">=") return 4;
    if (op == "+" || op == "-") return 5;
    return 6;  // * / %
  }
  if (e.kind == NodeKind::UnaryOp) return 7;
  return 8;
}

inline std::string render_expr(const Node& e, int min_prec = 0) {
  switch (e.kind) {
    case NodeKind::Identifier:
    case NodeKind::Literal:
      return e.value;
    case NodeKind::FieldAccess: {
      if (e.children.size() == 2)
        return render_expr(e.children[0], 8) + "." + render_expr(e.children[1], 8);
      if (e.children.size() == 1) return render_expr(e.children[0], min_prec);
      return "";
    }
    case NodeKind::Call: {
      std::string callee = e.children.empty() ? "" : render_expr(e.children[0], 8);
      std::string args;
      if (e.children.size() > 1) {
        const Node& list = e.children[1];
        for (std::size_t i = 0; i < list.children.size(); ++i) {
          if (i) args += ", ";
          args += render_expr(list.children[i]);
        }
      }
      return callee + "(" + args + ")";
    }
    case NodeKind::UnaryOp: {
      std::string s = e.value + (e.children.empty() ? "" : render_expr(e.children[0], 7));
      return 7 < min_prec ? "(" + s + ")" : s;
    }
    case NodeKind::BinaryOp: {
      int p = precedence(e);
      std::string l = e.children.size() > 0 ? render_expr(e.children[0], p) : "";
      std::string r = e.children.size() > 1 ? render_expr(e.children[1], p + 1) : "";
      std::string s = l + " " + e.value + " " + r;
      return p < min_prec ? "(" + s + ")" : s;
    }
    default:
      return "";  // statement kinds never reach here
  }
}

inline void render_stmt(const Node& s, std::vector<std::string>& lines);

inline void render_block_lines(const Node& block, std::vector<std::string>& lines) {
  for (const Node& s : block.children) render_stmt(s, lines);
}

// Statement head without the terminating ';' (for for-loop header slots).
inline std::string render_simple(const Node& s) {
  switch (s.kind) {
    case NodeKind::VarDecl: {
      if (s.children.size() >= 3)
        return render_expr(s.children[0]) + " " + render_expr(s.children[1]) + " = " +
               render_expr(s.children[2]);
      if (s.children.size() == 2)
        return render_expr(s.children[0]) + " " + render_expr(s.children[1]);
      return s.children.empty() ? "" : render_expr(s.children[0]);
    }
    case NodeKind::Assign:
      return (s.children.size() > 0 ? render_expr(s.children[0]) : "") + " = " +
             (s.children.size() > 1 ? render_expr(s.children[1]) : "");
    case NodeKind::ExprStmt:
      return s.children.empty() ? "" : render_expr(s.children[0]);
    default:
      return render_expr(s);  // bare expression in statement position
  }
}

inline void render_stmt(const Node& s, std::vector<std::string>& lines) {
  switch (s.kind) {
    case NodeKind::If: {
      std::string head = "if(" + (s.children.empty() ? "" : render_expr(s.children[0])) + ")";
      bool has_else = s.children.size() >= 3;
      const Node* then = s.children.size() >= 2 ? &s.children[1] : nullptr;
      if (!has_else && (!then || then->children.empty())) {
        lines.push_back(head + ";");
        return;
      }
      lines.push_back(head + " {");
      if (then) render_block_lines(*then, lines);
      if (has_else) {
        lines.push_back("} else {");
        render_block_lines(s.children[2], lines);
      }
      lines.push_back("}");
      return;
    }
    case NodeKind::While: {
      std::string head = "while(" + (s.children.empty() ? "" : render_expr(s.children[0])) + ")";
      const Node* body = s.children.size() >= 2 ? &s.children[1] : nullptr;
      if (!body || body->children.empty()) {
        lines.push_back(head + ";");
        return;
      }
      lines.push_back(head + " {");
      render_block_lines(*body, lines);
      lines.push_back("}");
      return;
    }
    case NodeKind::For: {
      std::string head = "for(" + render_simple(s.children[0]) + "; " +
                         render_expr(s.children[1]) + "; " + render_simple(s.children[2]) + ")";
      const Node& body = s.children[3];
      if (body.children.empty()) {
        lines.push_back(head + ";");
        return;
      }
      lines.push_back(head + " {");
      render_block_lines(body, lines);
      lines.push_back("}");
      return;
    }
    case NodeKind::Switch: {
      lines.push_back("switch(" + (s.children.empty() ? "" : render_expr(s.children[0])) +
                      ") {");
      for (std::size_t i = 1; i < s.children.size(); ++i) {
        const Node& c = s.children[i];
        std::size_t first_stmt = 0;
        if (c.value == "default") {
          lines.push_back("default:");
        } else {
          lines.push_back("case " + (c.children.empty() ? "" : render_expr(c.children[0])) +
                          ":");
          first_stmt = 1;
        }
        for (std::size_t j = first_stmt; j < c.children.size(); ++j)
          render_stmt(c.children[j], lines);
      }
      lines.push_back("}");
      return;
    }
    case NodeKind::Return:
      lines.push_back(s.children.empty() ? "return;" : "return " + render_expr(s.children[0]) + ";");
      return;
    case NodeKind::Block:  // nested block used as a statement container
      render_block_lines(s, lines);
      return;
    default:
      lines.push_back(render_simple(s) + ";");
      return;
  }
}

inline std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += "\n";
    out += lines[i];
  }
  return out;
}

}  // namespace detail

inline std::string serialize(const Node& n) {
  if (n.kind == NodeKind::Method) {
    std::string params;
    const Node& plist = n.children[1];
    for (std::size_t i = 0; i < plist.children.size(); ++i) {
      if (i) params += ", ";
      const Node& p = plist.children[i];
      params += detail::render_expr(p.children[0]) + " " + detail::render_expr(p.children[1]);
    }
    std::vector<std::string> lines;
    lines.push_back(detail::render_expr(n.children[0]) + " " + n.value + "(" + params + ") {");
    detail::render_block_lines(n.children[2], lines);
    lines.push_back("}");
    return detail::join_lines(lines);
  }
  if (n.kind == NodeKind::Block) {
    std::vector<std::string> lines;
    detail::render_block_lines(n, lines);
    return detail::join_lines(lines);
  }
  if (is_statement_kind(n.kind)) {
    std::vector<std::string> lines;
    detail::render_stmt(n, lines);
    return detail::join_lines(lines);
  }
  return detail::render_expr(n);
}

}  // namespace wheacha
