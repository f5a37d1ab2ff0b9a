#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "wheacha/ast.hpp"
#include "wheacha/errors.hpp"
#include "wheacha/token.hpp"

namespace wheacha {

// Recursive-descent parser for the mini language:
//
//   method  := typeRef IDENT '(' params? ')' block
//   stmt    := if | while | for | switch | return | (varDecl|assign|expr) ';' | ';'
//   body    := block | ';'            (control bodies are braced or empty)
//   typeRef := IDENT ('<' IDENT '>')? (stored as one identifier leaf, text verbatim)
//
// `a<b>` parses as a generic identifier only when the token after '>' cannot
// start an expression; otherwise '<'/'>' are comparison operators.
class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Node parse_method() {
    Node m = method();
    if (pos_ != toks_.size()) fail("end of input");
    return m;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  IdGen ids_;

  [[noreturn]] void fail(const std::string& expected) {
    std::string got = pos_ < toks_.size() ? "'" + toks_[pos_].text + "'" : "end of input";
    throw ParseError("expected " + expected + ", got " + got,
                     static_cast<int>(pos_), expected);
  }

  const Token* peek(std::size_t ahead = 0) const {
    return pos_ + ahead < toks_.size() ? &toks_[pos_ + ahead] : nullptr;
  }
  bool at(std::string_view text) const {
    const Token* t = peek();
    return t && t->text == text;
  }
  bool at_kind(TokenKind k) const {
    const Token* t = peek();
    return t && t->kind == k;
  }
  Token eat() {
    if (pos_ >= toks_.size()) fail("a token");
    return toks_[pos_++];
  }
  Token expect(std::string_view text) {
    if (!at(text)) fail("'" + std::string(text) + "'");
    return eat();
  }
  Token expect_ident() {
    if (!at_kind(TokenKind::Identifier)) fail("identifier");
    return eat();
  }

  bool expr_start_at(std::size_t ahead) const {
    const Token* t = peek(ahead);
    if (!t) return false;
    switch (t->kind) {
      case TokenKind::Identifier:
      case TokenKind::StringLiteral:
      case TokenKind::NumberLiteral:
        return true;
      default:
        return t->text == "(" || t->text == "!" || t->text == "-";
    }
  }

  // IDENT '<' IDENT '>' not followed by an expression start.
  bool generic_ahead(std::size_t from) const {
    const Token* a = peek(from);
    const Token* b = peek(from + 1);
    const Token* c = peek(from + 2);
    const Token* d = peek(from + 3);
    return a && a->kind == TokenKind::Identifier && b && b->text == "<" && c &&
           c->kind == TokenKind::Identifier && d && d->text == ">" &&
           !expr_start_at(from + 4);
  }

  Node type_ref() {
    Token base = expect_ident();
    if (at("<") && peek(1) && peek(1)->kind == TokenKind::Identifier && peek(2) &&
        peek(2)->text == ">") {
      Token arg = (eat(), eat());  // '<' IDENT
      expect(">");
      return make_node(NodeKind::Identifier, ids_, base.text + "<" + arg.text + ">");
    }
    return make_node(NodeKind::Identifier, ids_, base.text);
  }

  Node method() {
    Node rtype = type_ref();
    Token name = expect_ident();
    expect("(");
    Node params = make_node(NodeKind::ParamList, ids_);
    if (!at(")")) {
      for (;;) {
        Node ptype = type_ref();
        Token pname = expect_ident();
        params.children.push_back(make_node(
            NodeKind::Param, ids_, "",
            {std::move(ptype), make_node(NodeKind::Identifier, ids_, pname.text)}));
        if (!at(",")) break;
        eat();
      }
    }
    expect(")");
    Node body = block();
    return make_node(NodeKind::Method, ids_, name.text,
                     {std::move(rtype), std::move(params), std::move(body)});
  }

  Node block() {
    expect("{");
    Node b = make_node(NodeKind::Block, ids_);
    while (!at("}")) {
      if (at(";")) { eat(); continue; }  // null statement
      b.children.push_back(statement());
    }
    expect("}");
    return b;
  }

  // Control body: braced block or ';' for an empty one.
  Node control_body() {
    if (at(";")) {
      eat();
      return make_node(NodeKind::Block, ids_);
    }
    return block();
  }

  Node statement() {
    if (at("if")) return if_stmt();
    if (at("while")) return while_stmt();
    if (at("for")) return for_stmt();
    if (at("switch")) return switch_stmt();
    if (at("return")) return return_stmt();
    Node s = simple_stmt();
    expect(";");
    return s;
  }

  Node if_stmt() {
    expect("if");
    expect("(");
    Node pred = expression();
    expect(")");
    Node then = control_body();
    std::vector<Node> children;
    children.push_back(std::move(pred));
    children.push_back(std::move(then));
    if (at("else")) {
      eat();
      children.push_back(control_body());
    }
    return make_node(NodeKind::If, ids_, "", std::move(children));
  }

  Node while_stmt() {
    expect("while");
    expect("(");
    Node pred = expression();
    expect(")");
    Node body = control_body();
    return make_node(NodeKind::While, ids_, "", {std::move(pred), std::move(body)});
  }

  Node for_stmt() {
    expect("for");
    expect("(");
    Node init = simple_stmt();
    expect(";");
    Node cond = expression();
    expect(";");
    Node update = simple_stmt();
    expect(")");
    Node body = control_body();
    return make_node(NodeKind::For, ids_, "",
                     {std::move(init), std::move(cond), std::move(update), std::move(body)});
  }

  Node switch_stmt() {
    expect("switch");
    expect("(");
    Node scrutinee = expression();
    expect(")");
    expect("{");
    std::vector<Node> children;
    children.push_back(std::move(scrutinee));
    while (!at("}")) {
      if (at("case")) {
        eat();
        Node label = expression();
        expect(":");
        Node c = make_node(NodeKind::Case, ids_, "", {std::move(label)});
        while (!at("case") && !at("default") && !at("}")) c.children.push_back(statement());
        children.push_back(std::move(c));
      } else if (at("default")) {
        eat();
        expect(":");
        Node c = make_node(NodeKind::Case, ids_, "default");
        while (!at("case") && !at("default") && !at("}")) c.children.push_back(statement());
        children.push_back(std::move(c));
      } else {
        fail("'case', 'default' or '}'");
      }
    }
    expect("}");
    return make_node(NodeKind::Switch, ids_, "", std::move(children));
  }

  Node return_stmt() {
    expect("return");
    if (at(";")) {
      eat();
      return make_node(NodeKind::Return, ids_);
    }
    Node e = expression();
    expect(";");
    return make_node(NodeKind::Return, ids_, "", {std::move(e)});
  }

  // varDecl | assign | bare expression (no trailing ';').
  Node simple_stmt() {
    bool decl = false;
    const Token* t0 = peek();
    if (t0 && t0->kind == TokenKind::Identifier) {
      const Token* t1 = peek(1);
      if (t1 && t1->kind == TokenKind::Identifier) decl = true;  // T name
      if (!decl && t1 && t1->text == "<") {                      // T<A> name
        const Token* g2 = peek(2);
        const Token* g3 = peek(3);
        const Token* g4 = peek(4);
        if (g2 && g2->kind == TokenKind::Identifier && g3 && g3->text == ">" && g4 &&
            g4->kind == TokenKind::Identifier)
          decl = true;
      }
    }
    if (decl) {
      Node type = type_ref();
      Token name = expect_ident();
      std::vector<Node> children;
      children.push_back(std::move(type));
      children.push_back(make_node(NodeKind::Identifier, ids_, name.text));
      if (at("=")) {
        eat();
        children.push_back(expression());
      }
      return make_node(NodeKind::VarDecl, ids_, "", std::move(children));
    }
    Node e = expression();
    if (at("=")) {
      if (e.kind != NodeKind::Identifier && e.kind != NodeKind::FieldAccess)
        fail("assignable left-hand side");
      eat();
      Node rhs = expression();
      return make_node(NodeKind::Assign, ids_, "", {std::move(e), std::move(rhs)});
    }
    return make_node(NodeKind::ExprStmt, ids_, "", {std::move(e)});
  }

  Node expression() { return or_expr(); }

  Node binary_chain(Node (Parser::*next)(), std::initializer_list<std::string_view> ops) {
    Node lhs = (this->*next)();
    for (;;) {
      bool matched = false;
      for (std::string_view op : ops) {
        if (at(op)) {
          std::string sym = eat().text;
          Node rhs = (this->*next)();
          lhs = make_node(NodeKind::BinaryOp, ids_, sym, {std::move(lhs), std::move(rhs)});
          matched = true;
          break;
        }
      }
      if (!matched) return lhs;
    }
  }

  Node or_expr() { return binary_chain(&Parser::and_expr, {"||"}); }
  Node and_expr() { return binary_chain(&Parser::eq_expr, {"&&"}); }
  Node eq_expr() { return binary_chain(&Parser::rel_expr, {"==", "!="}); }
  Node rel_expr() { return binary_chain(&Parser::add_expr, {"<=", ">=", "<", ">"}); }
  Node add_expr() { return binary_chain(&Parser::mul_expr, {"+", "-"}); }
  Node mul_expr() { return binary_chain(&Parser::unary_expr, {"*", "/", "%"}); }

  Node unary_expr() {
    if (at("!") || at("-")) {
      std::string sym = eat().text;
      Node operand = unary_expr();
      return make_node(NodeKind::UnaryOp, ids_, sym, {std::move(operand)});
    }
    return postfix_expr();
  }

  Node postfix_expr() {
    Node e = primary_expr();
    for (;;) {
      if (at("(")) {
        eat();
        Node args = make_node(NodeKind::ArgList, ids_);
        if (!at(")")) {
          for (;;) {
            args.children.push_back(expression());
            if (!at(",")) break;
            eat();
          }
        }
        expect(")");
        e = make_node(NodeKind::Call, ids_, "", {std::move(e), std::move(args)});
      } else if (at(".")) {
        eat();
        Token field = expect_ident();
        e = make_node(NodeKind::FieldAccess, ids_, "",
                      {std::move(e), make_node(NodeKind::Identifier, ids_, field.text)});
      } else {
        return e;
      }
    }
  }

  Node primary_expr() {
    const Token* t = peek();
    if (!t) fail("expression");
    if (t->kind == TokenKind::Identifier) {
      if (generic_ahead(0)) {
        Token base = eat();      // IDENT
        eat();                   // '<'
        Token arg = eat();       // IDENT
        expect(">");
        return make_node(NodeKind::Identifier, ids_, base.text + "<" + arg.text + ">");
      }
      return make_node(NodeKind::Identifier, ids_, eat().text);
    }
    if (t->kind == TokenKind::StringLiteral || t->kind == TokenKind::NumberLiteral)
      return make_node(NodeKind::Literal, ids_, eat().text);
    if (t->text == "(") {
      eat();
      Node e = expression();
      expect(")");
      return e;
    }
    fail("expression");
  }
};

inline Node parse(std::string_view source) {
  return Parser(tokenize(source)).parse_method();
}

}  // namespace wheacha
