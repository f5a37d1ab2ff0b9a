#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "wheacha/wheacha.hpp"

using namespace wheacha;

namespace {

int count_kind(const std::vector<SemanticEdge>& edges, EdgeKind k) {
  int c = 0;
  for (const SemanticEdge& e : edges)
    if (e.kind == k) ++c;
  return c;
}

const Node* ident_at(const Node& root, const std::string& name, int occurrence) {
  const Node* found = nullptr;
  int seen = 0;
  visit_preorder(root, [&](const Node& n) {
    if (n.kind == NodeKind::Identifier && n.value == name && seen++ == occurrence && !found)
      found = &n;
  });
  return found;
}

bool has_edge(const std::vector<SemanticEdge>& edges, EdgeKind k, int from, int to) {
  for (const SemanticEdge& e : edges)
    if (e.kind == k && e.from == from && e.to == to) return true;
  return false;
}

}  // namespace

TEST_CASE("ComputedFrom links assignment targets to rhs reads") {
  Node m = parse("void f() {\nx = a + b;\n}");
  auto edges = semantic_edges(m);
  const Node* x = ident_at(m, "x", 0);
  const Node* a = ident_at(m, "a", 0);
  const Node* b = ident_at(m, "b", 0);
  CHECK(has_edge(edges, EdgeKind::ComputedFrom, x->id, a->id));
  CHECK(has_edge(edges, EdgeKind::ComputedFrom, x->id, b->id));
  CHECK(count_kind(edges, EdgeKind::ComputedFrom) == 2);
}

TEST_CASE("declaration initializers also compute the target") {
  Node m = parse("void f() {\nint y = a * 2;\n}");
  auto edges = semantic_edges(m);
  const Node* y = ident_at(m, "y", 0);
  const Node* a = ident_at(m, "a", 0);
  CHECK(has_edge(edges, EdgeKind::ComputedFrom, y->id, a->id));
}

TEST_CASE("LastWrite and LastRead follow source order") {
  Node m = parse("void f() {\nx = a;\nuse(x);\nuse(x);\n}");
  auto edges = semantic_edges(m);
  const Node* write = ident_at(m, "x", 0);
  const Node* read1 = ident_at(m, "x", 1);
  const Node* read2 = ident_at(m, "x", 2);
  CHECK(has_edge(edges, EdgeKind::LastWrite, read1->id, write->id));
  CHECK(has_edge(edges, EdgeKind::LastWrite, read2->id, write->id));
  CHECK(has_edge(edges, EdgeKind::LastRead, read2->id, read1->id));
  CHECK(has_edge(edges, EdgeKind::LastLexicalUse, read1->id, write->id));
  CHECK(has_edge(edges, EdgeKind::LastLexicalUse, read2->id, read1->id));
}

TEST_CASE("joins at if reach both branches' last events") {
  Node m = parse(
      "void f() {\nx = a;\nif(p > q) {\nx = b;\n} else {\nx = c;\n}\nuse(x);\n}");
  auto edges = semantic_edges(m);
  const Node* then_write = ident_at(m, "x", 1);
  const Node* else_write = ident_at(m, "x", 2);
  const Node* final_read = ident_at(m, "x", 3);
  CHECK(has_edge(edges, EdgeKind::LastWrite, final_read->id, then_write->id));
  CHECK(has_edge(edges, EdgeKind::LastWrite, final_read->id, else_write->id));
}

TEST_CASE("without else the pre-branch state joins in") {
  Node m = parse("void f() {\nx = a;\nif(p > q) {\nx = b;\n}\nuse(x);\n}");
  auto edges = semantic_edges(m);
  const Node* first_write = ident_at(m, "x", 0);
  const Node* then_write = ident_at(m, "x", 1);
  const Node* final_read = ident_at(m, "x", 2);
  CHECK(has_edge(edges, EdgeKind::LastWrite, final_read->id, first_write->id));
  CHECK(has_edge(edges, EdgeKind::LastWrite, final_read->id, then_write->id));
}

TEST_CASE("guards connect branch variables to the guard expression") {
  Node m = parse("void f() {\nif(n > 0) {\nuse(n);\n} else {\ndrop(n);\n}\n}");
  auto edges = semantic_edges(m);
  const Node* guard_expr = &method_body(m).children[0].children[0];
  const Node* then_use = ident_at(m, "n", 1);
  const Node* else_use = ident_at(m, "n", 2);
  CHECK(has_edge(edges, EdgeKind::GuardedBy, then_use->id, guard_expr->id));
  CHECK(has_edge(edges, EdgeKind::GuardedByNegation, else_use->id, guard_expr->id));
  // a variable the guard does not use gets no guard edge
  Node m2 = parse("void f() {\nif(n > 0) {\nuse(other);\n}\n}");
  auto edges2 = semantic_edges(m2);
  CHECK(count_kind(edges2, EdgeKind::GuardedBy) == 0);
}

TEST_CASE("FormalArgName resolves recursive same-file calls") {
  Node m = parse("void twice(int v) {\ntwice(w);\n}");
  auto edges = semantic_edges(m);
  const Node* arg = ident_at(m, "w", 0);
  const Node* param = ident_at(m, "v", 0);
  CHECK(has_edge(edges, EdgeKind::FormalArgName, arg->id, param->id));
}

TEST_CASE("a compare-style wheat carries one LastWrite and two ComputedFrom edges") {
  Node m = parse("void compare(int x, int y) {\nint diff = x - y;\nreturn diff;\n}");
  auto edges = semantic_edges(m);
  CHECK(count_kind(edges, EdgeKind::ComputedFrom) == 2);
  int last_writes = 0;
  const Node* decl = ident_at(m, "diff", 0);
  const Node* use = ident_at(m, "diff", 1);
  for (const SemanticEdge& e : edges)
    if (e.kind == EdgeKind::LastWrite && e.from == use->id && e.to == decl->id) ++last_writes;
  CHECK(last_writes == 1);
}

TEST_CASE("methods without assignments may still chain lexical uses") {
  Node m = parse("void f() {\nuse(a);\nuse(a);\n}");
  auto edges = semantic_edges(m);
  CHECK(count_kind(edges, EdgeKind::ComputedFrom) == 0);
  CHECK(count_kind(edges, EdgeKind::LastLexicalUse) >= 1);
}

TEST_CASE("edge endpoints exist and augment is idempotent") {
  std::vector<std::string> sources = {
      "void f() {\nx = a;\nif(x > b) {\ny = x;\n}\nuse(y);\n}",
      "void g(int k) {\nwhile(k > 0) {\nk = k - 1;\n}\ng(k);\n}",
  };
  for (const std::string& src : sources) {
    Node m = parse(src);
    AugmentedAst aug = augment(m);
    std::set<int> ids;
    visit_preorder(m, [&](const Node& n) { ids.insert(n.id); });
    for (const SemanticEdge& e : aug.edges) {
      CHECK(ids.count(e.from));
      CHECK(ids.count(e.to));
    }
    AugmentedAst again = augment(m);
    CHECK(aug.edges == again.edges);
  }
}
