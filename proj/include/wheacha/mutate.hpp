#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "wheacha/reduce.hpp"
#include "wheacha/verify.hpp"

namespace wheacha {

// The extracted feature set: the surviving candidate body plus verdict metadata.
struct Wheat {
  Node ast;                                             // Block of surviving statements
  std::vector<Token> tokens;                            // tokenize(serialize(ast))
  Fragment source_fragment;
  Verdict verdict;
  int token_count = 0;
  std::vector<std::pair<int, std::string>> oov_substitutions;  // (node id, original value)
  std::string label;
  long queries = 0;
  double elapsed_ms = 0;
};

enum class OpStatus { Applied, Rejected, Inadmissible, NoOp };

namespace detail {

inline int owned_terminal_count(const Node& method, int node_id) {
  int c = 0;
  for (const Terminal& t : terminal_tokens(method_body(method)))
    if (t.node_id == node_id) ++c;
  return c;
}

inline Node project_body_without(const Node& candidate_method, int node_id) {
  Projector pr([node_id](int id, int) { return id != node_id; });
  Node out = candidate_method;
  Node& body = method_body(out);
  std::vector<Node> stmts;
  for (const Node& s : method_body(candidate_method).children)
    for (Node& r : pr.project(s)) stmts.push_back(std::move(r));
  body.children = std::move(stmts);
  return out;
}

}  // namespace detail

// Deletes a leaf plus the minimal structure needed to stay serializable
// (statement-local projection). The tree is updated only when the mutated
// candidate still verifies; otherwise it is left byte-identical.
inline OpStatus delete_node(Node& candidate_method, int leaf_id, const Program& original,
                            const Model& model, QueryLedger& ledger,
                            HeaderMode mode = HeaderMode::MaskName) {
  const Node* leaf = find_node(candidate_method, leaf_id);
  if (!leaf || !leaf->is_leaf()) return OpStatus::Inadmissible;
  if (detail::owned_terminal_count(candidate_method, leaf_id) == 0)
    return OpStatus::Inadmissible;  // content-free structural leaf
  Node attempt = detail::project_body_without(candidate_method, leaf_id);
  Verdict v;
  try {
    v = verify_wheat(model, attempt, original, ledger, mode);
  } catch (const SubtreeNotFound&) {
    return OpStatus::Rejected;
  }
  if (v.sufficient && v.necessary) {
    candidate_method = std::move(attempt);
    return OpStatus::Applied;
  }
  return OpStatus::Rejected;
}

// Replaces a value-bearing leaf with the out-of-vocabulary token. Mutating an
// already-oov leaf is a no-op success.
inline OpStatus mutate_node(Node& candidate_method, int leaf_id, const Program& original,
                            const Model& model, QueryLedger& ledger,
                            HeaderMode mode = HeaderMode::MaskName,
                            std::string* replaced_value = nullptr) {
  Node* leaf = find_node(candidate_method, leaf_id);
  if (!leaf || !leaf->is_leaf()) return OpStatus::Inadmissible;
  if (leaf->kind != NodeKind::Identifier && leaf->kind != NodeKind::Literal)
    return OpStatus::Inadmissible;
  if (leaf->value == kOov) return OpStatus::NoOp;
  Node attempt = candidate_method;
  find_node(attempt, leaf_id)->value = kOov;
  Verdict v;
  try {
    v = verify_wheat(model, attempt, original, ledger, mode);
  } catch (const SubtreeNotFound&) {
    return OpStatus::Rejected;
  }
  if (v.sufficient && v.necessary) {
    if (replaced_value) *replaced_value = leaf->value;
    candidate_method = std::move(attempt);
    return OpStatus::Applied;
  }
  return OpStatus::Rejected;
}

// One postorder pass over the body's leaves: try delete, else try oov-mutate.
// Interior nodes stay intact; they fall away only when structure empties.
inline bool mutate_pass(Node& candidate_method, const Program& original, const Model& model,
                        QueryLedger& ledger, HeaderMode mode,
                        std::vector<std::pair<int, std::string>>* oov_log = nullptr) {
  std::vector<int> leaves;
  collect_postorder_leaves(method_body(candidate_method), leaves);
  bool changed = false;
  for (int id : leaves) {
    if (!find_node(candidate_method, id)) continue;  // removed by an earlier closure
    OpStatus del = delete_node(candidate_method, id, original, model, ledger, mode);
    if (del == OpStatus::Applied) {
      changed = true;
      continue;
    }
    std::string old;
    OpStatus mut = mutate_node(candidate_method, id, original, model, ledger, mode, &old);
    if (mut == OpStatus::Applied) {
      changed = true;
      if (oov_log) oov_log->emplace_back(id, old);
    }
  }
  return changed;
}

inline Node mutate_to_fixpoint(Node candidate_method, const Program& original, const Model& model,
                               QueryLedger& ledger, HeaderMode mode = HeaderMode::MaskName,
                               int cap = 50,
                               std::vector<std::pair<int, std::string>>* oov_log = nullptr) {
  for (int pass = 0; pass < cap; ++pass) {
    if (!mutate_pass(candidate_method, original, model, ledger, mode, oov_log))
      return candidate_method;
  }
  throw FixpointCapExceeded(cap, serialize(candidate_method));
}

struct ExtractOptions {
  int max_k = 3;
  int fixpoint_cap = 50;
  HeaderMode header = HeaderMode::MaskName;
  int jobs = 1;
};

// Min across the fixpointed fragments: fewest tokens, then fewest nodes, then
// enumeration order.
inline Wheat find_features(const std::vector<Fragment>& fragments, const Program& original,
                           const Model& model, QueryLedger& ledger,
                           const ExtractOptions& opts = {}) {
  Wheat best;
  bool first = true;
  for (const Fragment& frag : fragments) {
    std::vector<std::pair<int, std::string>> oov_log;
    Node fixed = mutate_to_fixpoint(frag.suff_method, original, model, ledger, opts.header,
                                    opts.fixpoint_cap, &oov_log);
    Node body = method_body(fixed);
    std::vector<Token> toks = tokenize(serialize(body));
    int tc = static_cast<int>(toks.size());
    int nc = node_count(body);
    bool better = first;
    if (!first) {
      int btc = best.token_count;
      int bnc = node_count(best.ast);
      better = tc < btc || (tc == btc && nc < bnc);
    }
    if (better) {
      best.ast = std::move(body);
      best.tokens = std::move(toks);
      best.token_count = tc;
      best.source_fragment = frag;
      best.oov_substitutions = std::move(oov_log);
      first = false;
    }
  }
  best.verdict = verify_wheat(model, best.ast, original, ledger, opts.header);
  return best;
}

// Reduce then Mutate, end to end.
inline Wheat extract_wheat(const Program& program, const Model& model, QueryLedger& ledger,
                           const ExtractOptions& opts = {}) {
  auto t0 = std::chrono::steady_clock::now();
  long q0 = ledger.total_queries();
  ReduceOptions ropts{opts.max_k, opts.header, opts.jobs};
  std::vector<Fragment> fragments = find_minimum_fragments(program, model, ledger, ropts);
  Wheat w = find_features(fragments, program, model, ledger, opts);
  w.label = ledger.predict(model, program.source).label;
  w.queries = ledger.total_queries() - q0;
  w.elapsed_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - t0).count();
  return w;
}

}  // namespace wheacha
