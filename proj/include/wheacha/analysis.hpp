#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "wheacha/mutate.hpp"
#include "wheacha/verify.hpp"

namespace wheacha {

enum class WheatClass { Lexical, Syntactic, Semantic };

inline const char* to_string(WheatClass c) {
  switch (c) {
    case WheatClass::Lexical: return "Lexical";
    case WheatClass::Syntactic: return "Syntactic";
    case WheatClass::Semantic: return "Semantic";
  }
  return "?";
}

namespace detail {

inline bool single_identifier_stmt(const Node& s) {
  if (s.kind == NodeKind::Identifier) return true;
  return s.kind == NodeKind::ExprStmt && s.children.size() == 1 &&
         s.children[0].kind == NodeKind::Identifier;
}

}  // namespace detail

// Wheat taxonomy. Semantic dominates: for an edge-consuming model, stripping
// all semantic edges from the wheat's evaluation must break the verdict.
// Otherwise Lexical when every statement is a single identifier, else Syntactic.
inline WheatClass classify_wheat(const Wheat& wheat, const Program& program, const Model& model,
                                 QueryLedger& ledger, HeaderMode mode = HeaderMode::MaskName) {
  if (model.edge_aware()) {
    std::string suff_src = sufficiency_source(wheat.ast, program, mode);
    std::string label = ledger.predict(model, program.source).label;
    bool stripped_sufficient = model.predict_without_edges(suff_src).label == label;
    bool both_hold = stripped_sufficient && wheat.verdict.necessary;
    if (!both_hold) return WheatClass::Semantic;
  }
  const Node& block = wheat.ast;
  bool all_single = !block.children.empty();
  for (const Node& s : block.children)
    if (!detail::single_identifier_stmt(s)) { all_single = false; break; }
  return all_single ? WheatClass::Lexical : WheatClass::Syntactic;
}

enum class ScoreSource { Occlusion, External };

struct AttributionScores {
  std::vector<double> scores;  // index-aligned with the program's token positions
  ScoreSource source = ScoreSource::Occlusion;
};

// Per-token score: probability drop of the predicted label when the token is
// replaced by oov. Positions whose replacement cannot be parsed score zero.
inline AttributionScores occlusion_attribution(const Program& program, const Model& model,
                                               QueryLedger& ledger) {
  Prediction base = ledger.predict(model, program.source);
  if (!base.probs) throw NoProbabilities();
  auto prob_of = [&](const Prediction& pred, const std::string& lab) {
    if (!pred.probs) return 0.0;
    auto it = pred.probs->find(lab);
    return it == pred.probs->end() ? 0.0 : it->second;
  };
  double p_orig = prob_of(base, base.label);

  AttributionScores out;
  out.source = ScoreSource::Occlusion;
  out.scores.resize(program.tokens.size(), 0.0);
  for (std::size_t i = 0; i < program.tokens.size(); ++i) {
    std::string src;
    for (std::size_t j = 0; j < program.tokens.size(); ++j) {
      if (j) src += " ";
      src += (j == i) ? kOov : program.tokens[j].text;
    }
    try {
      Prediction p = ledger.predict(model, src);
      out.scores[i] = p_orig - prob_of(p, base.label);
    } catch (const ParseError&) {
      out.scores[i] = 0.0;  // structural token, not occludable
    } catch (const LexError&) {
      out.scores[i] = 0.0;
    }
  }
  return out;
}

struct CoverageResult {
  double top_pct = 0;
  bool covered = false;
};

// Positions of the wheat's terminal tokens inside the original program's token
// sequence (leftmost subsequence embedding; oov matches any single token).
inline std::vector<int> wheat_token_positions(const std::vector<std::string>& wheat_terms,
                                              const Program& program) {
  std::vector<int> out;
  std::size_t j = 0;
  for (const std::string& w : wheat_terms) {
    bool wild = w == kOov;
    while (j < program.tokens.size() && !wild && program.tokens[j].text != w) ++j;
    if (j >= program.tokens.size()) return {};  // not constituent; treat as uncovered
    out.push_back(static_cast<int>(j));
    ++j;
  }
  return out;
}

inline std::vector<std::string> wheat_terminal_texts(const Wheat& w) {
  std::vector<std::string> out;
  for (const Terminal& t : terminal_tokens(w.ast)) out.push_back(t.text);
  return out;
}

// covered <=> every wheat token position lies among the ceil(top_pct% * n)
// highest-scored positions, ties broken by lower position index.
inline CoverageResult coverage(const AttributionScores& scores,
                               const std::vector<std::string>& wheat_terms,
                               const Program& program, double top_pct) {
  CoverageResult r;
  r.top_pct = top_pct;
  std::size_t n = scores.scores.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores.scores[a] != scores.scores[b]) return scores.scores[a] > scores.scores[b];
    return a < b;
  });
  std::size_t m = static_cast<std::size_t>(std::ceil(top_pct / 100.0 * n));
  std::vector<char> in_top(n, 0);
  for (std::size_t i = 0; i < m && i < n; ++i) in_top[order[i]] = 1;

  std::vector<int> positions = wheat_token_positions(wheat_terms, program);
  if (positions.empty() && !wheat_terms.empty()) {
    r.covered = false;
    return r;
  }
  r.covered = true;
  for (int p : positions)
    if (!in_top[p]) { r.covered = false; break; }
  return r;
}

}  // namespace wheacha
