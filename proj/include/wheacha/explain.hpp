#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wheacha/mutate.hpp"

namespace wheacha {

struct CorpusEntry {
  std::string path;
  Program program;
  std::string label;
};

struct Corpus {
  std::vector<CorpusEntry> entries;
  std::map<std::string, std::vector<int>> index;  // label -> entry indices

  static Corpus from_entries(std::vector<CorpusEntry> es) {
    Corpus c;
    c.entries = std::move(es);
    for (int i = 0; i < static_cast<int>(c.entries.size()); ++i)
      c.index[c.entries[i].label].push_back(i);
    return c;
  }
};

struct RankedEntry {
  const CorpusEntry* entry;
  double distance;
  std::string wheat_source;  // empty for the whole-method baseline
};

struct Ranking {
  std::vector<RankedEntry> entries;  // distances non-decreasing, ties by path
  int k = 0;
};

namespace detail {

inline int levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline std::vector<std::string> token_texts(const std::vector<Token>& toks) {
  std::vector<std::string> out;
  out.reserve(toks.size());
  for (const Token& t : toks) out.push_back(t.text);
  return out;
}

}  // namespace detail

inline int token_edit_distance(const std::vector<Token>& a, const std::vector<Token>& b) {
  return detail::levenshtein(detail::token_texts(a), detail::token_texts(b));
}

// Normalized token-sequence edit distance in [0,1]; 0 iff token-identical.
inline double wheat_distance(const std::vector<Token>& a, const std::vector<Token>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t denom = std::max(a.size(), b.size());
  return static_cast<double>(token_edit_distance(a, b)) / static_cast<double>(denom);
}

inline double wheat_distance(const Wheat& a, const Wheat& b) {
  return wheat_distance(a.tokens, b.tokens);
}

// Label words for the generative-label subset rule: split on camelCase and
// underscores, lowercased.
inline std::vector<std::string> label_words(const std::string& label) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : label) {
    if (c == '_') {
      if (!cur.empty()) words.push_back(cur);
      cur.clear();
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      if (!cur.empty()) words.push_back(cur);
      cur = std::string(1, static_cast<char>(std::tolower(c)));
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) words.push_back(cur);
  return words;
}

inline bool label_words_subset(const std::string& candidate, const std::string& target) {
  std::vector<std::string> cw = label_words(candidate), tw = label_words(target);
  std::set<std::string> tset(tw.begin(), tw.end());
  for (const std::string& w : cw)
    if (!tset.count(w)) return false;
  return !cw.empty();
}

// Entries whose label equals L, plus (generative-style) entries whose label
// words form a subset of L's words.
inline std::vector<int> label_bucket(const Corpus& corpus, const std::string& label) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(corpus.entries.size()); ++i) {
    const std::string& el = corpus.entries[i].label;
    if (el == label || label_words_subset(el, label)) out.push_back(i);
  }
  if (out.empty()) throw NoCandidates(label);
  return out;
}

using WheatProvider = std::function<Wheat(const CorpusEntry&)>;

// Ranks same-label training programs by wheat distance to the test wheat.
inline Ranking rank_training(const Wheat& test_wheat, const Corpus& corpus,
                             const std::string& label, int k, const WheatProvider& wheat_of) {
  std::vector<int> bucket = label_bucket(corpus, label);
  Ranking r;
  r.k = k;
  struct Row { int idx; double d; std::string src; };
  std::vector<Row> rows;
  for (int i : bucket) {
    Wheat w = wheat_of(corpus.entries[i]);
    rows.push_back(Row{i, wheat_distance(test_wheat, w), serialize(w.ast)});
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
    if (a.d != b.d) return a.d < b.d;
    return corpus.entries[a.idx].path < corpus.entries[b.idx].path;
  });
  for (const Row& row : rows) {
    if (static_cast<int>(r.entries.size()) >= k) break;
    r.entries.push_back(RankedEntry{&corpus.entries[row.idx], row.d, row.src});
  }
  return r;
}

// Whole-method baseline: distance over full program token sequences, no model.
inline Ranking rank_training_baseline(const Program& test_program, const Corpus& corpus,
                                      const std::string& label, int k) {
  std::vector<int> bucket = label_bucket(corpus, label);
  Ranking r;
  r.k = k;
  struct Row { int idx; double d; };
  std::vector<Row> rows;
  for (int i : bucket)
    rows.push_back(Row{i, wheat_distance(test_program.tokens, corpus.entries[i].program.tokens)});
  std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
    if (a.d != b.d) return a.d < b.d;
    return corpus.entries[a.idx].path < corpus.entries[b.idx].path;
  });
  for (const Row& row : rows) {
    if (static_cast<int>(r.entries.size()) >= k) break;
    r.entries.push_back(RankedEntry{&corpus.entries[row.idx], row.d, ""});
  }
  return r;
}

// The raw material for retraining: every sufficiency/necessity program
// materialized while extracting this input's wheat, in visit order, first
// occurrence kept. Runs on a fresh ledger so the list is replay-stable; if the
// fragment search exhausts, the queries collected so far are the answer.
inline std::vector<Program> generate_query_corpus(const Program& program, const Model& model,
                                                  const ExtractOptions& opts = {}) {
  std::vector<std::string> sources;
  QueryLedger ledger;
  ledger.set_recorder(&sources);
  ExtractOptions seq = opts;
  seq.jobs = 1;
  try {
    extract_wheat(program, model, ledger, seq);
  } catch (const FragmentSearchExhausted&) {
    // the candidates visited up to exhaustion are exactly what was queried
  }
  ledger.set_recorder(nullptr);
  std::vector<Program> out;
  std::set<std::string> seen;
  for (const std::string& src : sources) {
    if (!seen.insert(src).second) continue;
    out.push_back(Program::from_source(src));
  }
  return out;
}

}  // namespace wheacha
