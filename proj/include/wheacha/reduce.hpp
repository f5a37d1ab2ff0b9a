#pragma once

#include <atomic>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "wheacha/algebra.hpp"
#include "wheacha/errors.hpp"
#include "wheacha/verify.hpp"

namespace wheacha {

// A Reduce-level candidate: an ordered subset of the flattened statements.
struct Fragment {
  std::vector<Statement> statements;  // source order
  int k = 0;
  Node suff_method;   // subset re-nested under the (possibly masked) header
  Node nec_method;    // program minus the subset
};

// Streams every k-subset of {0..n-1} exactly once, in lexicographic index order.
class CombinationStream {
 public:
  CombinationStream(int n, int k) : n_(n), k_(k) {}

  bool next(std::vector<int>& out) {
    if (k_ > n_ || k_ <= 0) return false;
    if (idx_.empty()) {
      for (int i = 0; i < k_; ++i) idx_.push_back(i);
      out = idx_;
      return true;
    }
    int i = k_ - 1;
    while (i >= 0 && idx_[i] == n_ - k_ + i) --i;
    if (i < 0) return false;
    ++idx_[i];
    for (int j = i + 1; j < k_; ++j) idx_[j] = idx_[j - 1] + 1;
    out = idx_;
    return true;
  }

 private:
  int n_, k_;
  std::vector<int> idx_;
};

inline std::vector<std::vector<int>> combine_k(int n, int k) {
  std::vector<std::vector<int>> out;
  CombinationStream cs(n, k);
  std::vector<int> subset;
  while (cs.next(subset)) out.push_back(subset);
  return out;
}

namespace detail {

// Re-nest the selected statements to mirror the original syntactic structure:
// a statement whose enclosing control predicate is also selected goes back into
// that control's body; otherwise it is hoisted to the current level.
inline std::vector<Node> rebuild_selected(const Node& block, const std::set<int>& selected);

inline void emit_selected(const Node& stmt, const std::set<int>& selected,
                          std::vector<Node>& out) {
  if (!is_control_kind(stmt.kind)) {
    if (selected.count(stmt.id)) out.push_back(stmt);
    return;
  }
  bool picked = selected.count(stmt.id) > 0;
  switch (stmt.kind) {
    case NodeKind::If: {
      std::vector<Node> then_sel = rebuild_selected(stmt.children[1], selected);
      std::vector<Node> else_sel = stmt.children.size() > 2
                                       ? rebuild_selected(stmt.children[2], selected)
                                       : std::vector<Node>{};
      if (picked) {
        Node c = stmt;
        c.children[1].children = std::move(then_sel);
        if (stmt.children.size() > 2) c.children[2].children = std::move(else_sel);
        out.push_back(std::move(c));
      } else {
        for (Node& s : then_sel) out.push_back(std::move(s));
        for (Node& s : else_sel) out.push_back(std::move(s));
      }
      return;
    }
    case NodeKind::While:
    case NodeKind::For: {
      std::vector<Node> body_sel = rebuild_selected(stmt.children.back(), selected);
      if (picked) {
        Node c = stmt;
        c.children.back().children = std::move(body_sel);
        out.push_back(std::move(c));
      } else {
        for (Node& s : body_sel) out.push_back(std::move(s));
      }
      return;
    }
    case NodeKind::Switch: {
      if (picked) {
        Node c = stmt;
        for (std::size_t i = 1; i < c.children.size(); ++i) {
          Node& cs = c.children[i];
          std::size_t first = cs.value == "default" ? 0 : 1;
          std::vector<Node> body(cs.children.begin() + first, cs.children.end());
          cs.children.resize(first);
          for (const Node& b : body) emit_selected(b, selected, cs.children);
        }
        out.push_back(std::move(c));
      } else {
        for (std::size_t i = 1; i < stmt.children.size(); ++i) {
          const Node& cs = stmt.children[i];
          std::size_t first = cs.value == "default" ? 0 : 1;
          for (std::size_t j = first; j < cs.children.size(); ++j)
            emit_selected(cs.children[j], selected, out);
        }
      }
      return;
    }
    default:
      return;
  }
}

inline std::vector<Node> rebuild_selected(const Node& block, const std::set<int>& selected) {
  std::vector<Node> out;
  for (const Node& s : block.children) emit_selected(s, selected, out);
  return out;
}

}  // namespace detail

// Builds the two programs of one Reduce candidate: the subset re-nested under
// the header for the sufficiency check, and the subtraction remainder for the
// necessity check.
inline Fragment reconstruct(const std::vector<Statement>& all, const std::vector<int>& subset,
                            const Program& program, HeaderMode mode) {
  Fragment f;
  f.k = static_cast<int>(subset.size());
  std::set<int> selected;
  for (int i : subset) {
    f.statements.push_back(all[i]);
    selected.insert(all[i].origin);
  }
  Node body = method_body(program.method);
  body.children = detail::rebuild_selected(method_body(program.method), selected);
  f.suff_method = wrap_with_header(program.method, std::move(body), mode);

  Node frag_block;
  frag_block.kind = NodeKind::Block;
  frag_block.id = 0;
  for (const Statement& s : f.statements) frag_block.children.push_back(s.ast);
  f.nec_method = subtract(program.method, frag_block);
  return f;
}

struct ReduceOptions {
  int max_k = 3;
  HeaderMode header = HeaderMode::MaskName;
  int jobs = 1;
};

// Algorithm sketch: ascending cardinality k, all k-subsets, collect every
// subset whose two reconstructed programs pass verification; stop at the first
// k with a non-empty result. k never reaches the entire set, except for a
// single-statement body where the whole body is the only candidate.
inline std::vector<Fragment> find_minimum_fragments(const Program& program, const Model& model,
                                                    QueryLedger& ledger,
                                                    const ReduceOptions& opts = {}) {
  std::vector<Statement> stmts = flatten(program.method);
  int n = static_cast<int>(stmts.size());
  if (n == 0) throw FragmentSearchExhausted(opts.max_k);
  int upper = std::max(1, n - 1);
  int limit = std::min(opts.max_k, upper);

  for (int k = 1; k <= limit; ++k) {
    std::vector<std::vector<int>> subsets = combine_k(n, k);
    std::vector<Fragment> candidates(subsets.size());
    std::vector<char> pass(subsets.size(), 0);

    auto evaluate = [&](std::size_t i) {
      Fragment f = reconstruct(stmts, subsets[i], program, opts.header);
      Verdict v = verify_wheat(model, f.suff_method, program, ledger, opts.header);
      if (v.sufficient && v.necessary) {
        pass[i] = 1;
        candidates[i] = std::move(f);
      }
    };

    if (opts.jobs > 1 && model.concurrency_safe()) {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      int threads = std::min<int>(opts.jobs, static_cast<int>(subsets.size()));
      for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
          for (std::size_t i = next.fetch_add(1); i < subsets.size(); i = next.fetch_add(1))
            evaluate(i);
        });
      for (auto& th : pool) th.join();
    } else {
      for (std::size_t i = 0; i < subsets.size(); ++i) evaluate(i);
    }

    std::vector<Fragment> found;
    for (std::size_t i = 0; i < subsets.size(); ++i)
      if (pass[i]) found.push_back(std::move(candidates[i]));
    if (!found.empty()) return found;
  }
  throw FragmentSearchExhausted(opts.max_k);
}

}  // namespace wheacha
