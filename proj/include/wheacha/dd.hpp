#pragma once

#include <set>
#include <string>
#include <vector>

#include "wheacha/terminals.hpp"
#include "wheacha/verify.hpp"

namespace wheacha {

// One ddmin test: which requirement the candidate fails.
struct DdStep {
  std::string partition;            // e.g. "D3" or "N7"
  std::vector<std::string> tokens;  // candidate terminal texts
  std::string unsatisfied;          // "Pass", "Sufficient", "Necessary" or "Both"
};

struct DdResult {
  std::vector<std::string> final_tokens;  // surviving terminals, source order
  std::vector<int> final_positions;
  std::string final_source;               // materialized candidate (masked header)
  int terminal_count = 0;
  std::vector<DdStep> steps;
};

namespace detail {

struct DdContext {
  const Program& program;
  const Model& model;
  QueryLedger& ledger;
  std::string label;
  std::vector<Terminal> universe;
  std::vector<DdStep>* trace;
  HeaderMode mode;

  std::string materialize(const std::vector<int>& positions, HeaderMode m) const {
    std::set<int> keep(positions.begin(), positions.end());
    Node projected = Projector::project_method(program.method, keep);
    if (m == HeaderMode::MaskName) projected.value = kOov;
    return serialize(projected);
  }

  std::vector<int> complement(const std::vector<int>& s) const {
    std::set<int> in(s.begin(), s.end());
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(universe.size()); ++i)
      if (!in.count(i)) out.push_back(i);
    return out;
  }

  // Tests both requirements (the trace wants the full unsatisfied set). The
  // candidate itself is the sufficiency program; the necessity program is the
  // projection onto the complement, i.e. the token-level P minus candidate.
  bool test(const std::vector<int>& positions, const std::string& name) {
    bool suff = ledger.predict(model, materialize(positions, mode)).label == label;
    bool nec =
        ledger.predict(model, materialize(complement(positions), HeaderMode::KeepHeader)).label !=
        label;
    if (trace) {
      std::vector<std::string> texts;
      for (int i : positions) texts.push_back(universe[i].text);
      std::string verdict = suff ? (nec ? "Pass" : "Necessary")
                                 : (nec ? "Sufficient" : "Both");
      trace->push_back(DdStep{name, std::move(texts), std::move(verdict)});
    }
    return suff && nec;
  }
};

inline std::vector<std::vector<int>> split_partitions(const std::vector<int>& c, int parts) {
  std::vector<std::vector<int>> out;
  int n = static_cast<int>(c.size());
  for (int i = 0; i < parts; ++i) {
    int lo = static_cast<int>(static_cast<long>(i) * n / parts);
    int hi = static_cast<int>(static_cast<long>(i + 1) * n / parts);
    out.emplace_back(c.begin() + lo, c.begin() + hi);
  }
  return out;
}

}  // namespace detail

// Classic ddmin over the body's terminal-token sequence against the conjoined
// sufficient+necessary test. Stalls (and returns the current configuration)
// when no partition or complement passes at single-token granularity.
inline DdResult ddmin_wheat(const Program& program, const Model& model, QueryLedger& ledger,
                            HeaderMode mode = HeaderMode::MaskName) {
  DdResult result;
  detail::DdContext ctx{program, model, ledger,
                        ledger.predict(model, program.source).label,
                        body_terminals(program.method), &result.steps, mode};

  std::vector<int> current(ctx.universe.size());
  for (std::size_t i = 0; i < current.size(); ++i) current[i] = static_cast<int>(i);

  int delta_counter = 0;
  int parts = 2;
  while (static_cast<int>(current.size()) >= 2) {
    auto partitions = detail::split_partitions(current, parts);
    int base = delta_counter;
    delta_counter += parts;
    bool reduced = false;

    for (int i = 0; i < parts && !reduced; ++i) {
      if (ctx.test(partitions[i], "D" + std::to_string(base + i + 1))) {
        current = partitions[i];
        parts = 2;
        reduced = true;
      }
    }
    if (!reduced && parts > 2) {
      for (int i = 0; i < parts && !reduced; ++i) {
        std::vector<int> rest;
        for (int j = 0; j < parts; ++j)
          if (j != i) rest.insert(rest.end(), partitions[j].begin(), partitions[j].end());
        if (ctx.test(rest, "N" + std::to_string(base + i + 1))) {
          current = std::move(rest);
          parts = std::max(parts - 1, 2);
          reduced = true;
        }
      }
    }
    if (!reduced) {
      if (parts >= static_cast<int>(current.size())) break;  // stalled
      parts = std::min(parts * 2, static_cast<int>(current.size()));
    }
  }

  result.final_positions = current;
  for (int i : current) result.final_tokens.push_back(ctx.universe[i].text);
  result.terminal_count = static_cast<int>(current.size());
  result.final_source = ctx.materialize(current, mode);
  return result;
}

// Re-runs the conjoined test on the final configuration (for invariants).
inline bool dd_result_passes(const Program& program, const Model& model, QueryLedger& ledger,
                             const DdResult& r, HeaderMode mode = HeaderMode::MaskName) {
  detail::DdContext ctx{program, model, ledger,
                        ledger.predict(model, program.source).label,
                        body_terminals(program.method), nullptr, mode};
  return ctx.test(r.final_positions, "final");
}

}  // namespace wheacha
