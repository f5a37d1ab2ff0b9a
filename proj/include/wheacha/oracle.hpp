#pragma once

#include <atomic>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "wheacha/dd.hpp"
#include "wheacha/mutate.hpp"

namespace wheacha {

// A strictly shorter passer found by exhaustive search.
struct SmallerWheat {
  std::vector<int> positions;          // terminal positions in the program body
  std::vector<std::string> tokens;     // terminal texts
  std::string source;                  // materialized sufficiency program
  int terminal_count = 0;
};

struct OracleResult {
  bool confirmed_minimal = true;
  std::optional<SmallerWheat> smaller;
  long candidates_enumerated = 0;
  int wheat_terminal_count = 0;
  int universe_size = 0;
};

struct OracleOptions {
  int token_limit = 14;  // hard limit on the program's terminal count
  int size_cap = 1 << 20;
  int batch_size = 1024;
  int jobs = 1;
  HeaderMode header = HeaderMode::MaskName;
};

// Exhausts all terminal subsequences of ascending length 1..|wheat|-1, each
// materialized by projection and tested against both requirements. Candidates
// are pre-generated in batches; evaluation may run in parallel, with the
// winner chosen by (length, lexicographic order) so the output is deterministic.
inline OracleResult brute_force_check(const Program& program, const Model& model,
                                      const Wheat& wheat, QueryLedger& ledger,
                                      const OracleOptions& opts = {}) {
  OracleResult result;
  detail::DdContext ctx{program, model, ledger,
                        ledger.predict(model, program.source).label,
                        body_terminals(program.method), nullptr, opts.header};
  int n = static_cast<int>(ctx.universe.size());
  result.universe_size = n;
  if (n > opts.token_limit) throw TokenLimitExceeded(opts.token_limit, n);
  result.wheat_terminal_count = static_cast<int>(terminal_tokens(wheat.ast).size());

  int max_size = std::min(opts.size_cap, result.wheat_terminal_count - 1);
  for (int size = 1; size <= max_size; ++size) {
    CombinationStream cs(n, size);
    std::vector<int> subset;
    bool exhausted = false;
    while (!exhausted) {
      std::vector<std::vector<int>> batch;
      while (static_cast<int>(batch.size()) < opts.batch_size) {
        if (!cs.next(subset)) { exhausted = true; break; }
        batch.push_back(subset);
      }
      if (batch.empty()) break;
      result.candidates_enumerated += static_cast<long>(batch.size());
      std::vector<char> pass(batch.size(), 0);
      auto evaluate = [&](std::size_t i) { pass[i] = ctx.test(batch[i], "") ? 1 : 0; };
      if (opts.jobs > 1 && model.concurrency_safe()) {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        int threads = std::min<std::size_t>(opts.jobs, batch.size());
        for (int t = 0; t < threads; ++t)
          pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < batch.size(); i = next.fetch_add(1))
              evaluate(i);
          });
        for (auto& th : pool) th.join();
      } else {
        for (std::size_t i = 0; i < batch.size(); ++i) evaluate(i);
      }
      for (std::size_t i = 0; i < batch.size(); ++i) {
        if (!pass[i]) continue;
        SmallerWheat sw;
        sw.positions = batch[i];
        for (int p : batch[i]) sw.tokens.push_back(ctx.universe[p].text);
        sw.source = ctx.materialize(batch[i], opts.header);
        sw.terminal_count = size;
        result.smaller = std::move(sw);
        result.confirmed_minimal = false;
        return result;
      }
    }
  }
  return result;
}

}  // namespace wheacha
