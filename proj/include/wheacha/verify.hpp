#pragma once

#include <atomic>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "wheacha/algebra.hpp"
#include "wheacha/errors.hpp"
#include "wheacha/model.hpp"
#include "wheacha/program.hpp"

namespace wheacha {

// Shared query tally: the counter only counts cache misses, so queries_used of
// an extraction equals the number of distinct programs the model actually saw.
// Entries are keyed by (model id, exact source) so one ledger may serve
// several models.
class QueryLedger {
 public:
  Prediction predict(const Model& model, const std::string& source) {
    std::string key = model.id() + '\x1f' + source;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    Prediction p = model.predict(source);
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, fresh] = cache_.emplace(std::move(key), std::move(p));
    if (fresh) total_.fetch_add(1, std::memory_order_relaxed);
    return it->second;
  }

  long total_queries() const { return total_.load(std::memory_order_relaxed); }

  // Every distinct program source ever queried through this ledger.
  std::vector<std::string> cached_sources() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<std::string> out;
    out.reserve(cache_.size());
    for (const auto& [key, pred] : cache_)
      out.push_back(key.substr(key.find('\x1f') + 1));
    return out;
  }

  void set_recorder(std::vector<std::string>* rec) {
    std::lock_guard<std::mutex> lock(mu_);
    recorder_ = rec;
  }

  void record_materialized(const std::string& source) {
    std::lock_guard<std::mutex> lock(mu_);
    if (recorder_) recorder_->push_back(source);
  }

 private:
  std::atomic<long> total_{0};
  mutable std::mutex mu_;
  std::unordered_map<std::string, Prediction> cache_;
  std::vector<std::string>* recorder_ = nullptr;
};

struct Verdict {
  bool sufficient = false;
  bool necessary = false;
  std::optional<Prediction> suff_prediction;
  std::optional<Prediction> nec_prediction;
  long queries_used = 0;
};

namespace detail {

// Constituent requirement over the terminal-token sequences (the tokens a
// model consumes). Punctuation is serialization sugar: a candidate
// whose hoisted statements re-punctuate (e.g. arguments split into standalone
// statements) is still a subsequence of the original in terminal terms. An
// oov terminal stands for one erased original token.
inline bool constituent(const Node& candidate, const Program& original) {
  std::vector<Terminal> cand = terminal_tokens(body_as_block(candidate));
  std::vector<Terminal> whole = body_terminals(original.method);
  std::size_t j = 0;
  for (const Terminal& c : cand) {
    bool wild = c.text == kOov;
    while (j < whole.size() && !wild && whole[j].text != c.text) ++j;
    if (j >= whole.size()) return false;
    ++j;
  }
  return true;
}

}  // namespace detail

// Candidate body wrapped in the original header per mode, as model input.
inline std::string sufficiency_source(const Node& candidate, const Program& original,
                                      HeaderMode mode) {
  return serialize(wrap_with_header(original.method, body_as_block(candidate), mode));
}

inline std::string necessity_source(const Node& candidate, const Program& original) {
  return serialize(subtract(original.method, body_as_block(candidate)));
}

// Sufficiency: the model predicts the same label on the candidate alone.
// The constituent requirement is checked first.
inline bool check_sufficient(const Model& model, const Node& candidate, const Program& original,
                             QueryLedger& ledger, HeaderMode mode = HeaderMode::MaskName,
                             Prediction* out = nullptr) {
  if (!detail::constituent(candidate, original)) throw ConstituentViolation();
  std::string suff_src = sufficiency_source(candidate, original, mode);
  ledger.record_materialized(suff_src);
  Prediction original_pred = ledger.predict(model, original.source);
  Prediction p = ledger.predict(model, suff_src);
  bool ok = p.label == original_pred.label;
  if (out) *out = std::move(p);
  return ok;
}

// Necessity: subtracting the candidate changes the prediction.
inline bool check_necessary(const Model& model, const Node& candidate, const Program& original,
                            QueryLedger& ledger, Prediction* out = nullptr) {
  std::string nec_src = necessity_source(candidate, original);
  ledger.record_materialized(nec_src);
  Prediction original_pred = ledger.predict(model, original.source);
  Prediction p = ledger.predict(model, nec_src);
  bool ok = p.label != original_pred.label;
  if (out) *out = std::move(p);
  return ok;
}

// Conjunction of the two checks, short-circuiting after a sufficiency failure.
inline Verdict verify_wheat(const Model& model, const Node& candidate, const Program& original,
                            QueryLedger& ledger, HeaderMode mode = HeaderMode::MaskName) {
  Verdict v;
  long before = ledger.total_queries();
  Prediction suff;
  v.sufficient = check_sufficient(model, candidate, original, ledger, mode, &suff);
  v.suff_prediction = std::move(suff);
  if (v.sufficient) {
    Prediction nec;
    v.necessary = check_necessary(model, candidate, original, ledger, &nec);
    v.nec_prediction = std::move(nec);
  }
  v.queries_used = ledger.total_queries() - before;
  return v;
}

}  // namespace wheacha
