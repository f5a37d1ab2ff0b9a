#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "wheacha/analysis.hpp"
#include "wheacha/dd.hpp"
#include "wheacha/explain.hpp"
#include "wheacha/mutate.hpp"
#include "wheacha/oracle.hpp"

namespace wheacha {

inline nlohmann::json wheat_report(const Wheat& w, const std::string& program_path,
                                   bool include_timing = true) {
  nlohmann::json j;
  j["program_path"] = program_path;
  j["label"] = w.label;
  j["wheat_source"] = serialize(w.ast);
  nlohmann::json toks = nlohmann::json::array();
  for (const Token& t : w.tokens) toks.push_back(t.text);
  j["wheat_tokens"] = toks;
  j["token_count"] = w.token_count;
  j["fragment_k"] = w.source_fragment.k;
  j["queries"] = w.queries;
  if (include_timing) j["elapsed_ms"] = w.elapsed_ms;
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& [id, value] : w.oov_substitutions)
    subs.push_back(nlohmann::json::array({id, value}));
  j["oov_substitutions"] = subs;
  return j;
}

inline nlohmann::json dd_trace_report(const DdResult& r) {
  nlohmann::json j;
  // how token subsets become model inputs
  j["materialization"] = "projection of the original tree onto the surviving terminals";
  nlohmann::json steps = nlohmann::json::array();
  for (const DdStep& s : r.steps) {
    nlohmann::json step;
    step["partition"] = s.partition;
    step["tokens"] = s.tokens;
    step["unsatisfied"] = s.unsatisfied;
    steps.push_back(std::move(step));
  }
  j["steps"] = steps;
  j["final_tokens"] = r.final_tokens;
  j["terminal_count"] = r.terminal_count;
  j["final_source"] = r.final_source;
  return j;
}

inline nlohmann::json oracle_report(const OracleResult& r) {
  nlohmann::json j;
  j["verdict"] = r.confirmed_minimal ? "confirmed_minimal" : "smaller_found";
  j["candidates_enumerated"] = r.candidates_enumerated;
  j["wheat_terminal_count"] = r.wheat_terminal_count;
  j["universe_size"] = r.universe_size;
  if (r.smaller) {
    nlohmann::json s;
    s["tokens"] = r.smaller->tokens;
    s["terminal_count"] = r.smaller->terminal_count;
    s["source"] = r.smaller->source;
    j["smaller"] = s;
  }
  return j;
}

inline nlohmann::json ranking_report(const Ranking& r) {
  nlohmann::json out = nlohmann::json::array();
  for (const RankedEntry& e : r.entries) {
    nlohmann::json row;
    row["path"] = e.entry->path;
    row["distance"] = e.distance;
    if (!e.wheat_source.empty()) row["wheat_source"] = e.wheat_source;
    out.push_back(std::move(row));
  }
  return out;
}

// Extraction cache on disk, keyed by (program content hash, model id); enabled
// when WHEACHA_CACHE_DIR is set or a directory is given explicitly.
class WheatCache {
 public:
  explicit WheatCache(std::string dir = from_env()) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }

  static std::string from_env() {
    const char* env = std::getenv("WHEACHA_CACHE_DIR");
    return env ? std::string(env) : std::string();
  }

  bool enabled() const { return !dir_.empty(); }

  bool load(const Program& program, const std::string& model_id, Wheat& out) const {
    if (!enabled()) return false;
    std::ifstream in(key_path(program, model_id));
    if (!in) return false;
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) return false;
    try {
      Node wrapped = parse("void f() {\n" + j.at("wheat_source").get<std::string>() + "\n}");
      out.ast = method_body(wrapped);
      out.tokens = tokenize(serialize(out.ast));
      out.token_count = j.at("token_count").get<int>();
      out.label = j.at("label").get<std::string>();
      out.queries = j.value("queries", 0L);
      out.source_fragment.k = j.value("fragment_k", 0);
      out.oov_substitutions.clear();
      for (const auto& sub : j.value("oov_substitutions", nlohmann::json::array()))
        out.oov_substitutions.emplace_back(sub.at(0).get<int>(), sub.at(1).get<std::string>());
      out.verdict.sufficient = true;
      out.verdict.necessary = true;
    } catch (const std::exception&) {
      return false;
    }
    return true;
  }

  void store(const Program& program, const std::string& model_id, const Wheat& w) const {
    if (!enabled()) return;
    std::ofstream out(key_path(program, model_id));
    out << wheat_report(w, program.path, false).dump() << "\n";
  }

 private:
  std::string dir_;

  std::string key_path(const Program& program, const std::string& model_id) const {
    std::size_t h = std::hash<std::string>{}(program.source);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016zx", h);
    return dir_ + "/" + model_id + "-" + buf + ".json";
  }
};

}  // namespace wheacha
